// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace rydberg::numerics {

using Complex = std::complex<double>;

/// Dense complex matrix. Storage is column-major (Eigen default), so the
/// linear index of entry (i, j) is i + rows * j. This is the same order used
/// to vectorize density matrices.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct HermitianEigenResult {
    RealVector eigenvalues;      // ascending
    ComplexMatrix eigenvectors;  // unitary, one eigenvector per column
};

/// Maximum elementwise |m - m^dagger|. Throws PreconditionError if m is not square.
double hermiticity_defect(const ComplexMatrix& m);

/// (m + m^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Eigendecomposition of a Hermitian matrix (Hermitian within 1e-9 elementwise).
HermitianEigenResult hermitian_eig(const ComplexMatrix& m);

/// Orthonormal basis of {v : |m v| <= tol |m|}, with |.| the spectral norm.
/// Computed from the right singular vectors of m.
std::vector<ComplexVector> null_space(const ComplexMatrix& m, double tol = 1e-9);

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues in [-1e-10, 0) are clamped to zero; anything more negative
/// raises NumericalError ("not PSD").
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Exponential integral E1(x) = int_x^inf exp(-t)/t dt for x > 0.
/// Power series for x <= 1, Lentz continued fraction above.
double exp_integral_e1(double x);

/// exp(x) * E1(x), evaluated without overflow for large x.
double exp_scaled_e1(double x);

/// Right-hand side f(t, y) of y' = f(t, y).
using VectorField = std::function<ComplexVector(double, const ComplexVector&)>;

/// One classical fourth-order Runge-Kutta step from (t, state) to t + dt.
ComplexVector rk4_step(const VectorField& deriv, double t, const ComplexVector& state, double dt);

/// Autonomous overload.
ComplexVector rk4_step(const std::function<ComplexVector(const ComplexVector&)>& deriv,
                       const ComplexVector& state, double dt);

}  // namespace rydberg::numerics
