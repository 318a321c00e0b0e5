// SPDX-License-Identifier: Apache-2.0
#include "rydberg/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rydberg/errors.hpp"

namespace rydberg::numerics {

namespace {

constexpr double kHermitianTolerance = 1e-9;
constexpr double kPsdClamp = 1e-10;

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw PreconditionError(std::string(what) + ": matrix must be square and non-empty, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& m) {
    require_square(m, "hermiticity_defect");
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianEigenResult hermitian_eig(const ComplexMatrix& m) {
    require_square(m, "hermitian_eig");
    const double defect = hermiticity_defect(m);
    if (!(defect <= kHermitianTolerance)) {
        throw PreconditionError("hermitian_eig: matrix is not Hermitian (max |m - m^H| = " +
                                std::to_string(defect) + ")");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_eig: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<ComplexVector> null_space(const ComplexMatrix& m, double tol) {
    require_square(m, "null_space");
    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const RealVector& sigma = svd.singularValues();
    const double norm = sigma.size() > 0 ? sigma(0) : 0.0;
    const double threshold = tol * norm;

    std::vector<ComplexVector> basis;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) <= threshold) basis.emplace_back(svd.matrixV().col(i));
    }
    return basis;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const auto eig = hermitian_eig(m);
    RealVector roots(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const double lambda = eig.eigenvalues(i);
        if (lambda < -kPsdClamp) {
            throw NumericalError("psd_sqrt: matrix is not PSD (eigenvalue " + std::to_string(lambda) + ")");
        }
        roots(i) = std::sqrt(std::max(lambda, 0.0));
    }
    return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

namespace {

// E1(x) for 0 < x <= 1.
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;  // (-x)^k / k!
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double contribution = term / k;
        sum += contribution;
        if (std::abs(contribution) < 1e-17 * std::abs(sum)) break;
    }
    return -std::numbers::egamma - std::log(x) - sum;
}

// exp(x) E1(x) for x > 1, modified Lentz evaluation of
// 1/(x+1- 1^2/(x+3- 2^2/(x+5- ...))).
double scaled_e1_continued_fraction(double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    double b = x + 1.0;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("exp_integral_e1: continued fraction did not converge");
}

void require_positive(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("exp_integral_e1: argument must be finite and > 0, got " + std::to_string(x));
    }
}

}  // namespace

double exp_integral_e1(double x) {
    require_positive(x);
    if (x <= 1.0) return e1_series(x);
    return std::exp(-x) * scaled_e1_continued_fraction(x);
}

double exp_scaled_e1(double x) {
    require_positive(x);
    if (x <= 1.0) return std::exp(x) * e1_series(x);
    return scaled_e1_continued_fraction(x);
}

ComplexVector rk4_step(const VectorField& deriv, double t, const ComplexVector& state, double dt) {
    if (!(dt > 0.0)) throw PreconditionError("rk4_step: dt must be > 0");
    const double half = 0.5 * dt;
    const ComplexVector k1 = deriv(t, state);
    const ComplexVector k2 = deriv(t + half, state + half * k1);
    const ComplexVector k3 = deriv(t + half, state + half * k2);
    const ComplexVector k4 = deriv(t + dt, state + dt * k3);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ComplexVector rk4_step(const std::function<ComplexVector(const ComplexVector&)>& deriv,
                       const ComplexVector& state, double dt) {
    return rk4_step([&deriv](double, const ComplexVector& y) { return deriv(y); }, 0.0, state, dt);
}

}  // namespace rydberg::numerics
