// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rydberg/numerics.hpp"
#include "rydberg/quantum_core.hpp"

namespace rydberg {

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::ComplexVector;

/// Probe, coupling and RF drives in rad/us. rf_* arrays are indexed by
/// channel n-1. Rabi values are magnitudes; phases are carried separately.
struct DriveConfig {
    double omega_p = 0.0;
    double omega_c = 0.0;
    std::array<double, 4> rf_rabi{};
    double delta_p = 0.0;
    double delta_c = 0.0;
    std::array<double, 4> rf_detunings{};
    std::array<double, 4> rf_phases{};

    /// Delta_4 - (Delta_1 + Delta_2 + Delta_3)
    double closed_loop_detuning() const;
    bool resonant() const;

    /// Takes the RF detunings from the scheme's transitions.
    DriveConfig with_scheme_detunings(const LevelScheme& scheme) const;

    /// Omega_P = 2pi 5.7 MHz, Omega_C = 2pi 0.97 MHz, RF = 2pi {2, 7, 1, 6} MHz.
    static DriveConfig operating_point();
};

/// Six-level density matrices are plain ComplexMatrix values; these helpers
/// check the physical invariants.
struct DensityCheck {
    double hermiticity = 0.0;    // max |rho - rho^H|
    double trace_error = 0.0;    // |Tr rho - 1|
    double min_eigenvalue = 0.0;
};

DensityCheck inspect_density_matrix(const ComplexMatrix& rho);

/// Throws PreconditionError unless rho is square, Hermitian within 1e-9,
/// has unit trace within 1e-9 and eigenvalues >= -1e-8.
void require_density_matrix(const ComplexMatrix& rho, const char* what = "density matrix");

/// |k><k| in a K-level space (k 1-based).
ComplexMatrix basis_projector(int k, int levels);

/// Column-major stacking: vec(rho)[i + K j] = rho(i, j), 0-based.
ComplexVector vectorize(const ComplexMatrix& rho);
ComplexMatrix unvectorize(const ComplexVector& v, int levels);

/// Time-independent Hamiltonian (hbar = 1) for zero detunings and delta = 0.
/// Throws PreconditionError if any detuning is nonzero.
ComplexMatrix build_hamiltonian_resonant(const DriveConfig& drive, const LevelScheme& scheme);

/// Rotating-frame Hamiltonian at time t (us). The 3<->6 branch carries
/// exp(-i delta t) on the (3,6) element and its conjugate on (6,3).
ComplexMatrix build_hamiltonian_general(const DriveConfig& drive, const LevelScheme& scheme, double t);

/// 36x36 (K^2 x K^2) generator acting on column-major vec(rho):
///   -i (I (x) H - H^T (x) I) + sum_g gamma [L* (x) L - (I (x) L^H L + (L^H L)^T (x) I) / 2]
/// with L = |to><from| for every decay channel of the scheme.
using Liouvillian = ComplexMatrix;

Liouvillian build_liouvillian(const ComplexMatrix& h, const LevelScheme& scheme);

/// L(t) = stationary + exp(-i delta t) forward + exp(i delta t) backward.
/// For delta = 0 the generator is constant and `stationary` holds all of it.
struct Generator {
    Liouvillian stationary;
    Liouvillian forward;
    Liouvillian backward;
    double delta = 0.0;

    bool time_dependent() const { return delta != 0.0; }
    Liouvillian at(double t) const;
    ComplexVector apply(double t, const ComplexVector& v) const;
    /// Largest induced 1-norm over one period (bounded by the sum of parts).
    double norm_bound() const;
};

Generator build_generator(const DriveConfig& drive, const LevelScheme& scheme);

/// Wraps a fixed Liouvillian.
Generator constant_generator(const Liouvillian& l);

struct EvolveOptions {
    double t_end = 10.0;          // us
    double dt = 1e-4;             // us
    double record_interval = 0.01;  // us between stored snapshots; <= 0 stores only the endpoints
    double stability_factor = 0.1;  // require dt <= factor / |L|_1
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexMatrix> states;

    const ComplexMatrix& final_state() const { return states.back(); }
};

/// Fixed-step RK4 integration of d vec(rho)/dt = L(t) vec(rho). Each step is
/// re-Hermitized and trace-normalized. The step is shrunk slightly so that an
/// integer number of steps lands exactly on t_end. Throws PreconditionError
/// if dt exceeds the stability bound or rho0 is not a density matrix.
Trajectory evolve(const ComplexMatrix& rho0, const Generator& generator, const EvolveOptions& options = {});

/// Null-space steady state of a constant Liouvillian. Throws
/// DegenerateSteadyStateError when the kernel is not one-dimensional.
ComplexMatrix steady_state(const Liouvillian& l, double tol = 1e-9);

/// Builds the generator for (drive, scheme) and returns its steady state.
/// Throws PreconditionError when the closed-loop detuning is nonzero, since
/// no stationary rotating frame exists then.
ComplexMatrix steady_state(const DriveConfig& drive, const LevelScheme& scheme);

/// CSV: t_us, rho11..rhoKK (real), re_rho21, im_rho21, then optionally the
/// real and imaginary parts of every lower-triangular coherence.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, bool all_coherences = false);

}  // namespace rydberg
