// SPDX-License-Identifier: Apache-2.0
#include "rydberg/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <unsupported/Eigen/KroneckerProduct>

#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"

namespace rydberg {

double DriveConfig::closed_loop_detuning() const {
    return rf_detunings[3] - (rf_detunings[0] + rf_detunings[1] + rf_detunings[2]);
}

bool DriveConfig::resonant() const {
    if (delta_p != 0.0 || delta_c != 0.0) return false;
    for (double d : rf_detunings) {
        if (d != 0.0) return false;
    }
    return true;
}

DriveConfig DriveConfig::with_scheme_detunings(const LevelScheme& scheme) const {
    DriveConfig out = *this;
    for (int n = 1; n <= 4; ++n) {
        const RfTransition* t = scheme.find_channel(n);
        out.rf_detunings[n - 1] = t ? t->detuning : 0.0;
    }
    return out;
}

DriveConfig DriveConfig::operating_point() {
    DriveConfig d;
    d.omega_p = units::from_mhz(5.7);
    d.omega_c = units::from_mhz(0.97);
    d.rf_rabi = {units::from_mhz(2.0), units::from_mhz(7.0), units::from_mhz(1.0), units::from_mhz(6.0)};
    return d;
}

DensityCheck inspect_density_matrix(const ComplexMatrix& rho) {
    DensityCheck c;
    c.hermiticity = numerics::hermiticity_defect(rho);
    c.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(numerics::hermitian_part(rho), Eigen::EigenvaluesOnly);
    c.min_eigenvalue = solver.eigenvalues().minCoeff();
    return c;
}

void require_density_matrix(const ComplexMatrix& rho, const char* what) {
    if (rho.rows() == 0 || rho.rows() != rho.cols()) {
        throw PreconditionError(std::string(what) + ": must be a non-empty square matrix");
    }
    if (!rho.allFinite()) throw PreconditionError(std::string(what) + ": contains non-finite entries");
    const auto c = inspect_density_matrix(rho);
    if (c.hermiticity > 1e-9) {
        throw PreconditionError(std::string(what) + ": not Hermitian (defect " + std::to_string(c.hermiticity) + ")");
    }
    if (c.trace_error > 1e-9) {
        throw PreconditionError(std::string(what) + ": trace differs from 1 by " + std::to_string(c.trace_error));
    }
    if (c.min_eigenvalue < -1e-8) {
        throw PreconditionError(std::string(what) + ": negative eigenvalue " + std::to_string(c.min_eigenvalue));
    }
}

ComplexMatrix basis_projector(int k, int levels) {
    if (k < 1 || k > levels) throw PreconditionError("basis_projector: level out of range");
    ComplexMatrix p = ComplexMatrix::Zero(levels, levels);
    p(k - 1, k - 1) = 1.0;
    return p;
}

ComplexVector vectorize(const ComplexMatrix& rho) {
    return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, int levels) {
    if (v.size() != static_cast<Eigen::Index>(levels) * levels) {
        throw PreconditionError("unvectorize: vector length does not match level count");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), levels, levels);
}

namespace {

Complex rf_coupling(const DriveConfig& drive, int channel) {
    return std::polar(drive.rf_rabi[channel - 1], drive.rf_phases[channel - 1]);
}

void require_six_levels(const LevelScheme& scheme) {
    if (scheme.level_count() != 6) {
        throw PreconditionError("Hamiltonian builders need the six-level scheme, got K=" +
                                std::to_string(scheme.level_count()));
    }
}

// Off-diagonal couplings, with the 3<->6 branch optionally left out.
ComplexMatrix coupling_matrix(const DriveConfig& drive, const LevelScheme& scheme, bool include_loop_branch) {
    ComplexMatrix h = ComplexMatrix::Zero(6, 6);
    auto place = [&h](int lower, int upper, Complex omega) {
        h(lower - 1, upper - 1) += 0.5 * omega;
        h(upper - 1, lower - 1) += 0.5 * std::conj(omega);
    };
    place(1, 2, drive.omega_p);
    place(2, 3, drive.omega_c);
    for (const auto& t : scheme.rf_transitions) {
        if (t.channel < 1 || t.channel > 4) continue;
        if (t.channel == 4 && !include_loop_branch) continue;
        place(t.lower, t.upper, rf_coupling(drive, t.channel));
    }
    return h;
}

void add_detuning_diagonal(ComplexMatrix& h, const DriveConfig& drive) {
    const double cumulative[6] = {
        0.0,
        drive.delta_p,
        drive.delta_p + drive.delta_c,
        drive.delta_p + drive.delta_c + drive.rf_detunings[0],
        drive.delta_p + drive.delta_c + drive.rf_detunings[0] + drive.rf_detunings[1],
        drive.delta_p + drive.delta_c + drive.rf_detunings[0] + drive.rf_detunings[1] + drive.rf_detunings[2],
    };
    for (int i = 0; i < 6; ++i) h(i, i) -= cumulative[i];
}

ComplexMatrix hamiltonian_part(const ComplexMatrix& h) {
    const auto n = h.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    return Complex(0.0, -1.0) * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());
}

}  // namespace

ComplexMatrix build_hamiltonian_resonant(const DriveConfig& drive, const LevelScheme& scheme) {
    require_six_levels(scheme);
    if (!drive.resonant()) {
        throw PreconditionError("nonzero detuning: use build_hamiltonian_general");
    }
    return coupling_matrix(drive, scheme, true);
}

ComplexMatrix build_hamiltonian_general(const DriveConfig& drive, const LevelScheme& scheme, double t) {
    require_six_levels(scheme);
    ComplexMatrix h = coupling_matrix(drive, scheme, false);
    add_detuning_diagonal(h, drive);
    if (const RfTransition* loop = scheme.find_channel(4)) {
        const Complex phase = std::polar(1.0, -drive.closed_loop_detuning() * t);
        const Complex omega = 0.5 * rf_coupling(drive, 4) * phase;
        h(loop->lower - 1, loop->upper - 1) += omega;
        h(loop->upper - 1, loop->lower - 1) += std::conj(omega);
    }
    return h;
}

Liouvillian build_liouvillian(const ComplexMatrix& h, const LevelScheme& scheme) {
    const int k = scheme.level_count();
    if (h.rows() != k || h.cols() != k) {
        throw PreconditionError("build_liouvillian: Hamiltonian size does not match the scheme");
    }
    if (numerics::hermiticity_defect(h) > 1e-9) {
        throw PreconditionError("build_liouvillian: Hamiltonian is not Hermitian");
    }
    const ComplexMatrix id = ComplexMatrix::Identity(k, k);
    Liouvillian l = hamiltonian_part(h);
    for (const auto& d : scheme.decay_channels) {
        if (!(d.rate >= 0.0)) {
            throw PreconditionError("invalid scheme: decay " + std::to_string(d.from) + "->" + std::to_string(d.to) +
                                    " has negative rate");
        }
        if (d.from < 1 || d.from > k || d.to < 1 || d.to > k) {
            throw PreconditionError("invalid scheme: decay endpoints out of range");
        }
        if (d.rate == 0.0) continue;
        ComplexMatrix jump = ComplexMatrix::Zero(k, k);
        jump(d.to - 1, d.from - 1) = 1.0;
        const ComplexMatrix ldl = jump.adjoint() * jump;
        l += d.rate * (Eigen::kroneckerProduct(jump.conjugate(), jump).eval() -
                       0.5 * (Eigen::kroneckerProduct(id, ldl).eval() +
                              Eigen::kroneckerProduct(ldl.transpose(), id).eval()));
    }
    return l;
}

Liouvillian Generator::at(double t) const {
    if (!time_dependent()) return stationary;
    const Complex phase = std::polar(1.0, -delta * t);
    return stationary + phase * forward + std::conj(phase) * backward;
}

ComplexVector Generator::apply(double t, const ComplexVector& v) const {
    if (!time_dependent()) return stationary * v;
    const Complex phase = std::polar(1.0, -delta * t);
    return stationary * v + phase * (forward * v) + std::conj(phase) * (backward * v);
}

double Generator::norm_bound() const {
    auto one_norm = [](const Liouvillian& m) {
        return m.size() == 0 ? 0.0 : m.cwiseAbs().colwise().sum().maxCoeff();
    };
    if (!time_dependent()) return one_norm(stationary);
    return one_norm(stationary) + one_norm(forward) + one_norm(backward);
}

Generator build_generator(const DriveConfig& drive, const LevelScheme& scheme) {
    Generator g;
    g.delta = scheme.find_channel(4) ? drive.closed_loop_detuning() : 0.0;
    if (!g.time_dependent()) {
        g.stationary = build_liouvillian(build_hamiltonian_general(drive, scheme, 0.0), scheme);
        return g;
    }
    // Split H(t) = H_s + e^{-i delta t} P + e^{i delta t} P^H; the Hamiltonian
    // part of the generator is linear in H so each piece maps separately.
    DriveConfig without_loop = drive;
    without_loop.rf_rabi[3] = 0.0;
    g.stationary = build_liouvillian(build_hamiltonian_general(without_loop, scheme, 0.0), scheme);
    const RfTransition* loop = scheme.find_channel(4);
    ComplexMatrix p = ComplexMatrix::Zero(6, 6);
    p(loop->lower - 1, loop->upper - 1) = 0.5 * rf_coupling(drive, 4);
    g.forward = hamiltonian_part(p);
    g.backward = hamiltonian_part(ComplexMatrix(p.adjoint()));
    return g;
}

Generator constant_generator(const Liouvillian& l) {
    Generator g;
    g.stationary = l;
    return g;
}

namespace {

void normalize_in_place(ComplexVector& v, int levels) {
    Eigen::Map<ComplexMatrix> rho(v.data(), levels, levels);
    const ComplexMatrix herm = numerics::hermitian_part(rho);
    rho = herm / herm.trace().real();
}

}  // namespace

Trajectory evolve(const ComplexMatrix& rho0, const Generator& generator, const EvolveOptions& options) {
    require_density_matrix(rho0, "evolve: initial state");
    const int k = static_cast<int>(rho0.rows());
    if (generator.stationary.rows() != k * k) {
        throw PreconditionError("evolve: generator size does not match the initial state");
    }
    if (!(options.t_end >= 0.0) || !(options.dt > 0.0)) {
        throw PreconditionError("evolve: need t_end >= 0 and dt > 0");
    }
    const double norm = generator.norm_bound();
    if (norm > 0.0 && options.dt > options.stability_factor / norm) {
        throw PreconditionError("evolve: dt = " + std::to_string(options.dt) + " us exceeds the stability bound " +
                                std::to_string(options.stability_factor / norm) + " us (0.1/|L|_1)");
    }

    const long long steps = options.t_end == 0.0 ? 0 : std::max(1LL, static_cast<long long>(std::ceil(options.t_end / options.dt - 1e-9)));
    const double dt = steps > 0 ? options.t_end / static_cast<double>(steps) : options.dt;
    const long long record_every =
        options.record_interval > 0.0 ? std::max(1LL, std::llround(options.record_interval / dt)) : 0;

    Trajectory traj;
    ComplexVector state = vectorize(rho0);
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);

    auto deriv = [&generator](double t, const ComplexVector& y) { return generator.apply(t, y); };
    for (long long s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s - 1) * dt;
        state = numerics::rk4_step(deriv, t, state, dt);
        normalize_in_place(state, k);
        if (!state.allFinite()) throw NumericalError("evolve: state became non-finite at t = " + std::to_string(t));
        if (s == steps || (record_every > 0 && s % record_every == 0)) {
            traj.times.push_back(static_cast<double>(s) * dt);
            traj.states.push_back(unvectorize(state, k));
        }
    }
    return traj;
}

ComplexMatrix steady_state(const Liouvillian& l, double tol) {
    const auto dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(l.rows()))));
    if (dim * dim != l.rows() || l.rows() != l.cols()) {
        throw PreconditionError("steady_state: Liouvillian must be K^2 x K^2");
    }
    const auto kernel = numerics::null_space(l, tol);
    if (kernel.size() != 1) throw DegenerateSteadyStateError(kernel.size());
    ComplexMatrix rho = numerics::hermitian_part(unvectorize(kernel.front(), dim));
    const double trace = rho.trace().real();
    if (!(std::abs(trace) > 1e-12)) throw NumericalError("steady_state: null vector has vanishing trace");
    rho /= trace;
    return rho;
}

ComplexMatrix steady_state(const DriveConfig& drive, const LevelScheme& scheme) {
    const Generator g = build_generator(drive, scheme);
    if (g.time_dependent()) {
        throw PreconditionError(
            "steady_state: closed-loop detuning is nonzero, so the generator keeps oscillating and no stationary "
            "rotating frame exists; use evolve instead");
    }
    return steady_state(g.stationary);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, bool all_coherences) {
    if (trajectory.states.empty()) return;
    const int k = static_cast<int>(trajectory.states.front().rows());
    out << "t_us";
    for (int i = 1; i <= k; ++i) out << ",rho" << i << i;
    out << ",re_rho21,im_rho21";
    if (all_coherences) {
        for (int j = 1; j <= k; ++j) {
            for (int i = j + 1; i <= k; ++i) out << ",re_rho" << i << j << ",im_rho" << i << j;
        }
    }
    out << '\n';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.12g", v);
        out << buf;
    };
    for (std::size_t s = 0; s < trajectory.states.size(); ++s) {
        const auto& rho = trajectory.states[s];
        std::snprintf(buf, sizeof buf, "%.10g", trajectory.times[s]);
        out << buf;
        for (int i = 0; i < k; ++i) put(rho(i, i).real());
        put(rho(1, 0).real());
        put(rho(1, 0).imag());
        if (all_coherences) {
            for (int j = 0; j < k; ++j) {
                for (int i = j + 1; i < k; ++i) {
                    put(rho(i, j).real());
                    put(rho(i, j).imag());
                }
            }
        }
        out << '\n';
    }
}

}  // namespace rydberg
