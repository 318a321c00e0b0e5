// SPDX-License-Identifier: Apache-2.0
#include "rydberg/fidelity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/parallel.hpp"

namespace rydberg {

namespace {

// Square root of a density matrix. Eigenvalues at rounding level are zeroed:
// their square roots (~1e-8) would otherwise leak into the fidelity.
ComplexMatrix state_sqrt(const ComplexMatrix& rho) {
    const auto eig = numerics::hermitian_eig(numerics::hermitian_part(rho));
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * eig.eigenvalues.cwiseAbs().maxCoeff();
    numerics::RealVector root(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < root.size(); ++i) {
        root(i) = eig.eigenvalues(i) > floor ? std::sqrt(eig.eigenvalues(i)) : 0.0;
    }
    return eig.eigenvectors * root.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

double fidelity(const ComplexMatrix& rho_n, const ComplexMatrix& rho_a) {
    require_density_matrix(rho_n, "fidelity: first state");
    require_density_matrix(rho_a, "fidelity: second state");
    if (rho_n.rows() != rho_a.rows()) throw PreconditionError("fidelity: states have different dimensions");

    // Tr sqrt(sqrt(a) n sqrt(a)) is the trace norm of sqrt(a) sqrt(n); the
    // singular values of X and X^H agree, so the result is symmetric.
    const ComplexMatrix sa = state_sqrt(rho_a);
    const ComplexMatrix sn = state_sqrt(rho_n);
    Eigen::JacobiSVD<ComplexMatrix> svd(sa * sn);
    const double trace = svd.singularValues().sum();
    return std::clamp(trace * trace, 0.0, 1.0);
}

std::string_view to_string(NumericalRoute route) {
    return route == NumericalRoute::kNullSpace ? "null_space" : "evolve";
}

NumericalRoute parse_route(std::string_view text) {
    if (text == "null_space" || text == "nullspace") return NumericalRoute::kNullSpace;
    if (text == "evolve") return NumericalRoute::kEvolve;
    throw ConfigError("unknown numerical route '" + std::string(text) + "' (expected null_space or evolve)");
}

ComplexMatrix numerical_state(const DriveConfig& drive, const NumericalModel& model) {
    if (model.route == NumericalRoute::kNullSpace) return steady_state(drive, model.scheme);
    const Generator g = build_generator(drive, model.scheme);
    EvolveOptions options = model.evolve;
    options.record_interval = 0.0;
    return evolve(basis_projector(1, model.scheme.level_count()), g, options).final_state();
}

double point_fidelity(const DriveConfig& drive, const NumericalModel& model) {
    const ComplexMatrix numerical = numerical_state(drive, model);
    const auto ctx = AnalyticContext::from_drive(drive, model.scheme.decay_rate(2, 1));
    return fidelity(numerical, analytic_steady_state(ctx));
}

namespace {

void check_channel(int n, const char* what) {
    if (n < 1 || n > 4) throw PreconditionError(std::string(what) + ": RF channel must be 1..4");
}

}  // namespace

DriveConfig FidelityScan::drive_at(std::size_t ix, std::size_t iy) const {
    DriveConfig d = spec.base;
    d.rf_rabi[spec.axis_x - 1] = axis_values[ix];
    d.rf_rabi[spec.axis_y - 1] = axis_values[iy];
    return d;
}

FidelityScan fidelity_scan(const FidelityScanSpec& spec, const NumericalModel& model, unsigned workers) {
    check_channel(spec.axis_x, "fidelity_scan");
    check_channel(spec.axis_y, "fidelity_scan");
    if (spec.axis_x == spec.axis_y) throw PreconditionError("fidelity_scan: the two axes must differ");
    if (spec.resolution < 1) throw PreconditionError("fidelity_scan: resolution must be >= 1");
    if (!(spec.min >= 0.0) || !(spec.max >= spec.min)) {
        throw PreconditionError("fidelity_scan: need 0 <= min <= max");
    }

    FidelityScan scan;
    scan.spec = spec;
    const int n = spec.resolution;
    for (int i = 0; i < n; ++i) {
        scan.axis_values.push_back(n == 1 ? spec.min : spec.min + (spec.max - spec.min) * i / (n - 1));
    }
    const std::size_t total = static_cast<std::size_t>(n) * n;
    scan.values.assign(total, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> reasons(total);

    parallel_for(total, workers, [&](std::size_t k) {
        const std::size_t ix = k % n;
        const std::size_t iy = k / n;
        try {
            scan.values[k] = point_fidelity(scan.drive_at(ix, iy), model);
        } catch (const Error& e) {
            reasons[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < total; ++k) {
        if (!reasons[k].empty()) {
            scan.failures.push_back("(" + std::to_string(k % n) + "," + std::to_string(k / n) + "): " + reasons[k]);
        }
    }
    return scan;
}

void write_scan_csv(std::ostream& out, const FidelityScan& scan) {
    out << "omega1_mhz,omega2_mhz,omega3_mhz,omega4_mhz,fidelity\n";
    char buf[160];
    for (std::size_t iy = 0; iy < scan.size(); ++iy) {
        for (std::size_t ix = 0; ix < scan.size(); ++ix) {
            const DriveConfig d = scan.drive_at(ix, iy);
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,", units::to_mhz(d.rf_rabi[0]),
                          units::to_mhz(d.rf_rabi[1]), units::to_mhz(d.rf_rabi[2]), units::to_mhz(d.rf_rabi[3]));
            out << buf;
            const double f = scan.value(ix, iy);
            if (std::isfinite(f)) {
                std::snprintf(buf, sizeof buf, "%.12g", f);
                out << buf;
            }
            out << '\n';
        }
    }
}

std::vector<std::array<double, 4>> PerturbationRegion::sample_points() const {
    if (samples_per_axis < 1) throw PreconditionError("perturbation region: samples_per_axis must be >= 1");
    std::array<std::vector<double>, 4> axes;
    for (int n = 0; n < 4; ++n) {
        if (!(half_widths[n] >= 0.0)) throw PreconditionError("perturbation region: half widths must be >= 0");
        if (!(center[n] >= 0.0)) throw PreconditionError("perturbation region: center must be >= 0");
        if (half_widths[n] == 0.0 || samples_per_axis == 1) {
            axes[n] = {center[n]};
            continue;
        }
        for (int i = 0; i < samples_per_axis; ++i) {
            const double v = center[n] - half_widths[n] + 2.0 * half_widths[n] * i / (samples_per_axis - 1);
            axes[n].push_back(std::max(v, 0.0));
        }
    }
    std::vector<std::array<double, 4>> points;
    for (double a : axes[0])
        for (double b : axes[1])
            for (double c : axes[2])
                for (double d : axes[3]) points.push_back({a, b, c, d});
    return points;
}

double average_fidelity(const PerturbationRegion& region, const DriveConfig& base, const NumericalModel& model,
                        unsigned workers) {
    const auto points = region.sample_points();
    std::vector<double> values(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) {
        DriveConfig d = base;
        d.rf_rabi = points[i];
        values[i] = point_fidelity(d, model);
    });
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::vector<double> OptimizerSpec::axis_grid(double min, double max, double step) {
    if (!(step > 0.0) || !(max >= min) || !(min >= 0.0)) {
        throw PreconditionError("optimizer grid: need 0 <= min <= max and step > 0");
    }
    std::vector<double> grid;
    const auto count = static_cast<long long>(std::floor((max - min) / step * (1.0 + 1e-12) + 1e-9));
    for (long long i = 0; i <= count; ++i) grid.push_back(min + static_cast<double>(i) * step);
    return grid;
}

OptimizerSpec OptimizerSpec::restricted(const DriveConfig& base, const std::vector<int>& channels, double min,
                                        double max, double step, double sum_max, double half_width,
                                        int samples_per_axis) {
    OptimizerSpec spec;
    spec.base = base;
    spec.sum_max = sum_max;
    spec.samples_per_axis = samples_per_axis;
    const auto grid = axis_grid(min, max, step);
    for (int n = 1; n <= 4; ++n) {
        const bool on = std::find(channels.begin(), channels.end(), n) != channels.end();
        spec.grids[n - 1] = on ? grid : std::vector<double>{0.0};
        spec.half_widths[n - 1] = on ? half_width : 0.0;
    }
    return spec;
}

namespace {

double point_sum(const std::array<double, 4>& p) { return p[0] + p[1] + p[2] + p[3]; }

bool better(const OptimizerCandidate& a, const OptimizerCandidate& b) {
    if (std::isnan(b.average_fidelity)) return !std::isnan(a.average_fidelity);
    if (std::isnan(a.average_fidelity)) return false;
    if (a.average_fidelity != b.average_fidelity) return a.average_fidelity > b.average_fidelity;
    const double sa = point_sum(a.point), sb = point_sum(b.point);
    if (sa != sb) return sa < sb;
    return a.point < b.point;
}

}  // namespace

OptimizerResult optimize_operating_point(const OptimizerSpec& spec, const NumericalModel& model, unsigned workers) {
    if (!(spec.sum_max > 0.0)) throw PreconditionError("optimizer: sum constraint must be > 0");
    for (const auto& g : spec.grids) {
        if (g.empty()) throw PreconditionError("optimizer: every axis needs at least one candidate value");
    }

    OptimizerResult result;
    const double slack = 1e-9 * spec.sum_max;
    for (double a : spec.grids[0])
        for (double b : spec.grids[1])
            for (double c : spec.grids[2])
                for (double d : spec.grids[3]) {
                    const std::array<double, 4> p{a, b, c, d};
                    if (point_sum(p) <= spec.sum_max + slack) result.candidates.push_back({p, 0.0});
                }
    result.feasible = result.candidates.size();
    if (result.candidates.empty()) throw PreconditionError("optimizer: no candidate satisfies the sum constraint");

    parallel_for(result.candidates.size(), workers, [&](std::size_t i) {
        auto& cand = result.candidates[i];
        PerturbationRegion region{cand.point, spec.half_widths, spec.samples_per_axis};
        try {
            cand.average_fidelity = average_fidelity(region, spec.base, model, 1);
        } catch (const Error&) {
            cand.average_fidelity = std::numeric_limits<double>::quiet_NaN();
        }
    });

    result.best = result.candidates.front();
    for (const auto& cand : result.candidates) {
        if (std::isnan(cand.average_fidelity)) ++result.failed;
        if (better(cand, result.best)) result.best = cand;
    }
    if (std::isnan(result.best.average_fidelity)) {
        throw NumericalError("optimizer: every feasible candidate failed to evaluate");
    }
    return result;
}

}  // namespace rydberg
