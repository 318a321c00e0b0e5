// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"

namespace rydberg::cli {

using nlohmann::json;

std::ofstream Context::open(const std::string& name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (out_dir / name).string());
    outputs.push_back(name);
    return f;
}

void Context::warn(const std::string& message) {
    err << "warning: " << message << '\n';
    warnings.push_back(message);
}

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

void write_matrix_csv(std::ostream& out, const ComplexMatrix& rho) {
    out << "row,col,re,im\n";
    char buf[128];
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.15g,%.15g\n", static_cast<int>(i + 1), static_cast<int>(j + 1),
                          rho(i, j).real() + 0.0, rho(i, j).imag() + 0.0);
            out << buf;
        }
    }
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double max_population_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.diagonal() - b.diagonal()).cwiseAbs().maxCoeff();
}

json populations(const ComplexMatrix& rho) {
    json p = json::array();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) p.push_back(rho(i, i).real());
    return p;
}

Trajectory run_trajectory(Context& ctx, const Generator& g) {
    const auto& cfg = ctx.cfg;
    const ComplexMatrix rho0 = basis_projector(1, cfg.scheme.level_count());
    Trajectory traj = evolve(rho0, g, cfg.evolve);
    auto f = ctx.open("trajectory.csv");
    write_trajectory_csv(f, traj, cfg.all_coherences);
    return traj;
}

// Closed-form state, or nothing when it is undefined for these drives.
std::optional<ComplexMatrix> closed_form(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.scheme.level_count() != 6) {
        ctx.warn("closed-form state needs the six-level scheme; skipped");
        return std::nullopt;
    }
    if (!cfg.drive.resonant()) {
        ctx.warn("closed-form state assumes zero detunings; skipped");
        return std::nullopt;
    }
    try {
        return analytic_steady_state(AnalyticContext::from_drive(cfg.drive, cfg.scheme.decay_rate(2, 1)));
    } catch (const DomainError& e) {
        ctx.warn(std::string("closed-form state undefined: ") + e.what());
        return std::nullopt;
    }
}

}  // namespace

void cmd_steady_state(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const Generator g = build_generator(cfg.drive, cfg.scheme);
    const Trajectory traj = run_trajectory(ctx, g);
    const ComplexMatrix& rho_t = traj.final_state();
    {
        auto f = ctx.open("state_final.csv");
        write_matrix_csv(f, rho_t);
    }
    ctx.results["t_end_us"] = traj.times.back();
    ctx.results["final_populations"] = populations(rho_t);

    std::optional<ComplexMatrix> rho_ss;
    if (g.time_dependent()) {
        ctx.warn("closed-loop detuning is nonzero: no stationary state in this frame; null-space solve skipped");
    } else {
        rho_ss = steady_state(g.stationary);
        auto f = ctx.open("steady_state_numerical.csv");
        write_matrix_csv(f, *rho_ss);
        ctx.results["numerical_populations"] = populations(*rho_ss);
    }

    const auto rho_a = closed_form(ctx);
    if (rho_a) {
        auto f = ctx.open("steady_state_analytic.csv");
        write_matrix_csv(f, *rho_a);
        ctx.results["analytic_populations"] = populations(*rho_a);
    }

    const std::string t_label = fmt("%g", traj.times.back());
    if (rho_ss && rho_a) {
        const double fid = fidelity(*rho_ss, *rho_a);
        ctx.results["fidelity_steady_vs_analytic"] = fid;
        ctx.out << "fidelity (null-space steady state vs closed form): " << fmt("%.8f", fid) << '\n';
    }
    if (rho_a) {
        const double fid = fidelity(rho_t, *rho_a);
        ctx.results["fidelity_final_vs_analytic"] = fid;
        ctx.results["max_population_gap_final_vs_analytic"] = max_population_diff(rho_t, *rho_a);
        ctx.out << "fidelity (t = " << t_label << " us vs closed form): " << fmt("%.8f", fid) << '\n';
        ctx.out << "max population gap (t = " << t_label
                << " us vs closed form): " << fmt("%.3e", max_population_diff(rho_t, *rho_a)) << '\n';
    }
    if (rho_ss) {
        ctx.results["max_element_gap_final_vs_steady"] = max_abs_diff(rho_t, *rho_ss);
        ctx.out << "max element gap (t = " << t_label
                << " us vs null-space steady state): " << fmt("%.3e", max_abs_diff(rho_t, *rho_ss)) << '\n';
    }
    const ComplexMatrix& shown = rho_ss ? *rho_ss : rho_t;
    ctx.out << "populations:";
    for (Eigen::Index i = 0; i < shown.rows(); ++i) ctx.out << ' ' << fmt("%.6g", shown(i, i).real());
    ctx.out << '\n';
}

void cmd_dynamics(Context& ctx) {
    const Generator g = build_generator(ctx.cfg.drive, ctx.cfg.scheme);
    const Trajectory traj = run_trajectory(ctx, g);
    {
        auto f = ctx.open("state_final.csv");
        write_matrix_csv(f, traj.final_state());
    }
    const auto check = inspect_density_matrix(traj.final_state());
    ctx.results["samples"] = traj.times.size();
    ctx.results["final_populations"] = populations(traj.final_state());
    ctx.results["final_trace_error"] = check.trace_error;
    ctx.results["final_min_eigenvalue"] = check.min_eigenvalue;
    ctx.out << "recorded " << traj.times.size() << " snapshots up to t = " << fmt("%g", traj.times.back())
            << " us\n";
    ctx.out << "final populations:";
    for (Eigen::Index i = 0; i < traj.final_state().rows(); ++i) {
        ctx.out << ' ' << fmt("%.6g", traj.final_state()(i, i).real());
    }
    ctx.out << '\n';
}

void cmd_fidelity_map(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& fm = cfg.fidelity_map;
    std::vector<int> fixed;
    for (int n = 1; n <= 4; ++n) {
        if (n != fm.axis_x && n != fm.axis_y) fixed.push_back(n);
    }
    auto panels = fm.panels;
    if (panels.empty()) panels.emplace_back(cfg.drive.rf_rabi[fixed[0] - 1], cfg.drive.rf_rabi[fixed[1] - 1]);

    const NumericalModel model = cfg.numerical_model();
    json summary = json::array();
    for (std::size_t p = 0; p < panels.size(); ++p) {
        FidelityScanSpec spec;
        spec.base = cfg.drive;
        spec.base.rf_rabi[fixed[0] - 1] = panels[p].first;
        spec.base.rf_rabi[fixed[1] - 1] = panels[p].second;
        spec.axis_x = fm.axis_x;
        spec.axis_y = fm.axis_y;
        spec.min = fm.min;
        spec.max = fm.max;
        spec.resolution = fm.resolution;
        const FidelityScan scan = fidelity_scan(spec, model, cfg.workers);

        const std::string name = "fidelity_map_panel_" + std::to_string(p + 1) + ".csv";
        {
            auto f = ctx.open(name);
            write_scan_csv(f, scan);
        }
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        std::size_t arg_x = 0, arg_y = 0;
        for (std::size_t iy = 0; iy < scan.size(); ++iy) {
            for (std::size_t ix = 0; ix < scan.size(); ++ix) {
                const double v = scan.value(ix, iy);
                if (std::isnan(v)) continue;
                if (v < lo) {
                    lo = v;
                    arg_x = ix;
                    arg_y = iy;
                }
                hi = std::max(hi, v);
            }
        }
        for (const auto& f : scan.failures) ctx.warn(name + ": " + f);
        const double a = units::to_mhz(panels[p].first), b = units::to_mhz(panels[p].second);
        json entry = {{"file", name},
                      {"fixed_channels", fixed},
                      {"fixed_mhz", {a, b}},
                      {"failures", scan.failures.size()}};
        if (std::isfinite(lo)) {
            entry["min"] = lo;
            entry["max"] = hi;
            entry["argmin_mhz"] = {units::to_mhz(scan.axis_values[arg_x]), units::to_mhz(scan.axis_values[arg_y])};
        }
        summary.push_back(entry);
        ctx.out << name << ": Omega" << fixed[0] << " = " << fmt("%g", a) << " MHz, Omega" << fixed[1] << " = "
                << fmt("%g", b) << " MHz";
        if (std::isfinite(lo)) ctx.out << ", min " << fmt("%.6f", lo) << ", max " << fmt("%.6f", hi);
        if (!scan.failures.empty()) ctx.out << ", " << scan.failures.size() << " failed points";
        ctx.out << '\n';
    }
    ctx.results["panels"] = summary;
}

void cmd_optimize_lo(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& o = cfg.optimize;
    const auto active = active_channels(cfg.architecture);
    const auto spec = OptimizerSpec::restricted(cfg.drive, active, o.min, o.max, o.step, o.sum_max, o.half_width,
                                                o.samples_per_axis);
    const NumericalModel model = cfg.numerical_model();
    const OptimizerResult result = optimize_operating_point(spec, model, cfg.workers);

    const double threshold = result.best.average_fidelity - o.plateau_tolerance;
    std::size_t plateau = 0;
    {
        auto f = ctx.open("optimize_candidates.csv");
        f << "omega1_mhz,omega2_mhz,omega3_mhz,omega4_mhz,sum_mhz,average_fidelity,plateau\n";
        char buf[256];
        for (const auto& c : result.candidates) {
            double sum = 0.0;
            for (double v : c.point) sum += v;
            const bool in = c.average_fidelity >= threshold;
            plateau += in ? 1 : 0;
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,", units::to_mhz(c.point[0]),
                          units::to_mhz(c.point[1]), units::to_mhz(c.point[2]), units::to_mhz(c.point[3]),
                          units::to_mhz(sum));
            f << buf;
            if (!std::isnan(c.average_fidelity)) f << fmt("%.12f", c.average_fidelity);
            f << ',' << (in ? 1 : 0) << '\n';
        }
    }
    std::array<double, 4> best_mhz{};
    for (int n = 0; n < 4; ++n) best_mhz[n] = units::to_mhz(result.best.point[n]);
    ctx.results["best_mhz"] = best_mhz;
    ctx.results["best_average_fidelity"] = result.best.average_fidelity;
    ctx.results["feasible"] = result.feasible;
    ctx.results["failed"] = result.failed;
    ctx.results["plateau_size"] = plateau;
    ctx.out << "candidates: " << result.feasible << " feasible, " << result.failed << " failed\n";
    ctx.out << "best: 2pi x {" << fmt("%g", best_mhz[0]) << ", " << fmt("%g", best_mhz[1]) << ", "
            << fmt("%g", best_mhz[2]) << ", " << fmt("%g", best_mhz[3]) << "} MHz, average fidelity "
            << fmt("%.8f", result.best.average_fidelity) << '\n';
    ctx.out << "plateau (average fidelity >= best - " << fmt("%g", o.plateau_tolerance) << "): " << plateau
            << " candidates\n";

    if (o.reference) {
        PerturbationRegion region;
        region.center = *o.reference;
        for (int n : active) region.half_widths[n - 1] = o.half_width;
        region.samples_per_axis = o.samples_per_axis;
        const double avg = average_fidelity(region, cfg.drive, model, cfg.workers);
        const bool in = avg >= threshold;
        ctx.results["reference_average_fidelity"] = avg;
        ctx.results["reference_in_plateau"] = in;
        ctx.out << "reference point average fidelity " << fmt("%.8f", avg) << ": "
                << (in ? "inside" : "outside") << " the plateau\n";
    }
}

void cmd_waveform(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& w = cfg.waveform;
    cfg.cell.validate();
    ProbeModel probe{cfg.probe, cfg.numerical_model()};
    const GainVector gains = gain_coefficients(cfg.drive, cfg.cell, cfg.scheme, probe);
    for (const auto& m : gains.warnings) ctx.warn(m);
    for (const auto& m : heterodyne_warnings(w.signal, cfg.drive, cfg.scheme)) ctx.warn(m);

    WaveformRequest req;
    req.duration_us = w.duration_us;
    req.sample_rate_mhz = w.sample_rate_mhz;
    req.noise = NoiseSpec{w.noise_sigma, cfg.seed};
    req.workers = cfg.workers;
    req.mode = WaveformMode::kExact;
    const Waveform exact = synthesize_pd_waveform(w.signal, cfg.drive, cfg.cell, cfg.scheme, probe, req, gains);
    req.mode = WaveformMode::kLinearized;
    const Waveform lin = synthesize_pd_waveform(w.signal, cfg.drive, cfg.cell, cfg.scheme, probe, req, gains);

    // no tone and no noise: the record is pure DC
    const bool flat = w.noise_sigma == 0.0 && std::all_of(w.signal.channels.begin(), w.signal.channels.end(),
                                                          [](const RfChannelSignal& s) { return s.amplitude == 0.0; });
    {
        const auto ne = flat ? std::vector<double>(exact.current.size(), 0.0) : dc_removed_normalized(exact.current);
        const auto nl = flat ? std::vector<double>(lin.current.size(), 0.0) : dc_removed_normalized(lin.current);
        auto f = ctx.open("waveform.csv");
        f << "t_us,y_exact_a,y_linearized_a,exact_normalized,linearized_normalized\n";
        char buf[160];
        for (std::size_t i = 0; i < exact.current.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.10g,%.15g,%.15g,%.10g,%.10g\n", exact.time_us[i], exact.current[i],
                          lin.current[i], ne[i], nl[i]);
            f << buf;
        }
    }
    {
        std::vector<double> ac = exact.current;
        const double m = dsp::mean(ac);
        for (double& v : ac) v -= m;
        const std::size_t seg = std::min(w.spectrogram_segment, ac.size());
        const auto sg = dsp::spectrogram(ac, exact.sample_rate_hz, seg, w.spectrogram_hop, w.window);
        auto f = ctx.open("spectrogram.csv");
        f << "t_us,f_hz,amplitude_db\n";
        char buf[128];
        const std::size_t nf = sg.frequency_hz.size();
        for (std::size_t it = 0; it < sg.time_s.size(); ++it) {
            for (std::size_t k = 0; k < nf; ++k) {
                std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.6f\n", sg.time_s[it] * 1e6, sg.frequency_hz[k],
                              sg.amplitude_db[it * nf + k]);
                f << buf;
            }
        }
    }

    ctx.results["y_lo_a"] = dsp::mean(lin.current);
    std::array<double, 4> g{};
    for (int n = 0; n < 4; ++n) g[n] = gains.gain[n];
    ctx.results["gains_a_per_v_per_m"] = g;
    ctx.out << "samples: " << exact.current.size() << " at " << fmt("%g", w.sample_rate_mhz) << " MHz\n";
    ctx.out << "mean photocurrent: " << fmt("%.9e", dsp::mean(exact.current)) << " A\n";
    if (flat) {
        ctx.out << "no RF signal: output is flat DC\n";
        std::vector<double> ac = exact.current;
        const double m = dsp::mean(ac);
        for (double& v : ac) v -= m;
        ctx.results["dc_removed_rms_a"] = dsp::rms(ac);
        return;
    }
    const double disc = normalized_discrepancy(exact.current, lin.current);
    ctx.results["normalized_discrepancy"] = disc;
    ctx.out << "normalized exact vs linearized discrepancy: " << fmt("%.4e", disc) << '\n';

    std::vector<DemodChannel> demod;
    for (const auto& c : w.signal.channels) {
        demod.push_back({c.channel, c.offset / (2.0 * std::numbers::pi) * 1e6, c.bandwidth_hz});
    }
    const auto bands = iq_demodulate(exact, demod, w.demod, cfg.workers);
    auto f = ctx.open("baseband.csv");
    f << "channel,t_us,re_a,im_a\n";
    char buf[128];
    json chans = json::array();
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& b = bands[i];
        for (std::size_t k = 0; k < b.samples.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%d,%.10g,%.15g,%.15g\n", b.channel, b.time_us[k], b.samples[k].real(),
                          b.samples[k].imag());
            f << buf;
        }
        const auto& tone = w.signal.channels[i];
        const double expected = std::abs(gains.gain[tone.channel - 1]) * tone.amplitude;
        const double got = b.mean_magnitude();
        const double rel = expected > 0.0 ? std::abs(got - expected) / expected : 0.0;
        chans.push_back({{"channel", b.channel},
                         {"expected_magnitude_a", expected},
                         {"recovered_magnitude_a", got},
                         {"relative_error", rel},
                         {"samples", b.samples.size()}});
        ctx.out << "channel " << b.channel << ": |G|A = " << fmt("%.6e", expected) << " A, recovered "
                << fmt("%.6e", got) << " A (" << fmt("%.3f", 100.0 * rel) << " %)\n";
    }
    ctx.results["baseband"] = chans;
}

void cmd_sumrate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& r = cfg.sumrate;
    cfg.cell.validate();
    ComparisonSpec spec;
    spec.scheme = cfg.full_scheme;
    spec.base = cfg.drive;
    spec.cell = cfg.cell;
    spec.probe = cfg.probe;
    spec.temperature = r.temperature;
    spec.beta = r.beta;
    spec.architectures = r.architectures;
    for (auto& lo : spec.lo_points) lo = r.rabi_set;
    json baselines = json::object();
    if (r.optimize_baselines) {
        const auto& o = cfg.optimize;
        const LoSearch search{o.min, o.max, o.step, o.sum_max, o.half_width, o.samples_per_axis};
        for (Architecture a : spec.architectures) {
            if (a == Architecture::kHybrid) continue;
            auto& lo = spec.lo_points[static_cast<int>(a)];
            lo = optimize_architecture_lo(a, spec, search, cfg.workers);
            std::array<double, 4> lo_mhz{};
            for (int n = 0; n < 4; ++n) lo_mhz[n] = units::to_mhz(lo[n]);
            baselines[std::string(to_string(a))] = lo_mhz;
            ctx.out << to_string(a) << " LO (optimized): 2pi x {" << fmt("%g", lo_mhz[0]) << ", " << fmt("%g", lo_mhz[1])
                    << ", " << fmt("%g", lo_mhz[2]) << ", " << fmt("%g", lo_mhz[3]) << "} MHz\n";
        }
    }
    ctx.results["baseline_lo_mhz"] = baselines;

    std::vector<SweepPoint> sweep;
    for (double p : r.powers) sweep.push_back({"power", p, r.sweep_bandwidth});
    for (double b : r.bandwidths) sweep.push_back({"bandwidth", r.sweep_power, b});
    const ComparisonResult result = compare_architectures(spec, sweep, r.monte_carlo_samples, cfg.seed, cfg.workers);
    {
        auto f = ctx.open("sumrate.csv");
        write_rates_csv(f, result);
    }

    json setups = json::array();
    for (const auto& s : result.setups) {
        std::array<double, 4> g{};
        for (int n = 0; n < 4; ++n) g[n] = s.gains.gain[n];
        for (const auto& m : s.gains.warnings) ctx.warn(std::string(to_string(s.architecture)) + ": " + m);
        setups.push_back({{"architecture", std::string(to_string(s.architecture))},
                          {"y_lo_a", s.y_lo},
                          {"gains_a_per_v_per_m", g}});
        ctx.out << to_string(s.architecture) << ": y_LO " << fmt("%.6e", s.y_lo) << " A, gains";
        for (int n : s.channels) ctx.out << ' ' << n << ':' << fmt("%.4e", s.gains.gain[n - 1]);
        ctx.out << '\n';
    }
    ctx.results["setups"] = setups;

    // pointwise ordering hybrid >= crs >= prs, where all three were computed
    const std::size_t per_point = result.setups.size();
    std::size_t violations = 0;
    for (std::size_t i = 0; i + per_point <= result.rows.size(); i += per_point) {
        double rate[3] = {-1.0, -1.0, -1.0};
        for (std::size_t k = 0; k < per_point; ++k) rate[static_cast<int>(result.rows[i + k].architecture)] =
            result.rows[i + k].rate;
        const double crs = rate[0], prs = rate[1], hyb = rate[2];
        if (hyb >= 0.0 && crs >= 0.0 && hyb < crs) ++violations;
        if (crs >= 0.0 && prs >= 0.0 && crs < prs) ++violations;
    }
    ctx.results["ordering_violations"] = violations;
    ctx.out << result.rows.size() << " rows written; ordering hybrid >= crs >= prs violated at " << violations
            << " points\n";
}

bool cmd_validate_scheme(Context& ctx, const LevelScheme& scheme) {
    const ValidationReport report = validate_scheme(scheme);
    ctx.out << report;
    const int k = scheme.level_count();
    json counts = json::object();
    for (Architecture a : {Architecture::kHybrid, Architecture::kCrs, Architecture::kPrs}) {
        try {
            const int c = channel_count(a, k);
            counts[std::string(to_string(a))] = c;
            ctx.out << to_string(a) << " channels at K=" << k << ": " << c << '\n';
        } catch (const PreconditionError& e) {
            counts[std::string(to_string(a))] = nullptr;
            ctx.out << to_string(a) << " at K=" << k << ": " << e.what() << '\n';
        }
    }
    ctx.results["valid"] = report.valid();
    ctx.results["violations"] = report.violations;
    ctx.results["odd_loops"] = report.odd_loops;
    ctx.results["channel_counts"] = counts;
    return report.valid();
}

}  // namespace rydberg::cli
