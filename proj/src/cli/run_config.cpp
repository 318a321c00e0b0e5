// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rydberg/cli.hpp"
#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"

namespace rydberg::cli {

namespace fs = std::filesystem;
using config::Dimension;
using config::Section;
using nlohmann::json;

namespace {

[[noreturn]] void bad(const Section& s, const std::string& key, const std::string& message) {
    throw ConfigError("[" + s.name() + "] " + key + ": " + message);
}

void require_range(const Section& s, const std::string& key, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "value " << v << " outside [" << lo << ", " << hi << "]";
        bad(s, key, msg.str());
    }
}

std::array<double, 4> four(const Section& s, const std::string& base, Dimension dim) {
    const auto v = s.get_quantity_list(base, dim);
    if (v.size() != 4) bad(s, base, "expected 4 comma-separated values, got " + std::to_string(v.size()));
    return {v[0], v[1], v[2], v[3]};
}

void read_run(const config::Document& doc, const fs::path& base_dir, RunConfig& cfg) {
    const Section& s = doc.section("run");
    if (s.has("scheme")) {
        fs::path p = s.get_string("scheme");
        if (p.is_relative()) p = base_dir / p;
        if (!fs::exists(p)) bad(s, "scheme", "file not found: " + p.string());
        cfg.scheme_source = p.lexically_normal().string();
        cfg.full_scheme = load_scheme(p.string());
    } else {
        cfg.full_scheme = cesium_scheme();
    }
    if (s.has("architecture")) cfg.architecture = parse_architecture(s.get_string("architecture"));
    const long long seed = s.get_int("seed", 1);
    if (seed < 0) bad(s, "seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
    const long long workers = s.get_int("workers", 1);
    if (workers < 1 || workers > 1024) bad(s, "workers", "must be in [1, 1024]");
    cfg.workers = static_cast<unsigned>(workers);
    s.require_all_consumed();
}

void read_decay(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("decay");
    if (s.entries().empty()) return;
    if (cfg.full_scheme.level_count() != 6) bad(s, "preset", "decay overrides need a six-level scheme");
    const auto& sch = cfg.full_scheme;
    DecayRates r{sch.decay_rate(2, 1), sch.decay_rate(3, 2), sch.decay_rate(4, 3),
                 sch.decay_rate(5, 4), sch.decay_rate(6, 5), sch.decay_rate(6, 3)};
    const std::string preset = s.get_string("preset", "scheme");
    if (preset == "cesium") {
        r = DecayRates::cesium_default();
    } else if (preset == "probe_only") {
        r = DecayRates::probe_only(r.g21);
    } else if (preset != "scheme") {
        bad(s, "preset", "unknown preset '" + preset + "' (expected scheme, cesium or probe_only)");
    }
    const std::pair<const char*, double*> keys[] = {{"gamma_21", &r.g21}, {"gamma_32", &r.g32},
                                                    {"gamma_43", &r.g43}, {"gamma_54", &r.g54},
                                                    {"gamma_65", &r.g65}, {"gamma_63", &r.g63}};
    for (const auto& [key, dst] : keys) {
        if (!s.has_quantity(key, Dimension::kFrequency)) continue;
        *dst = s.get_quantity(key, Dimension::kFrequency);
        if (!(*dst >= 0.0)) bad(s, key, "decay rate must be >= 0");
    }
    s.require_all_consumed();
    cfg.full_scheme = with_decays(cfg.full_scheme, r);
}

void read_drive(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("drive");
    auto& d = cfg.drive;
    const double max_rabi = units::from_mhz(1000.0);
    d.omega_p = s.get_quantity("omega_p", Dimension::kFrequency, d.omega_p);
    require_range(s, "omega_p", d.omega_p, 0.0, max_rabi);
    d.omega_c = s.get_quantity("omega_c", Dimension::kFrequency, d.omega_c);
    require_range(s, "omega_c", d.omega_c, 0.0, max_rabi);
    if (s.has_quantity("rf_rabi", Dimension::kFrequency)) d.rf_rabi = four(s, "rf_rabi", Dimension::kFrequency);
    for (double v : d.rf_rabi) require_range(s, "rf_rabi", v, 0.0, max_rabi);
    d.delta_p = s.get_quantity("delta_p", Dimension::kFrequency, 0.0);
    d.delta_c = s.get_quantity("delta_c", Dimension::kFrequency, 0.0);
    if (s.has_quantity("rf_detunings", Dimension::kFrequency)) {
        d.rf_detunings = four(s, "rf_detunings", Dimension::kFrequency);
    }
    if (s.has_quantity("rf_phases", Dimension::kAngle)) d.rf_phases = four(s, "rf_phases", Dimension::kAngle);
    cfg.use_scheme_detunings = s.get_bool("use_scheme_detunings", false);
    s.require_all_consumed();
    if (cfg.use_scheme_detunings) d = d.with_scheme_detunings(cfg.scheme);
    // channels the architecture does not drive carry no field
    d.rf_rabi = architecture_lo(d.rf_rabi, cfg.architecture);
}

void read_simulation(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("simulation");
    auto& e = cfg.evolve;
    e.t_end = s.get_quantity("t_end", Dimension::kTime, e.t_end);
    require_range(s, "t_end", e.t_end, 0.0, 1e6);
    e.dt = s.get_quantity("dt", Dimension::kTime, e.dt);
    require_range(s, "dt", e.dt, 1e-9, 1.0);
    e.record_interval = s.get_quantity("record_interval", Dimension::kTime, e.record_interval);
    if (s.has("route")) cfg.route = parse_route(s.get_string("route"));
    cfg.all_coherences = s.get_bool("all_coherences", false);
    s.require_all_consumed();
}

int channel_key(const Section& s, const std::string& key, long long fallback) {
    const long long v = s.get_int(key, fallback);
    if (v < 1 || v > 4) bad(s, key, "channel must be 1..4");
    return static_cast<int>(v);
}

void read_fidelity_map(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("fidelity_map");
    auto& f = cfg.fidelity_map;
    f.axis_x = channel_key(s, "axis_x", 2);
    f.axis_y = channel_key(s, "axis_y", 3);
    if (f.axis_x == f.axis_y) bad(s, "axis_y", "axes must be different channels");
    f.min = s.get_quantity("min", Dimension::kFrequency, 0.0);
    f.max = s.get_quantity("max", Dimension::kFrequency, units::from_mhz(10.0));
    require_range(s, "min", f.min, 0.0, units::from_mhz(1000.0));
    require_range(s, "max", f.max, f.min, units::from_mhz(1000.0));
    const long long res = s.get_int("resolution", 21);
    if (res < 1 || res > 1001) bad(s, "resolution", "must be in [1, 1001]");
    f.resolution = static_cast<int>(res);
    for (int n = 1;; ++n) {
        const std::string key = "panel_" + std::to_string(n);
        if (!s.has_quantity(key, Dimension::kFrequency)) break;
        const auto v = s.get_quantity_list(key, Dimension::kFrequency);
        if (v.size() != 2) bad(s, key, "expected the two fixed Rabi values");
        for (double x : v) require_range(s, key, x, 0.0, units::from_mhz(1000.0));
        f.panels.emplace_back(v[0], v[1]);
    }
    s.require_all_consumed();
}

void read_optimize(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("optimize");
    auto& o = cfg.optimize;
    o.min = s.get_quantity("min", Dimension::kFrequency, 0.0);
    o.max = s.get_quantity("max", Dimension::kFrequency, units::from_mhz(10.0));
    o.step = s.get_quantity("step", Dimension::kFrequency, units::from_mhz(1.0));
    o.sum_max = s.get_quantity("sum_max", Dimension::kFrequency, units::from_mhz(20.0));
    o.half_width = s.get_quantity("half_width", Dimension::kFrequency, units::from_khz(2.0));
    require_range(s, "min", o.min, 0.0, units::from_mhz(1000.0));
    require_range(s, "max", o.max, o.min, units::from_mhz(1000.0));
    if (!(o.step > 0.0)) bad(s, "step", "must be > 0");
    if (!(o.sum_max >= 0.0)) bad(s, "sum_max", "must be >= 0");
    require_range(s, "half_width", o.half_width, 0.0, units::from_mhz(10.0));
    const long long samples = s.get_int("samples_per_axis", 3);
    if (samples < 1 || samples > 11) bad(s, "samples_per_axis", "must be in [1, 11]");
    o.samples_per_axis = static_cast<int>(samples);
    if (s.has_quantity("reference", Dimension::kFrequency)) o.reference = four(s, "reference", Dimension::kFrequency);
    o.plateau_tolerance = s.get_double("plateau_tolerance", 1e-5);
    if (!(o.plateau_tolerance >= 0.0)) bad(s, "plateau_tolerance", "must be >= 0");
    s.require_all_consumed();
    const double points = std::floor((o.max - o.min) / o.step + 1e-9) + 1.0;
    if (points > 1000.0) bad(s, "step", "more than 1000 grid points per axis");
}

void read_cell(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("cell");
    const double field = s.get_quantity("probe_field", Dimension::kField, 1000.0);
    if (!(field > 0.0)) bad(s, "probe_field", "must be > 0");
    auto& c = cfg.cell;
    c = VaporCellParams::cesium_default(cfg.drive.omega_p, field);
    if (s.has_quantity("probe_dipole", Dimension::kDipole)) {
        if (s.has_quantity("probe_field", Dimension::kField)) bad(s, "probe_dipole", "give probe_field or probe_dipole");
        c.probe_dipole = units::dipole_si(s.get_quantity("probe_dipole", Dimension::kDipole));
    }
    c.cell_length = s.get_quantity("cell_length", Dimension::kLength, c.cell_length);
    c.atomic_density = s.get_quantity("atomic_density", Dimension::kDensity, c.atomic_density);
    c.probe_wavelength = s.get_quantity("probe_wavelength", Dimension::kLength, c.probe_wavelength);
    c.probe_power = s.get_quantity("probe_power", Dimension::kPower, c.probe_power);
    c.responsivity = s.get_quantity("responsivity", Dimension::kResponsivity, c.responsivity);
    if (s.has("xi0")) c.xi0_override = s.get_double("xi0");
    s.require_all_consumed();

    const Section& p = doc.section("probe");
    if (p.has("model")) cfg.probe = parse_probe_kind(p.get_string("model"));
    p.require_all_consumed();
}

void read_waveform(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("waveform");
    auto& w = cfg.waveform;
    w.duration_us = s.get_quantity("duration", Dimension::kTime, w.duration_us);
    require_range(s, "duration", w.duration_us, 1e-3, 1e5);
    w.sample_rate_mhz = s.get_quantity("sample_rate", Dimension::kBandwidth, w.sample_rate_mhz * 1e6) * 1e-6;
    require_range(s, "sample_rate", w.sample_rate_mhz, 1e-3, 1e4);
    if (w.duration_us * w.sample_rate_mhz > 5e7) bad(s, "duration", "more than 5e7 samples");

    std::vector<double> channels;
    if (s.has("channels")) channels = s.get_list("channels");
    const std::size_t n = channels.size();
    auto list = [&](const std::string& base, Dimension dim, double fallback) {
        std::vector<double> v(n, fallback);
        if (s.has_quantity(base, dim)) v = s.get_quantity_list(base, dim);
        if (v.size() != n) bad(s, base, "expected one value per channel (" + std::to_string(n) + ")");
        return v;
    };
    const auto offsets = list("offsets", Dimension::kFrequency, 0.0);
    const auto amplitudes = list("amplitudes", Dimension::kField, 0.0);
    const auto bandwidths = list("bandwidths", Dimension::kBandwidth, 1e5);
    const auto phases = list("phases", Dimension::kAngle, 0.0);
    w.signal.channels.clear();
    for (std::size_t i = 0; i < n; ++i) {
        RfChannelSignal c;
        if (channels[i] != std::floor(channels[i]) || channels[i] < 1 || channels[i] > 4) {
            bad(s, "channels", "channel numbers must be integers 1..4");
        }
        c.channel = static_cast<int>(channels[i]);
        c.offset = offsets[i];
        c.amplitude = amplitudes[i];
        c.bandwidth_hz = bandwidths[i];
        c.phase = phases[i];
        if (!(c.offset > 0.0)) bad(s, "offsets", "offsets must be > 0");
        if (!(c.amplitude >= 0.0)) bad(s, "amplitudes", "amplitudes must be >= 0");
        if (!(c.bandwidth_hz > 0.0)) bad(s, "bandwidths", "bandwidths must be > 0");
        w.signal.channels.push_back(c);
    }
    w.signal.max_field_ratio = s.get_double("max_field_ratio", w.signal.max_field_ratio);
    w.noise_sigma = s.get_quantity("noise_sigma", Dimension::kCurrent, 0.0);
    if (!(w.noise_sigma >= 0.0)) bad(s, "noise_sigma", "must be >= 0");
    const long long seg = s.get_int("spectrogram_segment", 1024);
    const long long hop = s.get_int("spectrogram_hop", 256);
    if (seg < 2) bad(s, "spectrogram_segment", "must be >= 2");
    if (hop < 1) bad(s, "spectrogram_hop", "must be >= 1");
    w.spectrogram_segment = static_cast<std::size_t>(seg);
    w.spectrogram_hop = static_cast<std::size_t>(hop);
    const std::string window = s.get_string("window", "hann");
    if (window == "hann") {
        w.window = dsp::Window::kHann;
    } else if (window == "rectangular") {
        w.window = dsp::Window::kRectangular;
    } else if (window == "blackman_harris") {
        w.window = dsp::Window::kBlackmanHarris;
    } else {
        bad(s, "window", "unknown window '" + window + "' (expected hann, rectangular or blackman_harris)");
    }
    w.demod.attenuation_db = s.get_double("demod_attenuation_db", w.demod.attenuation_db);
    require_range(s, "demod_attenuation_db", w.demod.attenuation_db, 21.0, 200.0);
    s.require_all_consumed();
    try {
        w.signal.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError("[waveform] " + std::string(e.what()));
    }
}

void read_sumrate(const config::Document& doc, RunConfig& cfg) {
    const Section& s = doc.section("sumrate");
    auto& r = cfg.sumrate;
    if (s.has_quantity("rabi", Dimension::kFrequency)) {
        if (s.has("rabi_set")) bad(s, "rabi_set", "give rabi_set or rabi_*, not both");
        r.rabi_set_name = "custom";
        r.rabi_set = four(s, "rabi", Dimension::kFrequency);
    } else {
        r.rabi_set_name = s.get_string("rabi_set", "set2");
        r.rabi_set = rabi_preset(r.rabi_set_name);
    }
    if (s.has_quantity("powers", Dimension::kPower)) {
        r.powers = s.get_quantity_list("powers", Dimension::kPower);
    } else {
        r.powers.clear();
        for (int dbm = -30; dbm <= 10; dbm += 5) r.powers.push_back(units::dbm_to_watt(dbm));
    }
    r.sweep_bandwidth = s.get_quantity("sweep_bandwidth", Dimension::kBandwidth, 1e5);
    if (s.has_quantity("bandwidths", Dimension::kBandwidth)) {
        r.bandwidths = s.get_quantity_list("bandwidths", Dimension::kBandwidth);
    } else {
        r.bandwidths = {1e4, 2e4, 5e4, 1e5, 2e5, 5e5, 1e6};
    }
    r.sweep_power = s.get_quantity("sweep_power", Dimension::kPower, units::dbm_to_watt(-10.0));
    for (double p : r.powers) require_range(s, "powers", p, 0.0, 1e3);
    for (double b : r.bandwidths) require_range(s, "bandwidths", b, 0.0, 1e9);
    require_range(s, "sweep_power", r.sweep_power, 0.0, 1e3);
    require_range(s, "sweep_bandwidth", r.sweep_bandwidth, 0.0, 1e9);
    r.temperature = s.get_quantity("temperature", Dimension::kTemperature, 300.0);
    if (!(r.temperature > 0.0)) bad(s, "temperature", "must be > 0");
    const std::string baseline = s.get_string("baseline_lo", "optimize");
    if (baseline != "optimize" && baseline != "rabi_set") bad(s, "baseline_lo", "expected optimize or rabi_set");
    r.optimize_baselines = baseline == "optimize";
    r.beta = s.get_double("beta", 1.0);
    if (!(r.beta > 0.0)) bad(s, "beta", "must be > 0");
    const long long mc = s.get_int("monte_carlo_samples", 0);
    if (mc < 0 || mc > 100000000) bad(s, "monte_carlo_samples", "must be in [0, 1e8]");
    r.monte_carlo_samples = static_cast<std::size_t>(mc);
    if (s.has("architectures")) {
        r.architectures.clear();
        std::stringstream in(s.get_string("architectures"));
        std::string item;
        while (std::getline(in, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) bad(s, "architectures", "empty list item");
            r.architectures.push_back(parse_architecture(item.substr(b, e - b + 1)));
        }
    }
    s.require_all_consumed();
}

}  // namespace

NumericalModel RunConfig::numerical_model() const {
    NumericalModel m;
    m.scheme = scheme;
    m.route = route;
    m.evolve = evolve;
    m.evolve.record_interval = 0.0;
    return m;
}

RunConfig load_run_config(const config::Document& doc, const fs::path& base_dir) {
    RunConfig cfg;
    cfg.source = doc.source();
    try {
        read_run(doc, base_dir, cfg);
        read_decay(doc, cfg);
        if (cfg.full_scheme.architecture != Architecture::kHybrid && cfg.architecture == Architecture::kHybrid &&
            !doc.section("run").has("architecture")) {
            cfg.architecture = cfg.full_scheme.architecture;
        }
        cfg.scheme = restrict_to(cfg.full_scheme, cfg.architecture);
        read_drive(doc, cfg);
        read_simulation(doc, cfg);
        read_fidelity_map(doc, cfg);
        read_optimize(doc, cfg);
        read_cell(doc, cfg);
        read_waveform(doc, cfg);
        read_sumrate(doc, cfg);
    } catch (const PreconditionError& e) {
        throw ConfigError(doc.source() + ": " + e.what());
    }
    for (const auto& name : doc.unrequested_sections()) {
        throw ConfigError(doc.source() + ": unknown section [" + name + "]");
    }
    return cfg;
}

RunConfig load_run_config_file(const std::string& path) {
    if (path.empty()) {
        std::istringstream empty;
        return load_run_config(config::Document::parse(empty, "<defaults>"), fs::current_path());
    }
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
    const auto doc = config::Document::load(path);
    return load_run_config(doc, fs::absolute(path).parent_path());
}

namespace {

json mhz4(const std::array<double, 4>& v) {
    json a = json::array();
    for (double x : v) a.push_back(units::to_mhz(x));
    return a;
}

}  // namespace

std::string describe(const RunConfig& c) {
    json j;
    j["source"] = c.source;
    j["run"] = {{"scheme", c.scheme_source},
                {"architecture", std::string(to_string(c.architecture))},
                {"seed", c.seed},
                {"workers", c.workers}};
    json decays = json::array();
    for (const auto& d : c.scheme.decay_channels) {
        decays.push_back({{"from", d.from}, {"to", d.to}, {"rate_khz", units::to_mhz(d.rate) * 1e3}});
    }
    j["decay"] = decays;
    j["drive"] = {{"omega_p_mhz", units::to_mhz(c.drive.omega_p)},
                  {"omega_c_mhz", units::to_mhz(c.drive.omega_c)},
                  {"rf_rabi_mhz", mhz4(c.drive.rf_rabi)},
                  {"delta_p_mhz", units::to_mhz(c.drive.delta_p)},
                  {"delta_c_mhz", units::to_mhz(c.drive.delta_c)},
                  {"rf_detunings_mhz", mhz4(c.drive.rf_detunings)},
                  {"rf_phases_rad", c.drive.rf_phases},
                  {"closed_loop_detuning_mhz", units::to_mhz(c.drive.closed_loop_detuning())},
                  {"use_scheme_detunings", c.use_scheme_detunings}};
    j["simulation"] = {{"route", std::string(to_string(c.route))},
                       {"t_end_us", c.evolve.t_end},
                       {"dt_us", c.evolve.dt},
                       {"record_interval_us", c.evolve.record_interval},
                       {"all_coherences", c.all_coherences}};
    json panels = json::array();
    for (const auto& [a, b] : c.fidelity_map.panels) panels.push_back({units::to_mhz(a), units::to_mhz(b)});
    j["fidelity_map"] = {{"axis_x", c.fidelity_map.axis_x},
                         {"axis_y", c.fidelity_map.axis_y},
                         {"min_mhz", units::to_mhz(c.fidelity_map.min)},
                         {"max_mhz", units::to_mhz(c.fidelity_map.max)},
                         {"resolution", c.fidelity_map.resolution},
                         {"panels_mhz", panels}};
    const auto& o = c.optimize;
    j["optimize"] = {{"min_mhz", units::to_mhz(o.min)},
                     {"max_mhz", units::to_mhz(o.max)},
                     {"step_mhz", units::to_mhz(o.step)},
                     {"sum_max_mhz", units::to_mhz(o.sum_max)},
                     {"half_width_khz", units::to_mhz(o.half_width) * 1e3},
                     {"samples_per_axis", o.samples_per_axis},
                     {"plateau_tolerance", o.plateau_tolerance}};
    if (o.reference) j["optimize"]["reference_mhz"] = mhz4(*o.reference);
    j["cell"] = {{"cell_length_m", c.cell.cell_length},
                 {"atomic_density_per_m3", c.cell.atomic_density},
                 {"probe_dipole_cm", c.cell.probe_dipole},
                 {"probe_wavelength_m", c.cell.probe_wavelength},
                 {"probe_power_w", c.cell.probe_power},
                 {"responsivity_a_per_w", c.cell.responsivity},
                 {"xi0", c.cell.xi0_override || c.cell.omega_p > 0.0 ? json(c.cell.xi0()) : json(nullptr)}};
    j["probe"] = {{"model", std::string(to_string(c.probe))}};
    json tones = json::array();
    for (const auto& t : c.waveform.signal.channels) {
        tones.push_back({{"channel", t.channel},
                         {"offset_khz", units::to_mhz(t.offset) * 1e3},
                         {"amplitude_v_per_m", t.amplitude},
                         {"bandwidth_hz", t.bandwidth_hz},
                         {"phase_rad", t.phase}});
    }
    j["waveform"] = {{"duration_us", c.waveform.duration_us},
                     {"sample_rate_mhz", c.waveform.sample_rate_mhz},
                     {"tones", tones},
                     {"max_field_ratio", c.waveform.signal.max_field_ratio},
                     {"noise_sigma_a", c.waveform.noise_sigma},
                     {"spectrogram_segment", c.waveform.spectrogram_segment},
                     {"spectrogram_hop", c.waveform.spectrogram_hop},
                     {"demod_attenuation_db", c.waveform.demod.attenuation_db}};
    const auto& r = c.sumrate;
    json archs = json::array();
    for (auto a : r.architectures) archs.push_back(std::string(to_string(a)));
    j["sumrate"] = {{"rabi_set", r.rabi_set_name},
                    {"rabi_mhz", mhz4(r.rabi_set)},
                    {"powers_w", r.powers},
                    {"sweep_bandwidth_hz", r.sweep_bandwidth},
                    {"bandwidths_hz", r.bandwidths},
                    {"sweep_power_w", r.sweep_power},
                    {"temperature_k", r.temperature},
                    {"beta", r.beta},
                    {"baseline_lo", r.optimize_baselines ? "optimize" : "rabi_set"},
                    {"monte_carlo_samples", r.monte_carlo_samples},
                    {"architectures", archs}};
    return j.dump(2);
}

}  // namespace rydberg::cli
