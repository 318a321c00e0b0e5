// SPDX-License-Identifier: Apache-2.0
#include "rydberg/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rydberg/constants.hpp"
#include "rydberg/dsp.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/parallel.hpp"

namespace rydberg {

double VaporCellParams::xi0() const {
    if (xi0_override) return *xi0_override;
    const double omega_p_si = units::to_rad_per_s(omega_p);
    return units::kTwoPi * cell_length * atomic_density * probe_dipole * probe_dipole /
           (constants::kVacuumPermittivity * constants::kHbar * probe_wavelength * omega_p_si);
}

double VaporCellParams::probe_angular_frequency() const {
    return units::kTwoPi * constants::kSpeedOfLight / probe_wavelength;
}

void VaporCellParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("vapor cell: ") + name + " must be > 0");
    };
    positive(probe_power, "probe power");
    positive(responsivity, "responsivity");
    positive(probe_wavelength, "probe wavelength");
    if (xi0_override) {
        if (!std::isfinite(*xi0_override) || *xi0_override < 0.0) {
            throw ConfigError("vapor cell: xi0 override must be finite and >= 0");
        }
        return;
    }
    positive(cell_length, "cell length");
    positive(atomic_density, "atomic density");
    positive(probe_dipole, "probe dipole");
    positive(omega_p, "probe Rabi frequency");
}

VaporCellParams VaporCellParams::cesium_default(double omega_p, double probe_field) {
    VaporCellParams cell;
    cell.omega_p = omega_p;
    cell.probe_dipole = constants::kHbar * units::to_rad_per_s(omega_p) / probe_field;
    return cell;
}

std::string_view to_string(ProbeKind kind) { return kind == ProbeKind::kAnalytic ? "analytic" : "numerical"; }

ProbeKind parse_probe_kind(std::string_view text) {
    if (text == "analytic") return ProbeKind::kAnalytic;
    if (text == "numerical") return ProbeKind::kNumerical;
    throw ConfigError("unknown probe model '" + std::string(text) + "' (expected analytic or numerical)");
}

Complex probe_coherence(const DriveConfig& drive, const ProbeModel& model) {
    if (model.kind == ProbeKind::kAnalytic) {
        return analytic_rho21(AnalyticContext::from_drive(drive, model.numerical.scheme.decay_rate(2, 1)));
    }
    return numerical_state(drive, model.numerical)(1, 0);
}

double photodetector_output(const DriveConfig& drive, const VaporCellParams& cell, const ProbeModel& model) {
    const double im = probe_coherence(drive, model).imag();
    return cell.responsivity * 0.5 * cell.probe_power * std::exp(2.0 * cell.xi0() * im);
}

double GainVector::relative_step_change(int channel) const {
    const double g = gain[channel - 1];
    const double h = half_step_gain[channel - 1];
    if (h == 0.0) return g == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(g - h) / std::abs(h);
}

namespace {

double dipole_si(const LevelScheme& scheme, int channel) {
    const RfTransition* t = scheme.find_channel(channel);
    return t ? units::dipole_si(t->dipole_moment) : 0.0;
}

double central_slope(const DriveConfig& lo, const VaporCellParams& cell, const ProbeModel& model, int channel,
                     double h) {
    DriveConfig up = lo, down = lo;
    up.rf_rabi[channel - 1] += h;
    down.rf_rabi[channel - 1] -= h;
    const double y_up = photodetector_output(up, cell, model), y_down = photodetector_output(down, cell, model);
    const double dy = y_up - y_down;
    // a difference at the rounding level of y is no slope at all (e.g. y even in Omega_n at Omega_n = 0)
    if (std::abs(dy) <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(y_up), std::abs(y_down))) {
        return 0.0;
    }
    return dy / (2.0 * units::to_rad_per_s(h));
}

}  // namespace

GainVector gain_coefficients(const DriveConfig& lo, const VaporCellParams& cell, const LevelScheme& scheme,
                             const ProbeModel& model, double step) {
    constexpr double kAgreement = 1e-4;
    const double h = step > 0.0 ? step : units::from_khz(1.0);
    GainVector g;
    for (int n = 1; n <= 4; ++n) {
        const double mu = dipole_si(scheme, n);
        if (mu == 0.0) continue;
        const double slope = central_slope(lo, cell, model, n, h);
        const double slope_half = central_slope(lo, cell, model, n, 0.5 * h);
        if (!std::isfinite(slope) || !std::isfinite(slope_half)) {
            throw NumericalError("gain_coefficients: non-finite derivative on channel " + std::to_string(n) +
                                 "; the operating point is outside the smooth region");
        }
        g.slope[n - 1] = slope;
        g.gain[n - 1] = mu / constants::kHbar * slope;
        g.half_step_gain[n - 1] = mu / constants::kHbar * slope_half;
        if (g.relative_step_change(n) > kAgreement) {
            g.warnings.push_back("channel " + std::to_string(n) + ": gain changes by " +
                                 std::to_string(g.relative_step_change(n)) + " (relative) when the step is halved");
        }
    }
    return g;
}

std::complex<double> RfChannelSignal::envelope_at(double t_us) const {
    if (envelope.empty()) return 1.0;
    if (!(symbol_rate_hz > 0.0)) throw PreconditionError("RF signal: envelope needs a positive symbol rate");
    const auto index = static_cast<long long>(std::floor(t_us * 1e-6 * symbol_rate_hz));
    const auto size = static_cast<long long>(envelope.size());
    return envelope[static_cast<std::size_t>(((index % size) + size) % size)];
}

void RfSignalSpec::validate() const {
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const auto& a = channels[i];
        if (a.channel < 1 || a.channel > 4) throw PreconditionError("RF signal: channel must be 1..4");
        if (!(a.amplitude >= 0.0) || !(a.bandwidth_hz > 0.0)) {
            throw PreconditionError("RF signal: amplitude must be >= 0 and bandwidth > 0");
        }
        for (std::size_t j = i + 1; j < channels.size(); ++j) {
            const auto& b = channels[j];
            if (a.channel == b.channel) throw PreconditionError("RF signal: channel listed twice");
            const double separation = std::abs(units::to_mhz(a.offset) - units::to_mhz(b.offset)) * 1e6;
            if (!(separation > a.bandwidth_hz + b.bandwidth_hz)) {
                throw PreconditionError("RF signal: bands of channels " + std::to_string(a.channel) + " and " +
                                        std::to_string(b.channel) + " overlap");
            }
        }
    }
}

double lo_field(int channel, const DriveConfig& lo, const LevelScheme& scheme) {
    const double mu = dipole_si(scheme, channel);
    if (mu == 0.0) return 0.0;
    return constants::kHbar * units::to_rad_per_s(lo.rf_rabi[channel - 1]) / mu;
}

namespace {

const RfChannelSignal* find_signal(const RfSignalSpec& spec, int channel) {
    for (const auto& s : spec.channels) {
        if (s.channel == channel) return &s;
    }
    return nullptr;
}

// Re{s(t) exp(i(delta omega t + delta phi))}
double carrier(const RfChannelSignal& s, double t_us) {
    return std::real(s.envelope_at(t_us) * std::polar(1.0, s.offset * t_us + s.phase));
}

}  // namespace

double heterodyne_rabi(int channel, double t_us, const RfSignalSpec& spec, const DriveConfig& lo,
                       const LevelScheme& scheme) {
    const double base = lo.rf_rabi[channel - 1];
    const RfChannelSignal* s = find_signal(spec, channel);
    if (!s) return base;
    const double mu = dipole_si(scheme, channel);
    return base + units::from_rad_per_s(mu / constants::kHbar * s->amplitude) * carrier(*s, t_us);
}

std::vector<std::string> heterodyne_warnings(const RfSignalSpec& spec, const DriveConfig& lo,
                                             const LevelScheme& scheme) {
    std::vector<std::string> out;
    for (const auto& s : spec.channels) {
        const double a_lo = lo_field(s.channel, lo, scheme);
        if (s.amplitude == 0.0) continue;
        if (a_lo == 0.0 || s.amplitude / a_lo > spec.max_field_ratio) {
            out.push_back("channel " + std::to_string(s.channel) + ": A_RF / A_LO = " +
                          (a_lo == 0.0 ? std::string("inf") : std::to_string(s.amplitude / a_lo)) +
                          " exceeds " + std::to_string(spec.max_field_ratio) +
                          "; the heterodyne approximation may not hold");
        }
    }
    return out;
}

Waveform synthesize_pd_waveform(const RfSignalSpec& spec, const DriveConfig& lo, const VaporCellParams& cell,
                                const LevelScheme& scheme, const ProbeModel& model, const WaveformRequest& request) {
    GainVector gains;
    if (request.mode == WaveformMode::kLinearized) gains = gain_coefficients(lo, cell, scheme, model);
    return synthesize_pd_waveform(spec, lo, cell, scheme, model, request, gains);
}

Waveform synthesize_pd_waveform(const RfSignalSpec& spec, const DriveConfig& lo, const VaporCellParams& cell,
                                const LevelScheme& scheme, const ProbeModel& model, const WaveformRequest& request,
                                const GainVector& gains) {
    spec.validate();
    if (!(request.duration_us > 0.0) || !(request.sample_rate_mhz > 0.0)) {
        throw PreconditionError("waveform: duration and sample rate must be > 0");
    }
    const double fs = request.sample_rate_mhz * 1e6;
    double highest = 0.0;
    for (const auto& s : spec.channels) {
        highest = std::max(highest, std::abs(units::to_mhz(s.offset)) * 1e6 + 0.5 * s.bandwidth_hz);
    }
    if (!(fs > 4.0 * highest)) {
        throw PreconditionError("waveform: sample rate " + std::to_string(fs) + " Hz must exceed 4 x " +
                                std::to_string(highest) + " Hz (highest band edge)");
    }

    Waveform w;
    w.sample_rate_hz = fs;
    const auto count = static_cast<std::size_t>(std::floor(request.duration_us * request.sample_rate_mhz + 1e-9));
    w.time_us.resize(count);
    w.current.resize(count);
    for (std::size_t i = 0; i < count; ++i) w.time_us[i] = static_cast<double>(i) / request.sample_rate_mhz;

    if (request.mode == WaveformMode::kExact) {
        parallel_for(count, request.workers, [&](std::size_t i) {
            DriveConfig d = lo;
            for (int n = 1; n <= 4; ++n) d.rf_rabi[n - 1] = heterodyne_rabi(n, w.time_us[i], spec, lo, scheme);
            w.current[i] = photodetector_output(d, cell, model);
        });
    } else {
        const double y_lo = photodetector_output(lo, cell, model);
        for (std::size_t i = 0; i < count; ++i) {
            double y = y_lo;
            for (const auto& s : spec.channels) y += gains.gain[s.channel - 1] * s.amplitude * carrier(s, w.time_us[i]);
            w.current[i] = y;
        }
    }

    if (request.noise.sigma > 0.0) {
        std::mt19937_64 rng(request.noise.seed);
        std::normal_distribution<double> normal(0.0, request.noise.sigma);
        for (double& y : w.current) y += normal(rng);
    }
    return w;
}

std::vector<double> dc_removed_normalized(const std::vector<double>& x) {
    const double m = dsp::mean(x);
    std::vector<double> out(x.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] - m;
        peak = std::max(peak, std::abs(out[i]));
    }
    if (peak > 0.0) {
        for (double& v : out) v /= peak;
    }
    return out;
}

double normalized_discrepancy(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw PreconditionError("normalized_discrepancy: length mismatch");
    const auto na = dc_removed_normalized(a);
    const auto nb = dc_removed_normalized(b);
    std::vector<double> diff(na.size());
    for (std::size_t i = 0; i < na.size(); ++i) diff[i] = na[i] - nb[i];
    const double ref = dsp::rms(nb);
    if (ref == 0.0) return dsp::rms(diff) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return dsp::rms(diff) / ref;
}

double dc_removed_rms_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw PreconditionError("dc_removed_rms_difference: length mismatch");
    const double ma = dsp::mean(a), mb = dsp::mean(b);
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = (a[i] - ma) - (b[i] - mb);
    return dsp::rms(diff);
}

std::complex<double> Baseband::mean() const {
    std::complex<double> s = 0.0;
    for (const auto& v : samples) s += v;
    return samples.empty() ? s : s / static_cast<double>(samples.size());
}

double Baseband::mean_magnitude() const {
    double s = 0.0;
    for (const auto& v : samples) s += std::abs(v);
    return samples.empty() ? 0.0 : s / static_cast<double>(samples.size());
}

std::vector<Baseband> iq_demodulate(const Waveform& waveform, const std::vector<DemodChannel>& channels,
                                    const DemodOptions& options, unsigned workers) {
    const double fs = waveform.sample_rate_hz;
    if (!(fs > 0.0) || waveform.current.size() != waveform.time_us.size()) {
        throw PreconditionError("iq_demodulate: malformed waveform");
    }
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (!(channels[i].bandwidth_hz > 0.0) || !(channels[i].offset_hz > 0.0)) {
            throw PreconditionError("iq_demodulate: offsets and bandwidths must be > 0");
        }
        for (std::size_t j = i + 1; j < channels.size(); ++j) {
            const double separation = std::abs(channels[i].offset_hz - channels[j].offset_hz);
            if (!(separation > channels[i].bandwidth_hz + channels[j].bandwidth_hz)) {
                throw PreconditionError("iq_demodulate: bands of channels " + std::to_string(channels[i].channel) +
                                        " and " + std::to_string(channels[j].channel) + " overlap");
            }
        }
    }

    const double dc = dsp::mean(waveform.current);
    std::vector<double> x(waveform.current.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = waveform.current[i] - dc;

    std::vector<Baseband> out(channels.size());
    parallel_for(channels.size(), workers, [&](std::size_t c) {
        const auto& ch = channels[c];
        const double b = ch.bandwidth_hz;
        const auto band_proto =
            dsp::kaiser_lowpass(options.bandpass_half_width * b, options.transition * b, fs, options.attenuation_db);
        const auto bandpass = dsp::lowpass_to_bandpass(band_proto, ch.offset_hz, fs);
        const auto lowpass =
            dsp::kaiser_lowpass(options.lowpass_cutoff * b, options.transition * b, fs, options.attenuation_db);

        const std::size_t skip = bandpass.size() / 2 + lowpass.size() / 2;
        if (x.size() <= 2 * skip) {
            throw PreconditionError("iq_demodulate: record of " + std::to_string(x.size()) +
                                    " samples is too short for filters needing " + std::to_string(2 * skip));
        }

        const auto isolated = dsp::filter_centered(x, bandpass);
        std::vector<std::complex<double>> mixed(isolated.size());
        for (std::size_t i = 0; i < mixed.size(); ++i) {
            const double phase = units::kTwoPi * ch.offset_hz * waveform.time_us[i] * 1e-6;
            mixed[i] = 2.0 * isolated[i] * std::complex<double>(std::cos(phase), -std::sin(phase));
        }
        const auto baseband = dsp::filter_centered(mixed, lowpass);

        const auto decimation = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fs / (2.0 * b))));
        Baseband& bb = out[c];
        bb.channel = ch.channel;
        bb.sample_rate_hz = fs / static_cast<double>(decimation);
        for (std::size_t i = skip; i + skip < baseband.size(); i += decimation) {
            bb.time_us.push_back(waveform.time_us[i]);
            bb.samples.push_back(baseband[i]);
        }
    });
    return out;
}

}  // namespace rydberg
