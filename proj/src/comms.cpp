// SPDX-License-Identifier: Apache-2.0
#include "rydberg/comms.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/parallel.hpp"

namespace rydberg {

double blackbody_psd(double omega, double temperature) {
    if (!(omega > 0.0) || !(temperature > 0.0) || !std::isfinite(omega) || !std::isfinite(temperature)) {
        throw DomainError("blackbody_psd: frequency and temperature must be finite and > 0");
    }
    using namespace constants;
    const double x = kHbar * omega / (kBoltzmann * temperature);
    const double zero_point = 4.0 * kHbar * omega * omega * omega / (kVacuumPermittivity * std::pow(kSpeedOfLight, 3));
    // (e^x + 1) / (e^x - 1) = coth(x / 2)
    return zero_point / std::tanh(0.5 * x);
}

double ChannelModel::mean_snr() const {
    if (!(sigma2() > 0.0)) throw DomainError("channel " + std::to_string(channel) + ": noise variance must be > 0");
    return gain * gain * tx_power * beta / sigma2();
}

NoiseVariances noise_variances(const ChannelModel& channel, const EnvironmentParams& env) {
    NoiseVariances v;
    if (channel.bandwidth == 0.0) return v;
    v.intrinsic = env.y_lo * channel.bandwidth * constants::kHbar * env.probe_frequency;
    v.extrinsic = channel.gain * channel.gain * channel.bandwidth * blackbody_psd(channel.rf_frequency, env.temperature);
    return v;
}

ChannelModel with_noise(ChannelModel channel, const EnvironmentParams& env) {
    const auto v = noise_variances(channel, env);
    channel.sigma_i2 = v.intrinsic;
    channel.sigma_e2 = v.extrinsic;
    return channel;
}

double snr(const ChannelModel& channel, double fading_power) {
    if (!(channel.sigma2() > 0.0)) throw DomainError("snr: noise variance must be > 0");
    if (!(fading_power >= 0.0)) throw DomainError("snr: fading power must be >= 0");
    return channel.gain * channel.gain * channel.tx_power * fading_power / channel.sigma2();
}

double sum_rate(const std::vector<ChannelModel>& channels, const std::vector<double>& fading_powers) {
    if (channels.size() != fading_powers.size()) throw PreconditionError("sum_rate: one fading sample per channel");
    double total = 0.0;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        total += channels[i].bandwidth * std::log2(1.0 + snr(channels[i], fading_powers[i]));
    }
    return total;
}

double ergodic_rate(double bandwidth, double mean_snr) {
    if (!(mean_snr > 0.0)) throw DomainError("ergodic_rate: mean SNR must be > 0");
    return bandwidth / std::numbers::ln2 * numerics::exp_scaled_e1(1.0 / mean_snr);
}

double ergodic_sum_rate(const std::vector<ChannelModel>& channels) {
    double total = 0.0;
    for (const auto& c : channels) total += ergodic_rate(c.bandwidth, c.mean_snr());
    return total;
}

double monte_carlo_sum_rate(const std::vector<ChannelModel>& channels, std::size_t samples, std::uint64_t seed,
                            unsigned workers, std::size_t partitions) {
    if (samples == 0 || partitions == 0) throw PreconditionError("monte_carlo_sum_rate: need samples and partitions");
    for (const auto& c : channels) {
        if (!(c.beta > 0.0)) throw DomainError("monte_carlo_sum_rate: beta must be > 0");
        if (!(c.sigma2() > 0.0)) throw DomainError("monte_carlo_sum_rate: noise variance must be > 0");
    }
    partitions = std::min(partitions, samples);
    std::vector<double> partial(partitions, 0.0);
    parallel_for(partitions, workers, [&](std::size_t p) {
        const std::size_t count = samples / partitions + (p < samples % partitions ? 1 : 0);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(p)};
        std::mt19937_64 rng(seq);
        std::vector<std::exponential_distribution<double>> fading;
        std::vector<double> scale;
        for (const auto& c : channels) {
            fading.emplace_back(1.0 / c.beta);
            scale.push_back(c.gain * c.gain * c.tx_power / c.sigma2());
        }
        double acc = 0.0;
        for (std::size_t s = 0; s < count; ++s) {
            for (std::size_t n = 0; n < channels.size(); ++n) {
                acc += channels[n].bandwidth * std::log2(1.0 + scale[n] * fading[n](rng));
            }
        }
        partial[p] = acc;
    });
    double total = 0.0;
    for (double v : partial) total += v;
    return total / static_cast<double>(samples);
}

std::array<double, 4> rabi_preset(std::string_view name) {
    auto mhz = [](double a, double b, double c, double d) {
        return std::array<double, 4>{units::from_mhz(a), units::from_mhz(b), units::from_mhz(c), units::from_mhz(d)};
    };
    if (name == "set1") return mhz(7, 1, 1, 1);
    if (name == "set2") return mhz(2, 1, 1, 1);
    if (name == "operating_point") return mhz(2, 7, 1, 6);
    throw ConfigError("unknown Rabi preset '" + std::string(name) + "' (expected set1, set2 or operating_point)");
}

std::array<double, 4> architecture_lo(const std::array<double, 4>& rabi_set, Architecture arch) {
    std::array<double, 4> out{};
    for (int n : active_channels(arch)) out[n - 1] = rabi_set[n - 1];
    return out;
}

std::array<double, 4> optimize_architecture_lo(Architecture arch, const ComparisonSpec& spec, const LoSearch& search,
                                               unsigned workers) {
    const auto opt = OptimizerSpec::restricted(spec.base, active_channels(arch), search.min, search.max, search.step,
                                               search.sum_max, search.half_width, search.samples_per_axis);
    NumericalModel model;
    model.scheme = restrict_to(spec.scheme, arch);
    model.route = NumericalRoute::kNullSpace;
    return optimize_operating_point(opt, model, workers).best.point;
}

ArchitectureSetup prepare_architecture(Architecture arch, const ComparisonSpec& spec) {
    ArchitectureSetup setup;
    setup.architecture = arch;
    setup.channels = active_channels(arch);
    setup.lo = spec.base;
    setup.lo.rf_rabi = architecture_lo(spec.lo_points[static_cast<int>(arch)], arch);

    ProbeModel probe;
    probe.kind = spec.probe;
    probe.numerical.scheme = restrict_to(spec.scheme, arch);
    probe.numerical.route = NumericalRoute::kNullSpace;
    setup.y_lo = photodetector_output(setup.lo, spec.cell, probe);
    setup.gains = gain_coefficients(setup.lo, spec.cell, probe.numerical.scheme, probe);
    return setup;
}

std::vector<ChannelModel> architecture_channels(const ArchitectureSetup& setup, const ComparisonSpec& spec,
                                                double tx_power, double bandwidth) {
    EnvironmentParams env{spec.temperature, spec.cell.probe_angular_frequency(), setup.y_lo};
    std::vector<ChannelModel> out;
    for (int n : setup.channels) {
        const RfTransition* t = spec.scheme.find_channel(n);
        if (!t) throw PreconditionError("scheme has no RF channel " + std::to_string(n));
        ChannelModel c;
        c.channel = n;
        c.gain = setup.gains.gain[n - 1];
        c.tx_power = tx_power;
        c.beta = spec.beta;
        c.bandwidth = bandwidth;
        c.rf_frequency = units::to_rad_per_s(t->carrier_frequency);
        out.push_back(with_noise(c, env));
    }
    return out;
}

namespace {

double closed_form_rate(const std::vector<ChannelModel>& channels) {
    double total = 0.0;
    for (const auto& c : channels) {
        if (c.tx_power == 0.0 || c.gain == 0.0 || c.bandwidth == 0.0) continue;
        total += ergodic_rate(c.bandwidth, c.mean_snr());
    }
    return total;
}

}  // namespace

ComparisonResult compare_architectures(const ComparisonSpec& spec, const std::vector<SweepPoint>& sweep,
                                       std::size_t monte_carlo_samples, std::uint64_t seed, unsigned workers) {
    ComparisonResult result;
    for (Architecture arch : spec.architectures) result.setups.push_back(prepare_architecture(arch, spec));

    std::uint64_t row_index = 0;
    for (const auto& point : sweep) {
        if (!(point.tx_power >= 0.0) || !(point.bandwidth >= 0.0)) {
            throw PreconditionError("compare_architectures: power and bandwidth must be >= 0");
        }
        for (const auto& setup : result.setups) {
            const auto channels = architecture_channels(setup, spec, point.tx_power, point.bandwidth);
            RateRow row{point.sweep, setup.architecture, point.tx_power, point.bandwidth, closed_form_rate(channels),
                        -1.0};
            if (monte_carlo_samples > 0) {
                std::vector<ChannelModel> usable;
                for (const auto& c : channels) {
                    if (c.tx_power > 0.0 && c.gain != 0.0 && c.bandwidth > 0.0) usable.push_back(c);
                }
                row.monte_carlo =
                    usable.empty() ? 0.0 : monte_carlo_sum_rate(usable, monte_carlo_samples, seed + row_index, workers);
            }
            ++row_index;
            result.rows.push_back(row);
        }
    }
    return result;
}

void write_rates_csv(std::ostream& out, const ComparisonResult& result) {
    out << "sweep,architecture,p_dbm,p_w,bandwidth_hz,rate_bps,rate_mc_bps\n";
    char buf[256];
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.6g,%.10g,%.10g,%.10g,", r.sweep.c_str(),
                      std::string(to_string(r.architecture)).c_str(),
                      r.tx_power > 0.0 ? 10.0 * std::log10(r.tx_power / 1e-3) : -INFINITY, r.tx_power, r.bandwidth,
                      r.rate);
        out << buf;
        if (r.monte_carlo >= 0.0) {
            std::snprintf(buf, sizeof buf, "%.10g", r.monte_carlo);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace rydberg
