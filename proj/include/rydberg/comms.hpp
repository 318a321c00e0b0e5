// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rydberg/constants.hpp"
#include "rydberg/receiver.hpp"

namespace rydberg {

/// Black-body field spectral density 4 hbar w^3 / (eps0 c^3) * coth(hbar w / 2 kB T),
/// omega in rad/s, T in K. Throws DomainError unless both are > 0.
double blackbody_psd(double omega, double temperature);

struct EnvironmentParams {
    double temperature = 300.0;      // K
    double probe_frequency = 0.0;    // rad/s
    double y_lo = 0.0;               // photodetector output at the LO point, A
};

/// One RF channel of the baseband model. SI units.
struct ChannelModel {
    int channel = 0;
    double gain = 0.0;          // A per (V/m)
    double tx_power = 0.0;      // W
    double beta = 1.0;          // mean |h|^2
    double bandwidth = 0.0;     // Hz
    double rf_frequency = 0.0;  // rad/s
    double sigma_i2 = 0.0;      // intrinsic (shot) noise variance
    double sigma_e2 = 0.0;      // extrinsic (black-body) noise variance

    double sigma2() const { return sigma_i2 + sigma_e2; }
    /// G^2 P beta / sigma^2
    double mean_snr() const;
};

struct NoiseVariances {
    double intrinsic = 0.0;  // y_LO B hbar omega_P
    double extrinsic = 0.0;  // G^2 B S_BB(omega_n, T)
};

NoiseVariances noise_variances(const ChannelModel& channel, const EnvironmentParams& env);

/// Fills sigma_i2 / sigma_e2 from the environment.
ChannelModel with_noise(ChannelModel channel, const EnvironmentParams& env);

/// G^2 P |h|^2 / sigma^2. Throws DomainError when sigma^2 = 0.
double snr(const ChannelModel& channel, double fading_power);

/// sum_n B_n log2(1 + SNR_n) for one fading realization per channel.
double sum_rate(const std::vector<ChannelModel>& channels, const std::vector<double>& fading_powers);

/// (B / ln 2) exp(1/G) E1(1/G) for mean SNR G > 0; throws DomainError otherwise.
double ergodic_rate(double bandwidth, double mean_snr);
double ergodic_sum_rate(const std::vector<ChannelModel>& channels);

/// Mean of sum_rate over Rayleigh fading, |h|^2 ~ Exp(mean beta_n). Samples
/// are split into a fixed number of partitions, each seeded from (seed,
/// partition index), so the result does not depend on `workers`.
double monte_carlo_sum_rate(const std::vector<ChannelModel>& channels, std::size_t samples, std::uint64_t seed,
                            unsigned workers = 1, std::size_t partitions = 64);

/// Named Rabi presets (rad/us): "set1" = 2pi {7,1,1,1} MHz, "set2" = 2pi {2,1,1,1} MHz.
std::array<double, 4> rabi_preset(std::string_view name);

/// The Rabi set with the channels `arch` does not drive set to zero.
std::array<double, 4> architecture_lo(const std::array<double, 4>& rabi_set, Architecture arch);

struct ArchitectureSetup {
    Architecture architecture = Architecture::kHybrid;
    std::vector<int> channels;
    DriveConfig lo;
    GainVector gains;
    double y_lo = 0.0;
};

struct ComparisonSpec {
    LevelScheme scheme = cesium_scheme();  // hybrid scheme; restricted per architecture
    DriveConfig base = DriveConfig::operating_point();  // Omega_P, Omega_C (RF values replaced)
    VaporCellParams cell;
    ProbeKind probe = ProbeKind::kNumerical;
    double temperature = 300.0;
    double beta = 1.0;
    /// LO Rabi point per architecture, indexed by Architecture (crs, prs, hybrid).
    std::array<std::array<double, 4>, 3> lo_points{};
    std::vector<Architecture> architectures{Architecture::kHybrid, Architecture::kCrs, Architecture::kPrs};
};

/// Grid for the per-architecture LO search (rad/us), same meaning as OptimizerSpec.
struct LoSearch {
    double min = 0.0;
    double max = units::from_mhz(10.0);
    double step = units::from_mhz(1.0);
    double sum_max = units::from_mhz(20.0);
    double half_width = units::from_khz(2.0);
    int samples_per_axis = 3;
};

/// Best average-fidelity LO point of `arch`: the optimizer restricted to the
/// architecture's channels and scheme, unused channels at 0.
std::array<double, 4> optimize_architecture_lo(Architecture arch, const ComparisonSpec& spec, const LoSearch& search,
                                               unsigned workers = 1);

ArchitectureSetup prepare_architecture(Architecture arch, const ComparisonSpec& spec);

/// Channel models of one architecture at equal per-channel power and bandwidth.
std::vector<ChannelModel> architecture_channels(const ArchitectureSetup& setup, const ComparisonSpec& spec,
                                                double tx_power, double bandwidth);

struct SweepPoint {
    std::string sweep;  // label, e.g. "power" or "bandwidth"
    double tx_power = 0.0;   // W per channel
    double bandwidth = 0.0;  // Hz
};

struct RateRow {
    std::string sweep;
    Architecture architecture = Architecture::kHybrid;
    double tx_power = 0.0;
    double bandwidth = 0.0;
    double rate = 0.0;           // closed form, bit/s
    double monte_carlo = -1.0;   // bit/s, negative when not computed
};

struct ComparisonResult {
    std::vector<ArchitectureSetup> setups;
    std::vector<RateRow> rows;
};

/// Ergodic sum rate of every architecture at every sweep point. Channels
/// with zero transmit power or zero gain contribute zero rate.
ComparisonResult compare_architectures(const ComparisonSpec& spec, const std::vector<SweepPoint>& sweep,
                                       std::size_t monte_carlo_samples = 0, std::uint64_t seed = 1,
                                       unsigned workers = 1);

/// CSV: sweep, architecture, p_dbm, p_w, bandwidth_hz, rate_bps, rate_mc_bps
void write_rates_csv(std::ostream& out, const ComparisonResult& result);

}  // namespace rydberg
