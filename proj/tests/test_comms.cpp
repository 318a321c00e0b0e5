// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rydberg/comms.hpp"
#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/fidelity.hpp"

using namespace rydberg;
using Catch::Approx;

namespace {

ChannelModel unit_channel(double mean_snr, double bandwidth = 1.0) {
    ChannelModel c;
    c.channel = 1;
    c.gain = 1.0;
    c.tx_power = mean_snr;
    c.beta = 1.0;
    c.bandwidth = bandwidth;
    c.sigma_i2 = 1.0;
    return c;
}

double zero_point_psd(double omega) {
    using namespace constants;
    return 4.0 * kHbar * std::pow(omega, 3) / (kVacuumPermittivity * std::pow(kSpeedOfLight, 3));
}

ComparisonSpec set2_spec() {
    ComparisonSpec spec;
    spec.cell = VaporCellParams::cesium_default(spec.base.omega_p);
    for (auto& p : spec.lo_points) p = rabi_preset("set2");
    return spec;
}

}  // namespace

TEST_CASE("black-body spectral density limits") {
    using namespace constants;
    const double omega = units::kTwoPi * 10e9;
    const double t_cold = kHbar * omega / (50.0 * kBoltzmann);
    CHECK(blackbody_psd(omega, t_cold) == Approx(zero_point_psd(omega)).epsilon(1e-10));

    const double t_hot = kHbar * omega / (1e-3 * kBoltzmann);
    const double rayleigh_jeans =
        8.0 * omega * omega * kBoltzmann * t_hot / (kVacuumPermittivity * std::pow(kSpeedOfLight, 3));
    CHECK(blackbody_psd(omega, t_hot) == Approx(rayleigh_jeans).epsilon(1e-4));

    double previous = 0.0;
    for (double t = 1.0; t <= 1000.0; t *= 1.5) {
        const double s = blackbody_psd(omega, t);
        CHECK(s >= previous);
        previous = s;
    }
    CHECK_THROWS_AS(blackbody_psd(omega, 0.0), DomainError);
    CHECK_THROWS_AS(blackbody_psd(-1.0, 300.0), DomainError);
}

TEST_CASE("noise variances") {
    EnvironmentParams env{300.0, units::kTwoPi * constants::kSpeedOfLight / 852.35e-9, 4e-4};
    ChannelModel c;
    c.gain = 0.02;
    c.rf_frequency = units::kTwoPi * 5e9;
    c.bandwidth = 0.0;
    auto v0 = noise_variances(c, env);
    CHECK(v0.intrinsic == 0.0);
    CHECK(v0.extrinsic == 0.0);

    c.bandwidth = 1e5;
    const auto v1 = noise_variances(c, env);
    c.bandwidth = 3e5;
    const auto v3 = noise_variances(c, env);
    CHECK(v3.intrinsic == Approx(3.0 * v1.intrinsic));
    CHECK(v3.extrinsic == Approx(3.0 * v1.extrinsic));
    CHECK(v1.intrinsic == Approx(env.y_lo * 1e5 * constants::kHbar * env.probe_frequency));

    ChannelModel d = c;
    d.rf_frequency = units::kTwoPi * 12e9;
    CHECK(noise_variances(d, env).extrinsic / noise_variances(c, env).extrinsic ==
          Approx(blackbody_psd(d.rf_frequency, 300.0) / blackbody_psd(c.rf_frequency, 300.0)));

    const auto filled = with_noise(c, env);
    CHECK(filled.sigma2() == Approx(v3.intrinsic + v3.extrinsic));
}

TEST_CASE("instantaneous SNR and sum rate") {
    const auto c = unit_channel(1.0);
    CHECK(snr(c, 1.0) == 1.0);
    CHECK(snr(c, 2.5) == 2.5);
    auto c2 = c;
    c2.tx_power = 3.0;
    CHECK(snr(c2, 2.0) == Approx(6.0));
    CHECK(sum_rate({c}, {1.0}) == Approx(1.0));
    CHECK(sum_rate({c, unit_channel(1.0, 2.0)}, {3.0, 1.0}) == Approx(2.0 + 2.0));
    auto silent = c;
    silent.sigma_i2 = 0.0;
    CHECK_THROWS_AS(snr(silent, 1.0), DomainError);
    CHECK_THROWS_AS(sum_rate({c}, {}), PreconditionError);
}

TEST_CASE("ergodic rate") {
    CHECK(ergodic_rate(1.0, 1.0) == Approx(0.86034).margin(5e-6));
    CHECK(ergodic_rate(1.0, 1.0) ==
          Approx(std::exp(1.0) * numerics::exp_integral_e1(1.0) / std::numbers::ln2).epsilon(1e-14));
    CHECK_THROWS_AS(ergodic_rate(1.0, 0.0), DomainError);

    for (double g : {1e-4, 1e-3, 1e-2}) {
        const double r = ergodic_rate(1.0, g);
        CHECK(r <= g / std::numbers::ln2);
        CHECK(r == Approx(g / std::numbers::ln2).epsilon(3.0 * g));
    }
    double previous = 0.0;
    for (double g = 1e-3; g < 1e4; g *= 2.0) {
        const double r = ergodic_rate(1.0, g);
        CHECK(r > previous);
        CHECK(r <= std::log2(1.0 + g));  // Jensen
        previous = r;
    }
    CHECK(ergodic_rate(2e5, 3.0) == Approx(2e5 * ergodic_rate(1.0, 3.0)));
}

TEST_CASE("Monte Carlo rate matches the closed form") {
    for (double g : {0.1, 1.0, 10.0, 100.0}) {
        const auto c = unit_channel(g, 1e5);
        const double mc = monte_carlo_sum_rate({c}, 400000, 3);
        CHECK(std::abs(mc - ergodic_rate(1e5, g)) / ergodic_rate(1e5, g) < 0.005);
    }
    const std::vector<ChannelModel> two{unit_channel(1.0, 1e5), unit_channel(4.0, 2e5)};
    const double w1 = monte_carlo_sum_rate(two, 50000, 9, 1);
    CHECK(monte_carlo_sum_rate(two, 50000, 9, 3) == w1);
    CHECK(monte_carlo_sum_rate(two, 50000, 9, 8) == w1);
    CHECK(monte_carlo_sum_rate(two, 50000, 10, 1) != w1);
    CHECK_THROWS_AS(monte_carlo_sum_rate(two, 0, 1), PreconditionError);
}

TEST_CASE("architecture presets") {
    CHECK(active_channels(Architecture::kHybrid).size() == 4);
    CHECK(active_channels(Architecture::kCrs).size() == 3);
    CHECK(active_channels(Architecture::kPrs).size() == 2);
    const auto set2 = rabi_preset("set2");
    CHECK(set2[0] == Approx(units::from_mhz(2.0)));
    const auto crs = architecture_lo(set2, Architecture::kCrs);
    CHECK(crs[3] == 0.0);
    CHECK_THROWS_AS(rabi_preset("set9"), ConfigError);
}

TEST_CASE("architecture comparison") {
    const auto spec = set2_spec();
    std::vector<SweepPoint> sweep;
    for (double dbm = -30.0; dbm <= 10.0; dbm += 10.0) sweep.push_back({"power", 1e-3 * std::pow(10.0, dbm / 10.0), 1e5});
    sweep.push_back({"power", 0.0, 1e5});
    const auto result = compare_architectures(spec, sweep, 2000, 4, 2);
    REQUIRE(result.setups.size() == 3);
    CHECK(result.setups[0].channels.size() == 4);
    CHECK(result.setups[1].channels.size() == 3);
    CHECK(result.setups[2].channels.size() == 2);
    REQUIRE(result.rows.size() == 3 * sweep.size());
    for (std::size_t i = 0; i + 3 <= result.rows.size(); i += 3) {
        const auto& hybrid = result.rows[i];
        const auto& crs = result.rows[i + 1];
        const auto& prs = result.rows[i + 2];
        if (hybrid.tx_power == 0.0) {
            CHECK(hybrid.rate == 0.0);
            CHECK(crs.rate == 0.0);
            CHECK(prs.monte_carlo == 0.0);
            continue;
        }
        CHECK(hybrid.rate > crs.rate);
        CHECK(crs.rate > prs.rate);
        CHECK(prs.rate > 0.0);
        CHECK(std::abs(hybrid.monte_carlo - hybrid.rate) / hybrid.rate < 0.05);
    }
    for (std::size_t i = 3; i + 3 < result.rows.size(); ++i) CHECK(result.rows[i].rate > result.rows[i - 3].rate);

    std::ostringstream csv;
    write_rates_csv(csv, result);
    CHECK(csv.str().rfind("sweep,architecture,p_dbm,p_w,bandwidth_hz,rate_bps,rate_mc_bps\n", 0) == 0);
}

TEST_CASE("per-architecture LO search") {
    auto spec = set2_spec();
    LoSearch coarse;
    coarse.step = units::from_mhz(5.0);
    coarse.samples_per_axis = 1;
    for (Architecture arch : {Architecture::kCrs, Architecture::kPrs}) {
        const auto lo = optimize_architecture_lo(arch, spec, coarse);
        const auto active = active_channels(arch);
        double sum = 0.0;
        for (int n = 1; n <= 4; ++n) {
            sum += lo[n - 1];
            if (std::find(active.begin(), active.end(), n) == active.end()) CHECK(lo[n - 1] == 0.0);
        }
        CHECK(sum <= coarse.sum_max + 1e-9);

        // brute force over the same grid
        NumericalModel model;
        model.scheme = restrict_to(spec.scheme, arch);
        const double best = point_fidelity([&] { DriveConfig d = spec.base; d.rf_rabi = lo; return d; }(), model);
        const std::vector<double> grid{0.0, units::from_mhz(5.0), units::from_mhz(10.0)};
        for (double a : grid) for (double b : grid) for (double c : grid) {
            DriveConfig d = spec.base;
            d.rf_rabi = {a, arch == Architecture::kCrs ? b : 0.0, arch == Architecture::kCrs ? c : 0.0,
                         arch == Architecture::kPrs ? b : 0.0};
            if (arch == Architecture::kPrs && c != 0.0) continue;
            if (d.rf_rabi[0] + d.rf_rabi[1] + d.rf_rabi[2] + d.rf_rabi[3] > coarse.sum_max + 1e-9) continue;
            double f = 0.0;
            try {
                f = point_fidelity(d, model);
            } catch (const std::exception&) {
                continue;
            }
            CHECK(f <= best + 1e-12);
        }
    }
}
