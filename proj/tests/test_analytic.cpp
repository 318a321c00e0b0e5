// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rydberg/analytic.hpp"
#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/fidelity.hpp"

using namespace rydberg;
using Catch::Approx;
using units::from_mhz;

namespace {

AnalyticContext ctx(double op, double oc, std::array<double, 4> rf, double g) { return {op, oc, rf, g}; }

AnalyticContext random_ctx(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(from_mhz(0.01), from_mhz(10));
    return ctx(u(rng), u(rng), {u(rng), u(rng), u(rng), u(rng)}, from_mhz(5.2));
}

}  // namespace

TEST_CASE("zeta") {
    CHECK(zeta({2, 7, 1, 6}) == -40.0);
    CHECK(zeta({3, 3, 3, 3}) == 0.0);
    CHECK(zeta({3, 2, 3, 2}) == 5.0);
    CHECK(zeta({1, 2, 3, -4}) - zeta({1, 2, 3, 4}) == Approx(2 * 2 * 4));
}

TEST_CASE("probe coherence closed form") {
    CHECK(analytic_rho21(ctx(1, 1, {1, 1, 1, 1}, 1)) == Complex(0.0, 0.0));

    const auto c = ctx(1, 1, {1, 2, 3, 4}, 1);
    CHECK(c.zeta() == -5.0);
    CHECK(c.lambda() == Approx(161.0));
    const Complex r = analytic_rho21(c);
    CHECK(r.real() == Approx(0.0).margin(1e-15));
    CHECK(r.imag() == Approx(-25.0 / 161.0));

    for (double s : {0.1, 3.0, 1e3}) {
        const Complex rs = analytic_rho21(ctx(s, s, {s, 2 * s, 3 * s, 4 * s}, s));
        CHECK(rs.imag() == Approx(r.imag()).epsilon(1e-12));
    }
}

TEST_CASE("Lambda = 0 is rejected") {
    CHECK_THROWS_AS(analytic_rho21(ctx(0, 0, {0, 0, 0, 0}, 1)), DomainError);
    CHECK_THROWS_AS(analytic_steady_state(ctx(0, 1, {1, 1, 1, 1}, 1)), DomainError);
}

TEST_CASE("balanced loop: no probe absorption") {
    const auto rho = analytic_steady_state(ctx(1, 1, {2, 1, 1, 2}, 1));
    CHECK(std::abs(rho(1, 1)) == 0.0);
    CHECK(std::abs(rho(1, 0)) == 0.0);
}

TEST_CASE("trace, Hermiticity and positivity over random drives") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10000; ++i) {
        const auto c = random_ctx(rng);
        const auto rho = analytic_steady_state(c);
        if (i < 100) {
            CHECK(std::abs(rho.trace() - 1.0) <= 1e-14);
        }
        const auto check = inspect_density_matrix(rho);
        if (check.hermiticity > 1e-15 || check.trace_error > 1e-13 || check.min_eigenvalue < -1e-10) {
            FAIL("invalid closed-form state at sample " << i << ": herm " << check.hermiticity << " trace "
                                                        << check.trace_error << " min eig " << check.min_eigenvalue);
        }
    }
}

TEST_CASE("closed form equals the probe-decay-only Lindblad steady state") {
    const auto scheme = with_decays(cesium_scheme(), DecayRates::probe_only(from_mhz(5.2)));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(from_mhz(0.2), from_mhz(10));
    int tested = 0;
    while (tested < 20) {
        DriveConfig d;
        d.omega_p = u(rng);
        d.omega_c = u(rng);
        for (auto& r : d.rf_rabi) r = u(rng);
        const double z = zeta(d.rf_rabi);
        if (std::abs(z) < 0.1 * (d.rf_rabi[0] * d.rf_rabi[2] + d.rf_rabi[1] * d.rf_rabi[3])) continue;
        const auto num = steady_state(d, scheme);
        const auto ana = analytic_steady_state(AnalyticContext::from_drive(d, from_mhz(5.2)));
        CHECK((num - ana).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(fidelity(num, ana) >= 1.0 - 1e-9);
        ++tested;
    }
}

TEST_CASE("full decay set: fidelity drops on the balanced ridge") {
    NumericalModel model;
    DriveConfig plateau = DriveConfig::operating_point();
    DriveConfig ridge = plateau;
    ridge.rf_rabi = {from_mhz(5), from_mhz(5), from_mhz(5), from_mhz(5)};
    CHECK(point_fidelity(ridge, model) < point_fidelity(plateau, model));
}
