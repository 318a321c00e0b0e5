// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/fidelity.hpp"

using namespace rydberg;
using Catch::Approx;
using units::from_khz;
using units::from_mhz;

namespace {

ComplexMatrix random_state(std::mt19937_64& rng, int rank = 6) {
    std::normal_distribution<double> g;
    ComplexMatrix a(6, rank);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < rank; ++j) a(i, j) = Complex(g(rng), g(rng));
    ComplexMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

std::array<double, 4> mhz(double a, double b, double c, double d) {
    return {from_mhz(a), from_mhz(b), from_mhz(c), from_mhz(d)};
}

}  // namespace

TEST_CASE("fidelity of simple states") {
    std::mt19937_64 rng(1);
    const auto rho = random_state(rng);
    CHECK(fidelity(rho, rho) == Approx(1.0).epsilon(1e-9));
    CHECK(fidelity(basis_projector(1, 6), basis_projector(2, 6)) == Approx(0.0).margin(1e-12));
    const ComplexMatrix mixed = 0.5 * (basis_projector(1, 6) + basis_projector(2, 6));
    CHECK(fidelity(basis_projector(1, 6), mixed) == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("fidelity is symmetric and bounded") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto a = random_state(rng, 1 + i % 6);
        const auto b = random_state(rng);
        const double fab = fidelity(a, b), fba = fidelity(b, a);
        CHECK(std::abs(fab - fba) <= 1e-9);
        CHECK(fab >= 0.0);
        CHECK(fab <= 1.0 + 1e-9);
        // pure-state oracle: F(|psi><psi|, rho) = <psi|rho|psi>
        if (i % 6 == 0) {
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
            const ComplexVector psi = es.eigenvectors().col(5);
            CHECK(fab == Approx((psi.adjoint() * b * psi)(0, 0).real()).epsilon(1e-8));
        }
    }
}

TEST_CASE("fidelity rejects invalid inputs") {
    CHECK_THROWS_AS(fidelity(2.0 * basis_projector(1, 6), basis_projector(1, 6)), PreconditionError);
    CHECK_THROWS_AS(fidelity(basis_projector(1, 6), basis_projector(1, 5)), PreconditionError);
}

TEST_CASE("route names") {
    CHECK(parse_route("null_space") == NumericalRoute::kNullSpace);
    CHECK(parse_route("evolve") == NumericalRoute::kEvolve);
    CHECK(to_string(NumericalRoute::kEvolve) == "evolve");
    CHECK_THROWS_AS(parse_route("magic"), ConfigError);
}

TEST_CASE("scan at the (5, 5) panel") {
    FidelityScanSpec spec;
    spec.base = DriveConfig::operating_point();
    spec.base.rf_rabi[0] = from_mhz(5);
    spec.base.rf_rabi[3] = from_mhz(5);
    spec.min = from_mhz(1);
    spec.max = from_mhz(9);
    spec.resolution = 3;
    const auto scan = fidelity_scan(spec, NumericalModel{}, 2);
    REQUIRE(scan.values.size() == 9);
    CHECK(scan.failures.empty());
    for (double v : scan.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // diagonal cells satisfy Omega1 Omega3 = Omega2 Omega4 here
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i != j) CHECK(scan.value(i, i) < scan.value(i, j));
        }
    }
    std::ostringstream os;
    write_scan_csv(os, scan);
    CHECK(os.str().rfind("omega1_mhz,omega2_mhz,omega3_mhz,omega4_mhz,fidelity\n", 0) == 0);
}

TEST_CASE("single-point scan equals a direct evaluation") {
    FidelityScanSpec spec;
    spec.base = DriveConfig::operating_point();
    spec.min = from_mhz(7);
    spec.max = from_mhz(7);
    spec.resolution = 1;
    spec.axis_x = 2;
    spec.axis_y = 3;
    const auto scan = fidelity_scan(spec, NumericalModel{});
    REQUIRE(scan.values.size() == 1);
    CHECK(scan.values[0] == point_fidelity(scan.drive_at(0, 0), NumericalModel{}));
}

TEST_CASE("scan symmetry under the 4 <-> 6 relabelling") {
    // Equal Omega1 and Omega4 and mirror-symmetric decays make (a, b) and (b, a) equivalent.
    NumericalModel model;
    DecayRates r = DecayRates::cesium_default();
    r.g63 = r.g43;
    r.g54 = 0.0;
    r.g65 = 0.0;
    model.scheme = with_decays(cesium_scheme(), r);
    FidelityScanSpec spec;
    spec.base = DriveConfig::operating_point();
    spec.base.rf_rabi[0] = from_mhz(4);
    spec.base.rf_rabi[3] = from_mhz(4);
    spec.min = from_mhz(0.5);
    spec.max = from_mhz(8);
    spec.resolution = 4;
    const auto scan = fidelity_scan(spec, model);
    for (std::size_t i = 0; i < scan.size(); ++i) {
        for (std::size_t j = i + 1; j < scan.size(); ++j) {
            CHECK(scan.value(i, j) == Approx(scan.value(j, i)).epsilon(1e-8));
        }
    }
}

TEST_CASE("perturbation region sampling") {
    PerturbationRegion region;
    region.center = mhz(2, 7, 1, 6);
    region.half_widths.fill(from_khz(2));
    CHECK(region.sample_points().size() == 81);
    region.half_widths = {from_khz(2), 0.0, 0.0, 0.0};
    CHECK(region.sample_points().size() == 3);
    region.center = {0.0, 1.0, 1.0, 1.0};
    region.half_widths = {0.5, 0.0, 0.0, 0.0};
    for (const auto& p : region.sample_points()) CHECK(p[0] >= 0.0);
}

TEST_CASE("average fidelity") {
    NumericalModel model;
    const auto base = DriveConfig::operating_point();
    PerturbationRegion point;
    point.center = base.rf_rabi;
    CHECK(average_fidelity(point, base, model) == Approx(point_fidelity(base, model)).epsilon(1e-14));

    PerturbationRegion region = point;
    region.half_widths.fill(from_khz(2));
    const double plateau = average_fidelity(region, base, model);
    CHECK(plateau >= 0.9999);

    PerturbationRegion ridge = region;
    ridge.center = mhz(5, 5, 5, 5);
    CHECK(average_fidelity(ridge, base, model) < plateau);
}

TEST_CASE("fidelity is flat within 2 kHz of the operating point") {
    NumericalModel model;
    const auto base = DriveConfig::operating_point();
    const double center = point_fidelity(base, model);
    PerturbationRegion region;
    region.center = base.rf_rabi;
    region.half_widths.fill(from_khz(2));
    for (const auto& p : region.sample_points()) {
        DriveConfig d = base;
        d.rf_rabi = p;
        CHECK(std::abs(point_fidelity(d, model) - center) <= 1e-4);
    }
}

TEST_CASE("fidelity degrades toward the balanced surface") {
    NumericalModel model;
    const auto base = DriveConfig::operating_point();
    const auto& w = base.rf_rabi;
    // step along grad(zeta) until zeta reaches zero
    const std::array<double, 4> grad{w[2], -w[3], w[0], -w[1]};
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    const double t_zero = -zeta(w) / g2;
    double prev = 2.0;
    for (int k = 0; k <= 20; ++k) {
        DriveConfig d = base;
        for (int n = 0; n < 4; ++n) d.rf_rabi[n] = w[n] + (0.999 * t_zero * k / 20.0) * grad[n];
        const double f = point_fidelity(d, model);
        CHECK(f <= prev + 1e-3);
        prev = f;
    }
}

TEST_CASE("optimizer") {
    NumericalModel model;
    OptimizerSpec spec;
    spec.base = DriveConfig::operating_point();
    spec.sum_max = from_mhz(100);

    SECTION("single feasible point") {
        spec.grids = {std::vector<double>{from_mhz(2)}, {from_mhz(7)}, {from_mhz(1)}, {from_mhz(6)}};
        const auto r = optimize_operating_point(spec, model);
        CHECK(r.feasible == 1);
        CHECK(r.best.point == mhz(2, 7, 1, 6));
    }
    SECTION("matches brute-force enumeration on a 3-level grid") {
        const std::vector<double> g{from_mhz(1), from_mhz(4), from_mhz(7)};
        spec.grids = {g, g, g, g};
        spec.sum_max = from_mhz(16);
        spec.half_widths.fill(from_khz(2));
        spec.samples_per_axis = 2;
        const auto r = optimize_operating_point(spec, model, 2);

        double best = -1.0, best_sum = 0.0;
        std::array<double, 4> arg{};
        std::size_t count = 0;
        for (double a : g)
            for (double b : g)
                for (double c : g)
                    for (double d : g) {
                        const double sum = a + b + c + d;
                        if (sum > spec.sum_max + 1e-9) continue;
                        ++count;
                        PerturbationRegion region;
                        region.center = {a, b, c, d};
                        region.half_widths = spec.half_widths;
                        region.samples_per_axis = 2;
                        const double f = average_fidelity(region, spec.base, model);
                        if (f > best || (f == best && sum < best_sum)) {
                            best = f;
                            best_sum = sum;
                            arg = region.center;
                        }
                    }
        CHECK(r.feasible == count);
        CHECK(r.best.point == arg);
        CHECK(r.best.average_fidelity == best);
    }
    SECTION("ties go to the smaller sum") {
        // every candidate with Omega_P = 0 has F = 1 exactly (both states are the ground state)
        spec.base.omega_p = 0.0;
        spec.base.omega_c = 0.0;
        spec.grids = {std::vector<double>{from_mhz(1), from_mhz(2)}, {from_mhz(1)}, {from_mhz(3), from_mhz(1)},
                      {from_mhz(1)}};
        const auto r = optimize_operating_point(spec, model);
        if (r.failed == 0) CHECK(r.best.point == mhz(1, 1, 1, 1));
    }
    SECTION("empty feasible set") {
        spec.grids = {std::vector<double>{from_mhz(5)}, {from_mhz(5)}, {from_mhz(5)}, {from_mhz(5)}};
        spec.sum_max = from_mhz(10);
        CHECK_THROWS_AS(optimize_operating_point(spec, model), PreconditionError);
    }
    SECTION("axis grid") {
        const auto g = OptimizerSpec::axis_grid(0.0, 1.0, 0.25);
        CHECK(g.size() == 5);
        CHECK(g.back() == Approx(1.0));
    }
}
