// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <boost/math/special_functions/expint.hpp>

#include "rydberg/errors.hpp"
#include "rydberg/numerics.hpp"

using namespace rydberg;
using namespace rydberg::numerics;
using Catch::Approx;

namespace {

ComplexMatrix random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    return a;
}

}  // namespace

TEST_CASE("hermitian_eig on small known matrices") {
    auto id = hermitian_eig(ComplexMatrix::Identity(2, 2));
    CHECK(id.eigenvalues(0) == Approx(1.0));
    CHECK(id.eigenvalues(1) == Approx(1.0));

    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    auto px = hermitian_eig(x);
    CHECK(px.eigenvalues(0) == Approx(-1.0));
    CHECK(px.eigenvalues(1) == Approx(1.0));
}

TEST_CASE("hermitian_eig reconstructs random Hermitian matrices") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(6, rng);
        const ComplexMatrix h = a + a.adjoint();
        const auto e = hermitian_eig(h);
        const ComplexMatrix back = e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
        CHECK((back - h).norm() <= 1e-10 * h.norm());
        CHECK((e.eigenvectors.adjoint() * e.eigenvectors - ComplexMatrix::Identity(6, 6)).norm() < 1e-10);
        for (int k = 1; k < 6; ++k) CHECK(e.eigenvalues(k) >= e.eigenvalues(k - 1));
    }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    CHECK_THROWS_AS(hermitian_eig(m), PreconditionError);
    CHECK_THROWS_AS(hermitian_eig(ComplexMatrix(2, 3)), PreconditionError);
}

TEST_CASE("null_space basic cases") {
    CHECK(null_space(ComplexMatrix::Zero(3, 3)).size() == 3);
    CHECK(null_space(ComplexMatrix::Identity(3, 3)).empty());
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    const auto ns = null_space(d);
    REQUIRE(ns.size() == 1);
    CHECK(std::abs(ns[0](0)) == Approx(1.0));
    CHECK(std::abs(ns[0](1)) < 1e-12);
    CHECK(std::abs(ns[0](2)) < 1e-12);
}

TEST_CASE("null_space vectors are annihilated") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        // rank-4 product of 6x4 and 4x6 factors
        std::normal_distribution<double> g;
        ComplexMatrix a(6, 4), b(4, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 4; ++j) {
                a(i, j) = Complex(g(rng), g(rng));
                b(j, i) = Complex(g(rng), g(rng));
            }
        const ComplexMatrix m = a * b;
        const auto ns = null_space(m);
        CHECK(ns.size() == 2);
        const double norm = m.operatorNorm();
        for (const auto& v : ns) {
            CHECK(v.norm() == Approx(1.0));
            CHECK((m * v).norm() <= 1e-9 * norm);
        }
    }
}

TEST_CASE("psd_sqrt") {
    CHECK((psd_sqrt(ComplexMatrix::Identity(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 9;
    const auto r = psd_sqrt(d);
    CHECK(r(0, 0).real() == Approx(2.0));
    CHECK(r(1, 1).real() == Approx(3.0));

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(6, rng);
        ComplexMatrix rho = a * a.adjoint();
        rho /= rho.trace();
        const ComplexMatrix s = psd_sqrt(rho);
        CHECK((s * s - rho).norm() <= 1e-9 * (1.0 + rho.norm()));
    }

    ComplexMatrix neg = ComplexMatrix::Identity(2, 2);
    neg(1, 1) = -1e-12;
    CHECK_NOTHROW(psd_sqrt(neg));
    neg(1, 1) = -1e-3;
    CHECK_THROWS_AS(psd_sqrt(neg), NumericalError);
}

TEST_CASE("exponential integral E1") {
    CHECK(exp_integral_e1(1.0) == Approx(0.21938393439552).epsilon(1e-12));
    for (double x : {1e-3, 0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, 10.0, 30.0, 80.0}) {
        CHECK(exp_integral_e1(x) == Approx(boost::math::expint(1, x)).epsilon(1e-12));
        CHECK(exp_scaled_e1(x) == Approx(std::exp(x) * boost::math::expint(1, x)).epsilon(1e-12));
    }
    // x e^x E1(x) -> 1
    CHECK(50.0 * exp_scaled_e1(50.0) == Approx(1.0).epsilon(0.02));
    CHECK(std::isfinite(exp_scaled_e1(1e6)));
    double prev = exp_scaled_e1(0.01);
    for (double x = 0.02; x < 200.0; x *= 1.1) {
        const double v = exp_scaled_e1(x);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(exp_integral_e1(0.0), DomainError);
    CHECK_THROWS_AS(exp_integral_e1(-1.0), DomainError);
}

TEST_CASE("d/dx [e^x E1(x)] = e^x E1(x) - 1/x") {
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        const double h = 1e-5 * x;
        const double deriv = (exp_scaled_e1(x + h) - exp_scaled_e1(x - h)) / (2.0 * h);
        const double expected = exp_scaled_e1(x) - 1.0 / x;
        CHECK(std::abs(deriv - expected) / std::abs(expected) < 1e-4);
    }
}

TEST_CASE("rk4_step") {
    ComplexVector y0(2);
    y0 << 1.0, Complex(0.0, 2.0);
    auto zero = [](const ComplexVector& y) -> ComplexVector { return ComplexVector::Zero(y.size()); };
    CHECK((rk4_step(zero, y0, 0.1) - y0).norm() == 0.0);

    auto decay = [](const ComplexVector& y) -> ComplexVector { return -y; };
    auto integrate = [&](double dt, int steps) {
        ComplexVector y(1);
        y << 1.0;
        for (int i = 0; i < steps; ++i) y = rk4_step(decay, y, dt);
        return y(0).real();
    };
    const double exact = std::exp(-10.0);
    // one RK4 step multiplies by the degree-4 Taylor polynomial of e^{-h}
    const double h = 0.1;
    const double amplification = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
    CHECK(integrate(0.1, 100) == Approx(std::pow(amplification, 100)).epsilon(1e-12));
    // local error h^5/120 per step accumulates to ~9e-6 relative after 100 steps
    CHECK(std::abs(integrate(0.1, 100) - exact) / exact < 1e-5);

    const double e1 = std::abs(integrate(0.2, 50) - exact);
    const double e2 = std::abs(integrate(0.1, 100) - exact);
    CHECK(e1 / e2 >= 12.0);

    // non-autonomous: y' = t, y(0) = 0 -> t^2 / 2 (RK4 exact for polynomials of low degree)
    VectorField ramp = [](double t, const ComplexVector&) -> ComplexVector {
        ComplexVector d(1);
        d << t;
        return d;
    };
    ComplexVector y(1);
    y << 0.0;
    double t = 0.0;
    for (int i = 0; i < 10; ++i, t += 0.1) y = rk4_step(ramp, t, y, 0.1);
    CHECK(y(0).real() == Approx(0.5).epsilon(1e-12));
}
