// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <numbers>
#include <sstream>

#include "rydberg/config.hpp"
#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"

using namespace rydberg;
using namespace rydberg::config;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

Document parse(const std::string& text) {
    std::istringstream in(text);
    return Document::parse(in, "test.ini");
}

}  // namespace

TEST_CASE("unit suffixes convert to internal units") {
    const auto doc = parse(
        "[a]\nf_mhz = 1\ng_khz = 1\nh_ghz = 1\nt_ns = 500\np_dbm = 0\nl_cm = 2\nn_per_cm3 = 1\n"
        "bw_khz = 100\nphi_deg = 180\n");
    const auto& s = doc.section("a");
    CHECK(s.get_quantity("f", Dimension::kFrequency) == Approx(2.0 * std::numbers::pi));
    CHECK(s.get_quantity("g", Dimension::kFrequency) == Approx(2.0 * std::numbers::pi * 1e-3));
    CHECK(s.get_quantity("h", Dimension::kFrequency) == Approx(2.0 * std::numbers::pi * 1e3));
    CHECK(s.get_quantity("t", Dimension::kTime) == Approx(0.5));
    CHECK(s.get_quantity("p", Dimension::kPower) == Approx(1e-3));
    CHECK(s.get_quantity("l", Dimension::kLength) == Approx(0.02));
    CHECK(s.get_quantity("n", Dimension::kDensity) == Approx(1e6));
    CHECK(s.get_quantity("bw", Dimension::kBandwidth) == Approx(1e5));
    CHECK(s.get_quantity("phi", Dimension::kAngle) == Approx(std::numbers::pi));
    CHECK_NOTHROW(s.require_all_consumed());
}

TEST_CASE("quantity lists") {
    const auto doc = parse("[a]\nrabi_mhz = 2, 7, 1, 6\npowers_dbm = -10, 0\n");
    const auto& s = doc.section("a");
    const auto v = s.get_quantity_list("rabi", Dimension::kFrequency);
    REQUIRE(v.size() == 4);
    CHECK(v[1] == Approx(units::from_mhz(7)));
    const auto p = s.get_quantity_list("powers", Dimension::kPower);
    CHECK(p[0] == Approx(1e-4));
    CHECK(p[1] == Approx(1e-3));
}

TEST_CASE("strict key handling") {
    SECTION("unknown key is named") {
        const auto doc = parse("[drive]\nomega_p_mhz = 1\nomgea_c_mhz = 2\n");
        const auto& s = doc.section("drive");
        s.get_quantity("omega_p", Dimension::kFrequency);
        CHECK_THROWS_WITH(s.require_all_consumed(), ContainsSubstring("omgea_c_mhz"));
    }
    SECTION("missing unit suffix is not accepted") {
        const auto doc = parse("[drive]\nomega_p = 1\n");
        const auto& s = doc.section("drive");
        CHECK_THROWS_AS(s.get_quantity("omega_p", Dimension::kFrequency), ConfigError);
        CHECK_THROWS_WITH(s.require_all_consumed(), ContainsSubstring("omega_p"));
    }
    SECTION("two unit variants of one quantity conflict") {
        const auto doc = parse("[drive]\nomega_p_mhz = 1\nomega_p_khz = 1000\n");
        CHECK_THROWS_AS(doc.section("drive").get_quantity("omega_p", Dimension::kFrequency), ConfigError);
    }
    SECTION("bad numbers") {
        const auto doc = parse("[a]\nx = abc\nn = 1.5\nb = maybe\nl = 1, x\n");
        const auto& s = doc.section("a");
        CHECK_THROWS_WITH(s.get_double("x"), ContainsSubstring("x"));
        CHECK_THROWS_AS(s.get_int("n"), ConfigError);
        CHECK_THROWS_AS(s.get_bool("b", false), ConfigError);
        CHECK_THROWS_AS(s.get_list("l"), ConfigError);
    }
    SECTION("signed integers") {
        const auto doc = parse("[a]\np = +1\nq = -1\n");
        CHECK(doc.section("a").get_int("p") == 1);
        CHECK(doc.section("a").get_int("q") == -1);
    }
}

TEST_CASE("document structure") {
    const auto doc = parse("; comment\n[one]\na = 1\n\n[two]\nb = 2\n");
    CHECK(doc.has_section("one"));
    CHECK_FALSE(doc.has_section("three"));
    CHECK(doc.section("three").entries().empty());
    doc.section("one");
    const auto left = doc.unrequested_sections();
    REQUIRE(left.size() == 1);
    CHECK(left[0] == "two");

    CHECK_THROWS_AS(parse("a = 1\n[s]\n"), ConfigError);
    CHECK_THROWS_WITH(parse("[s]\nthis line has no equals\n"), ContainsSubstring("test.ini:2"));
    CHECK_THROWS_AS(Document::load("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("describe lists accepted suffixes") {
    CHECK_THAT(describe(Dimension::kFrequency), ContainsSubstring("_mhz"));
    CHECK_THAT(describe(Dimension::kPower), ContainsSubstring("_dbm"));
}
