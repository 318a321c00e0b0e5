// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/quantum_core.hpp"

using namespace rydberg;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

LevelScheme alternating_levels(int k) {
    LevelScheme s;
    for (int i = 1; i <= k; ++i) s.levels.push_back({i, i % 2 == 1 ? 1 : -1, "L" + std::to_string(i)});
    return s;
}

RfTransition edge(int lo, int hi, int channel = 0) {
    RfTransition t;
    t.channel = channel;
    t.lower = lo;
    t.upper = hi;
    return t;
}

}  // namespace

TEST_CASE("channel counts") {
    CHECK(channel_count(Architecture::kHybrid, 6) == 4);
    CHECK(channel_count(Architecture::kCrs, 6) == 3);
    CHECK(channel_count(Architecture::kPrs, 6) == 2);
    CHECK(channel_count(Architecture::kCrs, 4) == 1);
    CHECK(channel_count(Architecture::kPrs, 4) == 1);
    CHECK(channel_count(Architecture::kHybrid, 8) == 7);
    CHECK(channel_count(Architecture::kCrs, 8) == 5);
    CHECK(channel_count(Architecture::kPrs, 8) == 3);
    CHECK_THROWS_WITH(channel_count(Architecture::kHybrid, 5),
                      ContainsSubstring("smallest feasible configuration occurs at K=6"));
    CHECK_THROWS_AS(channel_count(Architecture::kCrs, 3), PreconditionError);
}

TEST_CASE("channel count ordering and identity") {
    for (int k = 6; k <= 20; ++k) {
        const int h = channel_count(Architecture::kHybrid, k);
        const int c = channel_count(Architecture::kCrs, k);
        const int p = channel_count(Architecture::kPrs, k);
        CHECK(h >= c);
        CHECK(c >= p);
        if (k % 2 == 0) CHECK(h == c + p - 1);
    }
}

TEST_CASE("active channels per architecture") {
    CHECK(active_channels(Architecture::kHybrid) == std::vector<int>{1, 2, 3, 4});
    CHECK(active_channels(Architecture::kCrs) == std::vector<int>{1, 2, 3});
    CHECK(active_channels(Architecture::kPrs) == std::vector<int>{1, 4});
    CHECK(channel_levels(4) == std::make_pair(3, 6));
    CHECK(parse_architecture("Hybrid") == Architecture::kHybrid);
    CHECK_THROWS_AS(parse_architecture("mesh"), ConfigError);
}

TEST_CASE("bundled cesium scheme") {
    const auto s = cesium_scheme();
    const auto report = validate_scheme(s);
    CHECK(report.valid());
    CHECK(report.channels == 4);
    REQUIRE(s.rf_transitions.size() == 4);
    for (int n = 1; n <= 4; ++n) {
        const RfTransition* t = s.find_channel(n);
        REQUIRE(t);
        CHECK(std::make_pair(t->lower, t->upper) == channel_levels(n));
    }
    CHECK(s.find_channel(2)->carrier_frequency == Approx(units::from_ghz(3.054)));
    CHECK(s.decay_rate(2, 1) == Approx(units::from_mhz(5.2)));
    CHECK(s.decay_rate(6, 3) == Approx(units::from_khz(0.16)));
    CHECK(s.decay_rate(1, 2) == 0.0);
    CHECK(s.decay_channels.size() == 6);
    CHECK(restrict_to(s, Architecture::kPrs).rf_transitions.size() == 2);
    CHECK(validate_scheme(cesium_scheme(Architecture::kCrs)).channels == 3);
}

TEST_CASE("scheme validation") {
    SECTION("empty transition set") {
        const auto r = validate_scheme(alternating_levels(6));
        CHECK(r.valid());
        CHECK(r.channels == 0);
    }
    SECTION("triangular loop is flagged") {
        auto s = alternating_levels(6);
        s.rf_transitions = {edge(3, 4), edge(4, 5), edge(3, 5)};
        const auto r = validate_scheme(s);
        CHECK_FALSE(r.valid());
        REQUIRE(r.odd_loops.size() == 1);
        CHECK(r.odd_loops[0].size() == 3);
    }
    SECTION("odd loop even when labelled parities are inconsistent") {
        // parities deliberately wrong so that only the loop check can catch the cycle
        LevelScheme s;
        for (int i = 1; i <= 5; ++i) s.levels.push_back({i, i == 5 ? -1 : (i % 2 ? 1 : -1), ""});
        s.rf_transitions = {edge(1, 2), edge(2, 3), edge(3, 4), edge(4, 5), edge(1, 5)};
        const auto r = validate_scheme(s);
        REQUIRE_FALSE(r.odd_loops.empty());
        CHECK(r.odd_loops[0].size() == 5);
    }
    SECTION("equal-parity transition") {
        auto s = alternating_levels(6);
        s.rf_transitions = {edge(3, 5)};
        CHECK_FALSE(validate_scheme(s).valid());
    }
    SECTION("bad indices, endpoints, duplicates, labels, decays") {
        auto s = alternating_levels(6);
        s.levels[2].index = 7;
        CHECK_FALSE(validate_scheme(s).valid());
        s = alternating_levels(6);
        s.levels[0].parity = 0;
        CHECK_FALSE(validate_scheme(s).valid());
        s = alternating_levels(6);
        s.rf_transitions = {edge(4, 3)};
        CHECK_FALSE(validate_scheme(s).valid());
        s.rf_transitions = {edge(3, 4), edge(3, 4)};
        CHECK_FALSE(validate_scheme(s).valid());
        s.rf_transitions = {edge(4, 5, 1)};
        CHECK_FALSE(validate_scheme(s).valid());
        s.rf_transitions.clear();
        s.decay_channels = {{2, 2, 1.0}};
        CHECK_FALSE(validate_scheme(s).valid());
        s.decay_channels = {{2, 1, -1.0}};
        CHECK_FALSE(validate_scheme(s).valid());
    }
    SECTION("report printing") {
        auto s = alternating_levels(6);
        s.rf_transitions = {edge(3, 4), edge(4, 5), edge(3, 5)};
        std::ostringstream os;
        os << validate_scheme(s);
        CHECK_THAT(os.str(), ContainsSubstring("invalid"));
        CHECK_THAT(os.str(), ContainsSubstring("odd loop"));
    }
}

TEST_CASE("any graph with an odd cycle is rejected") {
    // cycles of every odd length on a ring of levels, whatever the parities
    for (int len = 3; len <= 9; len += 2) {
        auto s = alternating_levels(len);
        for (int i = 1; i < len; ++i) s.rf_transitions.push_back(edge(i, i + 1));
        s.rf_transitions.push_back(edge(1, len));
        CHECK_FALSE(validate_scheme(s).odd_loops.empty());
    }
    for (int len = 4; len <= 10; len += 2) {
        auto s = alternating_levels(len);
        for (int i = 1; i < len; ++i) s.rf_transitions.push_back(edge(i, i + 1));
        s.rf_transitions.push_back(edge(1, len));
        CHECK(validate_scheme(s).valid());
    }
}

TEST_CASE("closed-loop detuning") {
    auto s = cesium_scheme();
    CHECK(closed_loop_detuning(s) == Approx(0.0).margin(1e-15));
    for (auto& t : s.rf_transitions) t.detuning = 0.0;
    CHECK(closed_loop_detuning(s) == 0.0);
    const double khz[] = {1, 1, 1, 4};
    for (auto& t : s.rf_transitions) t.detuning = units::from_khz(khz[t.channel - 1]);
    CHECK(closed_loop_detuning(s) == Approx(units::from_khz(1.0)));
    CHECK_THROWS_AS(closed_loop_detuning(cesium_scheme(Architecture::kCrs)), PreconditionError);
}

TEST_CASE("decay presets") {
    const auto s = with_decays(cesium_scheme(), DecayRates::probe_only(2.0));
    REQUIRE(s.decay_channels.size() == 1);
    CHECK(s.decay_rate(2, 1) == 2.0);
    DecayRates bad;
    bad.g32 = -1.0;
    CHECK_THROWS_AS(with_decays(cesium_scheme(), bad), PreconditionError);
}

TEST_CASE("scheme file round trip") {
    const auto s = cesium_scheme();
    std::stringstream buf;
    write_scheme(buf, s);
    const auto back = parse_scheme(buf);
    REQUIRE(back.level_count() == 6);
    CHECK(back.architecture == Architecture::kHybrid);
    for (int i = 0; i < 6; ++i) {
        CHECK(back.levels[i].parity == s.levels[i].parity);
        CHECK(back.levels[i].label == s.levels[i].label);
    }
    REQUIRE(back.rf_transitions.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back.rf_transitions[i].carrier_frequency == Approx(s.rf_transitions[i].carrier_frequency));
        CHECK(back.rf_transitions[i].dipole_moment == Approx(s.rf_transitions[i].dipole_moment));
        CHECK(back.rf_transitions[i].detuning == Approx(s.rf_transitions[i].detuning));
    }
    CHECK(back.decay_rate(6, 3) == Approx(s.decay_rate(6, 3)));
}

TEST_CASE("bundled data file matches the built-in scheme") {
    const auto file = load_scheme(std::string(RYDBERG_SOURCE_DIR) + "/data/cs6_hybrid.scheme");
    std::ostringstream a, b;
    write_scheme(a, file);
    write_scheme(b, cesium_scheme());
    CHECK(a.str() == b.str());
}

TEST_CASE("malformed scheme files") {
    std::istringstream missing_parity("[scheme]\narchitecture = hybrid\n[level_1]\nlabel = g\n");
    CHECK_THROWS_AS(parse_scheme(missing_parity), ConfigError);
    std::istringstream unknown("[scheme]\narchitecture = hybrid\n[level_1]\nparity = 1\ncolour = red\n");
    CHECK_THROWS_WITH(parse_scheme(unknown), ContainsSubstring("colour"));
    CHECK_THROWS_AS(load_scheme("/nonexistent.scheme"), ConfigError);
}
