// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rydberg {

enum class Architecture { kCrs, kPrs, kHybrid };

std::string_view to_string(Architecture arch);

/// Parses "crs", "prs" or "hybrid" (case-insensitive). Throws ConfigError.
Architecture parse_architecture(std::string_view text);

struct Level {
    int index = 0;   // 1-based
    int parity = 1;  // +1 or -1
    std::string label;
};

/// An RF-driven transition of the Rydberg manifold. `channel` is the hybrid
/// channel number n (1..4): T1 3<->4, T2 4<->5, T3 5<->6, T4 3<->6.
struct RfTransition {
    int channel = 0;
    int lower = 0;
    int upper = 0;
    double carrier_frequency = 0.0;  // rad/us
    double dipole_moment = 0.0;      // e*a0
    double detuning = 0.0;           // rad/us
    std::string application_band;
};

/// Spontaneous decay |from> -> |to>.
struct DecayChannel {
    int from = 0;
    int to = 0;
    double rate = 0.0;  // rad/us
};

struct LevelScheme {
    std::vector<Level> levels;
    Architecture architecture = Architecture::kHybrid;
    std::vector<RfTransition> rf_transitions;
    std::vector<DecayChannel> decay_channels;

    int level_count() const { return static_cast<int>(levels.size()); }

    /// Transition carrying hybrid channel n, if present.
    const RfTransition* find_channel(int channel) const;

    /// Decay rate of |from> -> |to>, 0 if absent.
    double decay_rate(int from, int to) const;
};

/// Number of simultaneously accessible RF transitions of a K-level manifold.
/// Hybrid needs K >= 6; CRS and PRS need K >= 4. Throws PreconditionError.
int channel_count(Architecture arch, int level_count);

/// Channels 1..4 that each architecture drives in the six-level manifold.
std::vector<int> active_channels(Architecture arch);

/// (lower, upper) of hybrid channel n in the six-level manifold.
std::pair<int, int> channel_levels(int channel);

struct ValidationReport {
    std::vector<std::string> violations;   // parity / structural problems
    std::vector<std::vector<int>> odd_loops;  // each a closed cycle of level indices
    std::size_t channels = 0;

    bool valid() const { return violations.empty() && odd_loops.empty(); }
};

ValidationReport validate_scheme(const LevelScheme& scheme);

std::ostream& operator<<(std::ostream& os, const ValidationReport& report);

/// delta = Delta_4 - (Delta_1 + Delta_2 + Delta_3). Only defined for the
/// six-level hybrid scheme; throws PreconditionError otherwise.
double closed_loop_detuning(const LevelScheme& scheme);

/// Decay rates of the six-level cesium manifold (rad/us), in the order
/// gamma_21, gamma_32, gamma_43, gamma_54, gamma_65, gamma_63.
struct DecayRates {
    double g21 = 0.0;
    double g32 = 0.0;
    double g43 = 0.0;
    double g54 = 0.0;
    double g65 = 0.0;
    double g63 = 0.0;

    static DecayRates cesium_default();
    /// Only the probe-transition decay.
    static DecayRates probe_only(double gamma_21);
};

/// The bundled 133Cs scheme: 6S1/2, 6P3/2, 60D5/2, 62P3/2, 61D5/2, 60F7/2,
/// RF transitions of the requested architecture, and the decay set.
LevelScheme cesium_scheme(Architecture arch = Architecture::kHybrid,
                          const DecayRates& rates = DecayRates::cesium_default());

/// Replaces the decay channels of a K=6 scheme with the given rates.
LevelScheme with_decays(LevelScheme scheme, const DecayRates& rates);

/// Keeps only the RF transitions used by `arch`.
LevelScheme restrict_to(LevelScheme scheme, Architecture arch);

/// Level-scheme file (INI-style sections [scheme], [level_N], [transition_N],
/// [decay_N]). Frequencies carry unit suffixes and are converted to rad/us.
LevelScheme parse_scheme(std::istream& in);
LevelScheme load_scheme(const std::string& path);
void write_scheme(std::ostream& out, const LevelScheme& scheme);

}  // namespace rydberg
