// SPDX-License-Identifier: Apache-2.0
#include "rydberg/quantum_core.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <queue>
#include <set>

#include "rydberg/config.hpp"
#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"

namespace rydberg {

std::string_view to_string(Architecture arch) {
    switch (arch) {
        case Architecture::kCrs: return "crs";
        case Architecture::kPrs: return "prs";
        case Architecture::kHybrid: return "hybrid";
    }
    return "unknown";
}

Architecture parse_architecture(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "crs") return Architecture::kCrs;
    if (lower == "prs") return Architecture::kPrs;
    if (lower == "hybrid") return Architecture::kHybrid;
    throw ConfigError("unknown architecture '" + std::string(text) + "' (expected crs, prs or hybrid)");
}

const RfTransition* LevelScheme::find_channel(int channel) const {
    for (const auto& t : rf_transitions) {
        if (t.channel == channel) return &t;
    }
    return nullptr;
}

double LevelScheme::decay_rate(int from, int to) const {
    double rate = 0.0;
    for (const auto& d : decay_channels) {
        if (d.from == from && d.to == to) rate += d.rate;
    }
    return rate;
}

int channel_count(Architecture arch, int k) {
    switch (arch) {
        case Architecture::kCrs:
            if (k < 4) throw PreconditionError("CRS needs at least 4 levels, got K=" + std::to_string(k));
            return k - 3;
        case Architecture::kPrs:
            if (k < 4) throw PreconditionError("PRS needs at least 4 levels, got K=" + std::to_string(k));
            return (k - 2) / 2;
        case Architecture::kHybrid:
            if (k < 6) {
                throw PreconditionError(
                    "hybrid coupling is infeasible for K=" + std::to_string(k) +
                    ": with fewer than six levels the extra RF link would close a triangular loop, "
                    "which parity forbids; the smallest feasible configuration occurs at K=6");
            }
            return (k - 3) + (k - 4) / 2;
    }
    return 0;
}

std::vector<int> active_channels(Architecture arch) {
    switch (arch) {
        case Architecture::kCrs: return {1, 2, 3};
        case Architecture::kPrs: return {1, 4};
        case Architecture::kHybrid: return {1, 2, 3, 4};
    }
    return {};
}

std::pair<int, int> channel_levels(int channel) {
    switch (channel) {
        case 1: return {3, 4};
        case 2: return {4, 5};
        case 3: return {5, 6};
        case 4: return {3, 6};
        default: throw PreconditionError("RF channel must be 1..4, got " + std::to_string(channel));
    }
}

namespace {

// Returns one odd cycle per non-bipartite connected component.
std::vector<std::vector<int>> find_odd_loops(int k, const std::vector<RfTransition>& transitions) {
    std::vector<std::vector<int>> adjacency(k + 1);
    for (const auto& t : transitions) {
        if (t.lower < 1 || t.upper < 1 || t.lower > k || t.upper > k || t.lower == t.upper) continue;
        adjacency[t.lower].push_back(t.upper);
        adjacency[t.upper].push_back(t.lower);
    }
    std::vector<int> color(k + 1, -1), parent(k + 1, 0), depth(k + 1, 0);
    std::vector<std::vector<int>> loops;
    for (int start = 1; start <= k; ++start) {
        if (color[start] != -1) continue;
        color[start] = 0;
        std::queue<int> queue;
        queue.push(start);
        bool reported = false;
        while (!queue.empty() && !reported) {
            const int u = queue.front();
            queue.pop();
            for (int v : adjacency[u]) {
                if (color[v] == -1) {
                    color[v] = 1 - color[u];
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push(v);
                } else if (color[v] == color[u]) {
                    // Walk both ends up to their common ancestor.
                    std::vector<int> left{u}, right{v};
                    int a = u, b = v;
                    while (a != b) {
                        if (depth[a] >= depth[b]) {
                            a = parent[a];
                            left.push_back(a);
                        } else {
                            b = parent[b];
                            right.push_back(b);
                        }
                    }
                    right.pop_back();
                    std::vector<int> cycle(left.rbegin(), left.rend());
                    cycle.insert(cycle.end(), right.begin(), right.end());
                    loops.push_back(cycle);
                    reported = true;
                    break;
                }
            }
        }
        // Finish coloring the component so it is not revisited.
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop();
            for (int v : adjacency[u]) {
                if (color[v] == -1) {
                    color[v] = 1 - color[u];
                    queue.push(v);
                }
            }
        }
    }
    return loops;
}

}  // namespace

ValidationReport validate_scheme(const LevelScheme& scheme) {
    ValidationReport report;
    const int k = scheme.level_count();

    for (int i = 0; i < k; ++i) {
        const Level& level = scheme.levels[i];
        if (level.index != i + 1) {
            report.violations.push_back("level indices must be contiguous from 1; position " + std::to_string(i + 1) +
                                        " holds index " + std::to_string(level.index));
        }
        if (level.parity != 1 && level.parity != -1) {
            report.violations.push_back("level " + std::to_string(level.index) + " has parity " +
                                        std::to_string(level.parity) + " (must be +1 or -1)");
        }
    }

    auto parity_of = [&](int index) { return scheme.levels[index - 1].parity; };
    std::set<std::pair<int, int>> seen;
    for (const auto& t : scheme.rf_transitions) {
        const std::string name = std::to_string(t.lower) + "<->" + std::to_string(t.upper);
        if (t.lower < 1 || t.upper > k || t.lower >= t.upper) {
            report.violations.push_back("transition " + name + ": endpoints must satisfy 1 <= lower < upper <= " +
                                        std::to_string(k));
            continue;
        }
        if (parity_of(t.lower) * parity_of(t.upper) != -1) {
            report.violations.push_back("transition " + name + " connects levels of equal parity (" +
                                        scheme.levels[t.lower - 1].label + ", " + scheme.levels[t.upper - 1].label +
                                        ")");
        }
        if (!seen.insert({t.lower, t.upper}).second) {
            report.violations.push_back("transition " + name + " is listed twice");
        }
        if (k == 6 && t.channel >= 1 && t.channel <= 4 && channel_levels(t.channel) != std::make_pair(t.lower, t.upper)) {
            report.violations.push_back("transition " + name + " is labelled channel " + std::to_string(t.channel) +
                                        " but that channel couples " + std::to_string(channel_levels(t.channel).first) +
                                        "<->" + std::to_string(channel_levels(t.channel).second));
        }
    }

    for (const auto& d : scheme.decay_channels) {
        if (d.from < 1 || d.from > k || d.to < 1 || d.to > k || d.from == d.to) {
            report.violations.push_back("decay " + std::to_string(d.from) + "->" + std::to_string(d.to) +
                                        " has invalid endpoints");
        }
        if (!(d.rate >= 0.0)) {
            report.violations.push_back("decay " + std::to_string(d.from) + "->" + std::to_string(d.to) +
                                        " has negative rate");
        }
    }

    report.odd_loops = find_odd_loops(k, scheme.rf_transitions);
    report.channels = scheme.rf_transitions.size();
    return report;
}

std::ostream& operator<<(std::ostream& os, const ValidationReport& report) {
    os << (report.valid() ? "valid" : "invalid") << ", " << report.channels << " RF channel(s)\n";
    for (const auto& v : report.violations) os << "  violation: " << v << '\n';
    for (const auto& loop : report.odd_loops) {
        os << "  odd loop (length " << loop.size() << "):";
        for (int i : loop) os << ' ' << i;
        os << ' ' << loop.front() << '\n';
    }
    return os;
}

double closed_loop_detuning(const LevelScheme& scheme) {
    if (scheme.architecture != Architecture::kHybrid || scheme.level_count() != 6) {
        throw PreconditionError("closed-loop detuning is only defined for the six-level hybrid scheme");
    }
    double d[5] = {};
    for (int n = 1; n <= 4; ++n) {
        const RfTransition* t = scheme.find_channel(n);
        if (!t) throw PreconditionError("hybrid scheme is missing RF channel " + std::to_string(n));
        d[n] = t->detuning;
    }
    return d[4] - (d[1] + d[2] + d[3]);
}

DecayRates DecayRates::cesium_default() {
    return {units::from_mhz(5.2),  units::from_khz(0.8),  units::from_khz(0.4),
            units::from_khz(0.2),  units::from_khz(0.15), units::from_khz(0.16)};
}

DecayRates DecayRates::probe_only(double gamma_21) { return {gamma_21, 0.0, 0.0, 0.0, 0.0, 0.0}; }

LevelScheme with_decays(LevelScheme scheme, const DecayRates& r) {
    if (scheme.level_count() != 6) throw PreconditionError("with_decays needs a six-level scheme");
    scheme.decay_channels.clear();
    const DecayChannel all[] = {{2, 1, r.g21}, {3, 2, r.g32}, {4, 3, r.g43},
                                {5, 4, r.g54}, {6, 5, r.g65}, {6, 3, r.g63}};
    for (const auto& d : all) {
        if (d.rate < 0.0) throw PreconditionError("decay rates must be >= 0");
        if (d.rate > 0.0) scheme.decay_channels.push_back(d);
    }
    return scheme;
}

LevelScheme restrict_to(LevelScheme scheme, Architecture arch) {
    const auto keep = active_channels(arch);
    std::erase_if(scheme.rf_transitions, [&](const RfTransition& t) {
        return std::find(keep.begin(), keep.end(), t.channel) == keep.end();
    });
    scheme.architecture = arch;
    return scheme;
}

LevelScheme cesium_scheme(Architecture arch, const DecayRates& rates) {
    LevelScheme s;
    s.levels = {{1, +1, "6S1/2"},  {2, -1, "6P3/2"},  {3, +1, "60D5/2"},
                {4, -1, "62P3/2"}, {5, +1, "61D5/2"}, {6, -1, "60F7/2"}};
    s.rf_transitions = {
        {1, 3, 4, units::from_ghz(30.615), 2329.67, units::from_khz(1.0), "mmWave"},
        {2, 4, 5, units::from_ghz(3.054), 7886.52, units::from_khz(1.0), "sub-6GHz"},
        {3, 5, 6, units::from_ghz(45.342), 711.764, units::from_khz(2.0), "Hi-mmWave"},
        {4, 3, 6, units::from_ghz(79.01), 250.939, units::from_khz(4.0), "Satellite"},
    };
    return restrict_to(with_decays(std::move(s), rates), arch);
}

namespace {

int section_number(const std::string& name, const std::string& prefix) {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return -1;
    int n = 0;
    for (std::size_t i = prefix.size(); i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
        n = n * 10 + (name[i] - '0');
    }
    return n;
}

}  // namespace

LevelScheme parse_scheme(std::istream& in) {
    using config::Dimension;
    const auto doc = config::Document::parse(in, "scheme");
    LevelScheme scheme;

    const auto& head = doc.section("scheme");
    scheme.architecture = parse_architecture(head.get_string("architecture", "hybrid"));
    head.require_all_consumed();

    std::map<int, Level> levels;
    for (const auto& name : doc.section_names()) {
        if (name == "scheme") continue;
        const auto& sec = doc.section(name);
        if (int n = section_number(name, "level_"); n > 0) {
            Level level{n, static_cast<int>(sec.get_int("parity")), sec.get_string("label", "")};
            if (level.parity != 1 && level.parity != -1) {
                throw ConfigError("[" + name + "] parity: must be +1 or -1");
            }
            levels[n] = level;
        } else if (section_number(name, "transition_") > 0) {
            RfTransition t;
            t.channel = static_cast<int>(sec.get_int("channel", 0));
            t.lower = static_cast<int>(sec.get_int("lower"));
            t.upper = static_cast<int>(sec.get_int("upper"));
            t.carrier_frequency = sec.get_quantity("carrier_frequency", Dimension::kFrequency, 0.0);
            t.dipole_moment = sec.get_quantity("dipole_moment", Dimension::kDipole, 0.0);
            t.detuning = sec.get_quantity("detuning", Dimension::kFrequency, 0.0);
            t.application_band = sec.get_string("band", "");
            scheme.rf_transitions.push_back(t);
        } else if (section_number(name, "decay_") > 0) {
            DecayChannel d;
            d.from = static_cast<int>(sec.get_int("from"));
            d.to = static_cast<int>(sec.get_int("to"));
            d.rate = sec.get_quantity("rate", Dimension::kFrequency);
            if (d.rate < 0.0) throw ConfigError("[" + name + "] rate: must be >= 0");
            scheme.decay_channels.push_back(d);
        } else {
            throw ConfigError("unknown section [" + name + "] in scheme file");
        }
        sec.require_all_consumed();
    }

    int expected = 1;
    for (const auto& [n, level] : levels) {
        if (n != expected) throw ConfigError("scheme levels must be numbered 1..K without gaps (missing level_" +
                                             std::to_string(expected) + ")");
        scheme.levels.push_back(level);
        ++expected;
    }
    if (scheme.levels.empty()) throw ConfigError("scheme file defines no levels");
    const int k = scheme.level_count();
    for (const auto& t : scheme.rf_transitions) {
        if (t.lower < 1 || t.upper > k || t.lower >= t.upper) {
            throw ConfigError("transition " + std::to_string(t.lower) + "<->" + std::to_string(t.upper) +
                              ": endpoints must satisfy 1 <= lower < upper <= K");
        }
    }
    for (const auto& d : scheme.decay_channels) {
        if (d.from < 1 || d.from > k || d.to < 1 || d.to > k || d.from == d.to) {
            throw ConfigError("decay " + std::to_string(d.from) + "->" + std::to_string(d.to) +
                              ": endpoints out of range");
        }
    }
    return scheme;
}

LevelScheme load_scheme(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scheme file '" + path + "'");
    try {
        return parse_scheme(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_scheme(std::ostream& out, const LevelScheme& scheme) {
    out << "[scheme]\narchitecture = " << to_string(scheme.architecture) << "\n";
    for (const auto& l : scheme.levels) {
        out << "\n[level_" << l.index << "]\nparity = " << (l.parity > 0 ? "+1" : "-1") << "\nlabel = " << l.label
            << "\n";
    }
    int i = 1;
    for (const auto& t : scheme.rf_transitions) {
        out << "\n[transition_" << i++ << "]\n";
        if (t.channel > 0) out << "channel = " << t.channel << "\n";
        out << "lower = " << t.lower << "\nupper = " << t.upper << "\n"
            << "carrier_frequency_ghz = " << fmt(units::to_mhz(t.carrier_frequency) * 1e-3) << "\n"
            << "dipole_moment_ea0 = " << fmt(t.dipole_moment) << "\n"
            << "detuning_khz = " << fmt(units::to_mhz(t.detuning) * 1e3) << "\n";
        if (!t.application_band.empty()) out << "band = " << t.application_band << "\n";
    }
    i = 1;
    for (const auto& d : scheme.decay_channels) {
        out << "\n[decay_" << i++ << "]\nfrom = " << d.from << "\nto = " << d.to
            << "\nrate_khz = " << fmt(units::to_mhz(d.rate) * 1e3) << "\n";
    }
}

}  // namespace rydberg
