// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rydberg::config {

/// Physical dimension of a configuration quantity. Each dimension accepts a
/// fixed set of key suffixes, e.g. a Frequency "omega_p" may be written as
/// omega_p_mhz, omega_p_khz, omega_p_ghz or omega_p_hz.
enum class Dimension {
    kFrequency,  // -> rad/us (ordinary frequency scaled by 2*pi)
    kTime,       // -> us
    kPower,      // -> W
    kLength,     // -> m
    kDensity,    // -> m^-3
    kField,      // -> V/m
    kDipole,     // -> e*a0
    kTemperature,  // -> K
    kBandwidth,  // -> Hz (ordinary frequency, no 2*pi)
    kCurrent,    // -> A
    kResponsivity,  // -> A/W
    kAngle,      // -> rad
};

/// One [section] of a key-value file. Every accessor marks its key as
/// consumed so that leftovers can be reported as unknown keys.
class Section {
  public:
    Section() = default;
    Section(std::string name, std::vector<std::pair<std::string, std::string>> entries);

    const std::string& name() const { return name_; }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    bool has(const std::string& key) const;

    /// True if any unit-suffixed variant of `base` is present.
    bool has_quantity(const std::string& base, Dimension dim) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Comma-separated list of plain numbers.
    std::vector<double> get_list(const std::string& key) const;

    /// Quantity in internal units; exactly one suffixed key must exist.
    double get_quantity(const std::string& base, Dimension dim) const;
    double get_quantity(const std::string& base, Dimension dim, double fallback) const;

    /// Comma-separated quantity list, internal units.
    std::vector<double> get_quantity_list(const std::string& base, Dimension dim) const;
    bool has_quantity_list(const std::string& base, Dimension dim) const { return has_quantity(base, dim); }

    /// Throws ConfigError naming the first key no accessor asked for.
    void require_all_consumed() const;

  private:
    std::optional<std::string> lookup(const std::string& key) const;
    std::optional<std::pair<std::string, double>> find_quantity_key(const std::string& base, Dimension dim) const;
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

    std::string name_;
    std::vector<std::pair<std::string, std::string>> entries_;
    mutable std::set<std::string> consumed_;
};

/// Parsed INI-style document: `[section]` headers, `key = value` lines,
/// comments starting with ';' or '#'.
class Document {
  public:
    static Document parse(std::istream& in, const std::string& source_name = "<input>");
    static Document load(const std::string& path);

    bool has_section(const std::string& name) const;
    /// Returns an empty section if absent.
    const Section& section(const std::string& name) const;
    std::vector<std::string> section_names() const;
    const std::string& source() const { return source_; }

    /// Sections whose names were never requested through section().
    std::vector<std::string> unrequested_sections() const;

  private:
    std::string source_;
    std::vector<Section> sections_;
    mutable std::set<std::string> requested_;
};

/// Formats a value back to its suffixed representation for manifests.
std::string describe(Dimension dim);

}  // namespace rydberg::config
