// SPDX-License-Identifier: Apache-2.0
#include "rydberg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rydberg/constants.hpp"
#include "rydberg/errors.hpp"

namespace rydberg::config {

namespace {

struct Suffix {
    const char* text;
    std::function<double(double)> convert;
};

const std::vector<Suffix>& suffixes(Dimension dim) {
    static const std::vector<Suffix> frequency = {
        {"_mhz", [](double v) { return units::from_mhz(v); }},
        {"_khz", [](double v) { return units::from_khz(v); }},
        {"_ghz", [](double v) { return units::from_ghz(v); }},
        {"_hz", [](double v) { return units::from_hz(v); }},
    };
    static const std::vector<Suffix> time = {
        {"_us", [](double v) { return v; }},
        {"_ns", [](double v) { return v * 1e-3; }},
        {"_ms", [](double v) { return v * 1e3; }},
        {"_s", [](double v) { return v * 1e6; }},
    };
    static const std::vector<Suffix> power = {
        {"_w", [](double v) { return v; }},
        {"_mw", [](double v) { return v * 1e-3; }},
        {"_dbm", [](double v) { return units::dbm_to_watt(v); }},
    };
    static const std::vector<Suffix> length = {
        {"_m", [](double v) { return v; }},
        {"_cm", [](double v) { return v * 1e-2; }},
        {"_mm", [](double v) { return v * 1e-3; }},
        {"_nm", [](double v) { return v * 1e-9; }},
    };
    static const std::vector<Suffix> density = {
        {"_per_m3", [](double v) { return v; }},
        {"_per_cm3", [](double v) { return v * 1e6; }},
    };
    static const std::vector<Suffix> field = {
        {"_v_per_m", [](double v) { return v; }},
    };
    static const std::vector<Suffix> dipole = {
        {"_ea0", [](double v) { return v; }},
    };
    static const std::vector<Suffix> temperature = {
        {"_k", [](double v) { return v; }},
    };
    static const std::vector<Suffix> bandwidth = {
        {"_hz", [](double v) { return v; }},
        {"_khz", [](double v) { return v * 1e3; }},
        {"_mhz", [](double v) { return v * 1e6; }},
    };
    static const std::vector<Suffix> current = {
        {"_a", [](double v) { return v; }},
        {"_ma", [](double v) { return v * 1e-3; }},
        {"_ua", [](double v) { return v * 1e-6; }},
        {"_na", [](double v) { return v * 1e-9; }},
    };
    static const std::vector<Suffix> responsivity = {
        {"_a_per_w", [](double v) { return v; }},
    };
    static const std::vector<Suffix> angle = {
        {"_rad", [](double v) { return v; }},
        {"_deg", [](double v) { return v * std::numbers::pi / 180.0; }},
    };
    switch (dim) {
        case Dimension::kCurrent: return current;
        case Dimension::kResponsivity: return responsivity;
        case Dimension::kAngle: return angle;
        case Dimension::kFrequency: return frequency;
        case Dimension::kTime: return time;
        case Dimension::kPower: return power;
        case Dimension::kLength: return length;
        case Dimension::kDensity: return density;
        case Dimension::kField: return field;
        case Dimension::kDipole: return dipole;
        case Dimension::kTemperature: return temperature;
        case Dimension::kBandwidth: return bandwidth;
    }
    return frequency;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::optional<double> to_double(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) items.push_back(trim(item));
    return items;
}

}  // namespace

Section::Section(std::string name, std::vector<std::pair<std::string, std::string>> entries)
    : name_(std::move(name)), entries_(std::move(entries)) {}

std::optional<std::string> Section::lookup(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            consumed_.insert(key);
            return v;
        }
    }
    return std::nullopt;
}

void Section::fail(const std::string& key, const std::string& message) const {
    throw ConfigError("[" + name_ + "] " + key + ": " + message);
}

bool Section::has(const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

std::string Section::get_string(const std::string& key) const {
    auto v = lookup(key);
    if (!v) fail(key, "required key is missing");
    return trim(*v);
}

std::string Section::get_string(const std::string& key, const std::string& fallback) const {
    auto v = lookup(key);
    return v ? trim(*v) : fallback;
}

double Section::get_double(const std::string& key) const {
    auto v = lookup(key);
    if (!v) fail(key, "required key is missing");
    auto d = to_double(*v);
    if (!d) fail(key, "cannot parse '" + *v + "' as a number");
    return *d;
}

double Section::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Section::get_int(const std::string& key) const {
    auto v = lookup(key);
    if (!v) fail(key, "required key is missing");
    std::string t = trim(*v);
    if (t.size() > 1 && t[0] == '+') t.erase(0, 1);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || t[0] == '+' || ec != std::errc() || ptr != t.data() + t.size()) {
        fail(key, "cannot parse '" + *v + "' as an integer");
    }
    return value;
}

long long Section::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool Section::get_bool(const std::string& key, bool fallback) const {
    auto v = lookup(key);
    if (!v) return fallback;
    std::string t = trim(*v);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    fail(key, "cannot parse '" + *v + "' as a boolean");
}

std::vector<double> Section::get_list(const std::string& key) const {
    auto v = lookup(key);
    if (!v) fail(key, "required key is missing");
    std::vector<double> out;
    for (const auto& item : split_list(*v)) {
        auto d = to_double(item);
        if (!d) fail(key, "cannot parse list item '" + item + "' as a number");
        out.push_back(*d);
    }
    return out;
}

std::optional<std::pair<std::string, double>> Section::find_quantity_key(const std::string& base,
                                                                         Dimension dim) const {
    std::optional<std::pair<std::string, double>> found;
    for (const auto& s : suffixes(dim)) {
        const std::string key = base + s.text;
        if (!has(key)) continue;
        if (found) fail(key, "conflicts with " + found->first + " (give the quantity once)");
        found = std::make_pair(key, 0.0);
    }
    return found;
}

bool Section::has_quantity(const std::string& base, Dimension dim) const {
    return find_quantity_key(base, dim).has_value();
}

double Section::get_quantity(const std::string& base, Dimension dim) const {
    auto found = find_quantity_key(base, dim);
    if (!found) fail(base + "_*", "required quantity is missing (accepted units: " + describe(dim) + ")");
    const auto values = get_quantity_list(base, dim);
    if (values.size() != 1) fail(found->first, "expected a single value");
    return values.front();
}

double Section::get_quantity(const std::string& base, Dimension dim, double fallback) const {
    return has_quantity(base, dim) ? get_quantity(base, dim) : fallback;
}

std::vector<double> Section::get_quantity_list(const std::string& base, Dimension dim) const {
    auto found = find_quantity_key(base, dim);
    if (!found) fail(base + "_*", "required quantity is missing (accepted units: " + describe(dim) + ")");
    const std::string& key = found->first;
    const std::string suffix = key.substr(base.size());
    const auto& table = suffixes(dim);
    const auto it = std::find_if(table.begin(), table.end(), [&](const Suffix& s) { return suffix == s.text; });
    std::vector<double> out;
    for (double v : get_list(key)) out.push_back(it->convert(v));
    return out;
}

void Section::require_all_consumed() const {
    for (const auto& [k, v] : entries_) {
        if (!consumed_.count(k)) fail(k, "unknown key");
    }
}

Document Document::parse(std::istream& in, const std::string& source_name) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(source_name + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    Document doc;
    doc.source_ = source_name;
    for (const auto& [name, node] : tree) {
        if (node.empty() && !node.data().empty()) {
            throw ConfigError(source_name + ": key '" + name + "' appears outside any [section]");
        }
        std::vector<std::pair<std::string, std::string>> entries;
        for (const auto& [key, value] : node) {
            if (!value.empty()) throw ConfigError(source_name + ": [" + name + "] " + key + ": nested value");
            entries.emplace_back(trim(key), value.data());
        }
        doc.sections_.emplace_back(name, std::move(entries));
    }
    return doc;
}

Document Document::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in, path);
}

bool Document::has_section(const std::string& name) const {
    return std::any_of(sections_.begin(), sections_.end(), [&](const Section& s) { return s.name() == name; });
}

const Section& Document::section(const std::string& name) const {
    requested_.insert(name);
    for (const auto& s : sections_) {
        if (s.name() == name) return s;
    }
    static const Section empty;
    return empty;
}

std::vector<std::string> Document::section_names() const {
    std::vector<std::string> names;
    for (const auto& s : sections_) names.push_back(s.name());
    return names;
}

std::vector<std::string> Document::unrequested_sections() const {
    std::vector<std::string> names;
    for (const auto& s : sections_) {
        if (!requested_.count(s.name())) names.push_back(s.name());
    }
    return names;
}

std::string describe(Dimension dim) {
    std::string out;
    for (const auto& s : suffixes(dim)) {
        if (!out.empty()) out += ", ";
        out += s.text;
    }
    return out;
}

}  // namespace rydberg::config
