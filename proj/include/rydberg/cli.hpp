// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rydberg/comms.hpp"
#include "rydberg/config.hpp"
#include "rydberg/dsp.hpp"
#include "rydberg/fidelity.hpp"
#include "rydberg/receiver.hpp"

namespace rydberg::cli {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitConfigError = 1,
    kExitNumericalFailure = 2,
};

struct FidelityMapConfig {
    int axis_x = 2;
    int axis_y = 3;
    double min = 0.0;                 // rad/us
    double max = 0.0;                 // rad/us
    int resolution = 21;
    /// Values of the two channels not on an axis, ascending channel order.
    /// Empty means one panel at the [drive] values.
    std::vector<std::pair<double, double>> panels;
};

struct OptimizeConfig {
    double min = 0.0;        // rad/us
    double max = 0.0;
    double step = 0.0;
    double sum_max = 0.0;
    double half_width = 0.0;
    int samples_per_axis = 3;
    std::optional<std::array<double, 4>> reference;  // point checked against the plateau
    double plateau_tolerance = 1e-5;
};

struct WaveformConfig {
    double duration_us = 100.0;
    double sample_rate_mhz = 10.0;
    RfSignalSpec signal;
    double noise_sigma = 0.0;  // A
    std::size_t spectrogram_segment = 1024;
    std::size_t spectrogram_hop = 256;
    dsp::Window window = dsp::Window::kHann;
    DemodOptions demod;
};

struct SumRateConfig {
    std::string rabi_set_name = "set2";    // "custom" when given as numbers
    std::array<double, 4> rabi_set{};      // rad/us
    std::vector<double> powers;            // W, power sweep
    double sweep_bandwidth = 1e5;          // Hz, held during the power sweep
    std::vector<double> bandwidths;        // Hz, bandwidth sweep
    double sweep_power = 1e-4;             // W, held during the bandwidth sweep
    double temperature = 300.0;
    double beta = 1.0;
    std::size_t monte_carlo_samples = 0;
    std::vector<Architecture> architectures{Architecture::kHybrid, Architecture::kCrs, Architecture::kPrs};
    /// CRS / PRS LO from the [optimize] grid search; false reuses the Rabi set
    /// with their unused channels zeroed. The hybrid always uses the Rabi set.
    bool optimize_baselines = true;
};

struct RunConfig {
    std::string source = "<defaults>";
    std::string scheme_source = "bundled";
    LevelScheme scheme;           // restricted to `architecture`, decays applied
    LevelScheme full_scheme;      // all RF transitions of the scheme file, decays applied
    Architecture architecture = Architecture::kHybrid;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    DriveConfig drive = DriveConfig::operating_point();
    bool use_scheme_detunings = false;

    NumericalRoute route = NumericalRoute::kNullSpace;
    EvolveOptions evolve;
    bool all_coherences = false;

    FidelityMapConfig fidelity_map;
    OptimizeConfig optimize;
    VaporCellParams cell;
    ProbeKind probe = ProbeKind::kNumerical;
    WaveformConfig waveform;
    SumRateConfig sumrate;

    NumericalModel numerical_model() const;
};

/// Reads every known section so unknown keys and sections fail early
/// regardless of the subcommand. Relative paths resolve against `base_dir`.
RunConfig load_run_config(const config::Document& doc, const std::filesystem::path& base_dir);
/// Empty path gives the built-in defaults.
RunConfig load_run_config_file(const std::string& path);

/// Resolved parameters as pretty-printed JSON.
std::string describe(const RunConfig& cfg);

/// Full command line, argv[0] included. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rydberg::cli
