// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydberg/cli.hpp"

namespace rydberg::cli {

/// Per-invocation state shared by the subcommands.
struct Context {
    const RunConfig& cfg;
    std::filesystem::path out_dir;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> outputs;   // file names relative to out_dir
    std::vector<std::string> warnings;
    nlohmann::json results = nlohmann::json::object();

    /// Opens out_dir/name for writing and records it as an output.
    std::ofstream open(const std::string& name);
    void warn(const std::string& message);
};

void cmd_steady_state(Context& ctx);
void cmd_dynamics(Context& ctx);
void cmd_fidelity_map(Context& ctx);
void cmd_optimize_lo(Context& ctx);
void cmd_waveform(Context& ctx);
void cmd_sumrate(Context& ctx);
/// Returns false when the scheme has violations.
bool cmd_validate_scheme(Context& ctx, const LevelScheme& scheme);

}  // namespace rydberg::cli
