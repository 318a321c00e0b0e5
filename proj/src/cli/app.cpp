// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "rydberg/errors.hpp"

namespace rydberg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool dry_run = false;
    std::string scheme;  // validate-scheme argument
};

void add_globals(CLI::App& app, Options& o) {
    app.add_option("--config", o.config, "run configuration file (INI)");
    app.add_option("--out", o.out_dir, "output directory");
    app.add_option("--seed", o.seed, "random seed, overrides [run] seed");
    app.add_option("--workers", o.workers, "worker threads, overrides [run] workers")->check(CLI::Range(1u, 1024u));
    app.add_flag("--dry-run", o.dry_run, "validate the configuration and print the resolved parameters");
}

void write_manifest(const Context& ctx, const std::string& command, const RunConfig& cfg) {
    json m;
    m["command"] = command;
    m["config"] = cfg.source;
    m["seed"] = cfg.seed;
    m["workers"] = cfg.workers;
    m["parameters"] = json::parse(describe(cfg));
    m["outputs"] = ctx.outputs;
    m["warnings"] = ctx.warnings;
    m["results"] = ctx.results;
    std::ofstream f(ctx.out_dir / "run_manifest.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (ctx.out_dir / "run_manifest.json").string());
    f << m.dump(2) << '\n';
}

int execute(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
    RunConfig cfg = load_run_config_file(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.workers) cfg.workers = *o.workers;

    LevelScheme to_validate = cfg.full_scheme;
    if (command == "validate-scheme" && !o.scheme.empty()) {
        if (!fs::exists(o.scheme)) throw ConfigError("scheme file not found: " + o.scheme);
        to_validate = load_scheme(o.scheme);
    }
    if (command != "validate-scheme") {
        const auto report = validate_scheme(cfg.full_scheme);
        if (!report.valid()) {
            std::ostringstream msg;
            msg << "scheme " << cfg.scheme_source << " is invalid: " << report;
            throw ConfigError(msg.str());
        }
    }

    if (o.dry_run) {
        out << describe(cfg) << '\n';
        return kExitSuccess;
    }

    fs::create_directories(o.out_dir);
    Context ctx{cfg, fs::path(o.out_dir), out, err, {}, {}, json::object()};
    int code = kExitSuccess;
    if (command == "steady-state") {
        cmd_steady_state(ctx);
    } else if (command == "dynamics") {
        cmd_dynamics(ctx);
    } else if (command == "fidelity-map") {
        cmd_fidelity_map(ctx);
    } else if (command == "optimize-lo") {
        cmd_optimize_lo(ctx);
    } else if (command == "waveform") {
        cmd_waveform(ctx);
    } else if (command == "sumrate") {
        cmd_sumrate(ctx);
    } else if (command == "validate-scheme") {
        if (!cmd_validate_scheme(ctx, to_validate)) code = kExitConfigError;
    }
    write_manifest(ctx, command, cfg);
    return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rydberg-atom multi-band receiver simulator", "rydberg_sim"};
    app.require_subcommand(1);
    Options o;
    add_globals(app, o);

    const std::pair<const char*, const char*> commands[] = {
        {"steady-state", "trajectory, numerical and closed-form steady states and their fidelity"},
        {"dynamics", "density-matrix trajectory from the ground state"},
        {"fidelity-map", "fidelity landscape over two RF Rabi axes, one CSV per panel"},
        {"optimize-lo", "exhaustive search for the LO operating point"},
        {"waveform", "photodetector waveform, spectrogram and IQ-demodulated baseband"},
        {"sumrate", "ergodic sum rate of the hybrid, CRS and PRS architectures"},
        {"validate-scheme", "parity and loop checks of a level-scheme file"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        if (std::string(name) == "validate-scheme") {
            sub->add_option("scheme", o.scheme, "scheme file (default: the configured scheme)");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return execute(command, o, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const PreconditionError& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("rydberg_sim");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rydberg::cli
