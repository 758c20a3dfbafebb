#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "kdva/cli/commands.hpp"
#include "kdva/cli/config.hpp"

#ifndef KDVA_VERSION
#define KDVA_VERSION "v0.1.0"
#endif

int main(int argc, char** argv) {
    using namespace kdva::cli;

    CLI::App app{"Full solver, regular and KdV asymptotics for the stiff coupled-string system"};
    std::string command;
    std::string config_path;
    RunOptions opts;
    opts.version = KDVA_VERSION;
    app.add_option("command", command, "simulate-full | simulate-regular | simulate-kdv | compare | sweep | verify-derivation")
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--out-dir", opts.out_dir, "directory for relative output paths");
    app.add_flag("--quiet", opts.quiet, "suppress informational output");
    app.add_flag("--timing", opts.timing, "record wall-clock seconds in sweep summaries");
    app.set_version_flag("--version", KDVA_VERSION);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << failure_line("ValidationError", "command-line", e.what()) << "\n";
        return exit_validation;
    }

    ExperimentConfig cfg;
    try {
        std::ifstream file(config_path, std::ios::binary);
        if (!file) kdva::fail(kdva::ErrorKind::ParseError, "cannot read config file " + config_path);
        std::ostringstream text;
        text << file.rdbuf();
        cfg = parse_config(text.str());
    } catch (const kdva::Error& e) {
        std::cerr << failure_line(kdva::to_string(e.kind()), e.field(), e.what()) << "\n";
        return exit_code(e.kind());
    }
    return run_command(command, cfg, opts, std::cout, std::cerr);
}
