#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fracns/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fracns: constrained spectral solver for fractional Schrodinger ground states"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int threads = 1;
    bool dump_fields = false;
    bool traces = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "path to the JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (created if missing)")->required();
        sub->add_option("--threads", threads, "worker threads for multistart batches")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--dump-fields", dump_fields, "write solution fields as raw float64 + sidecar");
        sub->add_flag("--traces", traces, "write per-iteration solver traces");
    };

    add_common(app.add_subcommand("validate", "check nonlinearity growth and potential shape"));
    add_common(app.add_subcommand("solve", "one constrained minimization"));
    add_common(app.add_subcommand("landscape",
                                  "ground-state energy vs mass, structural checks, eps sweep"));
    add_common(app.add_subcommand("multiplicity", "localized multi-well experiment"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and friends exit 0; every real usage problem maps to the
        // config-error code so callers see one contract.
        int code = app.exit(e);
        return code == 0 ? 0 : fracns::exit_config_error;
    }
    std::string command = app.get_subcommands().front()->get_name();

    fracns::RunConfig cfg;
    try {
        cfg = fracns::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fracns::exit_config_error;
    }
    cfg.solver.threads = threads;

    fracns::RunPaths paths{out_dir, dump_fields, traces};
    std::string error;
    int code = fracns::run_command(command, cfg, paths, error);
    if (code != fracns::exit_ok)
        std::cerr << "error: " << error << '\n';
    else
        std::cout << command << ": outputs written to " << out_dir << '\n';
    return code;
}
