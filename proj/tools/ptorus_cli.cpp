#include "ptorus/cli.hpp"
#include "ptorus/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Transfer operators of piecewise expanding torus maps"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    for (const char* name : {"propagate", "check", "bounds", "duality", "spectrum"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value run configuration")->required();
        sub->add_option("--out", out, "output directory root");
        sub->add_option("--seed", seed, "seed for random observables");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ptorus::exit_pass : ptorus::exit_error;
    }

    ptorus::RunConfig cfg;
    try {
        cfg = ptorus::load_config(config_path);
        if (out) cfg.out = *out;
        if (seed) cfg.seed = *seed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ptorus::exit_error;
    }
    return ptorus::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
