#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conjloc/cli.hpp"
#include "conjloc/errors.hpp"

using namespace conjloc;

int main(int argc, char** argv) {
    CLI::App app{"conjloc: conjugate loci, their cusps and bifurcations"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::vector<std::string> overrides;
    for (const char* name : {"locus", "contours", "path-scan", "region-map", "beta"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "flat key=value file");
        sub->add_option("--set", overrides, "override one key, k=v")->take_all();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kConfigError;
    }

    cli::RunConfig cfg;
    try {
        const auto* sub = app.get_subcommands().front();
        cli::KeyValues kv;
        if (!config_path.empty()) kv = cli::load_config_file(config_path);
        for (const auto& o : overrides) cli::apply_override(kv, o);
        cfg = cli::resolve(cli::mode_from_string(sub->get_name()), kv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n" << app.help();
        return cli::kConfigError;
    }

    try {
        return cli::run(cfg, std::cerr);
    } catch (const PreconditionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return cli::kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return cli::kNumericalFailure;
    }
}
