#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "d2dcache/experiment.hpp"

namespace d2dcache {

namespace {

std::string default_output_path(const std::string& scenario) {
    const char* dir = std::getenv("D2DCACHE_OUT_DIR");
    std::string base = dir && *dir ? std::string(dir) : std::string(".");
    if (!base.empty() && base.back() != '/') base += '/';
    return base + scenario + ".csv";
}

void apply_sets(ScenarioConfig& config, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw config_error("--set expects key=value, got: " + kv);
        set_config_field(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"delay-aware D2D caching simulator"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list the registered scenarios");

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write a result CSV");
    std::string scenario_name;
    std::string config_path;
    std::string out_path;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    run_cmd->add_option("scenario", scenario_name, "registered scenario name")->required();
    run_cmd->add_option("--config", config_path, "config file applied over the scenario defaults");
    run_cmd->add_option("--set", sets, "override one config leaf, key=value; repeatable");
    run_cmd->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
        seed_given = true;
    });
    run_cmd->add_option("--out", out_path, "output CSV path (default $D2DCACHE_OUT_DIR or .)");
    run_cmd->add_option("--threads", threads, "worker threads for sweep points and replicates");

    auto* validate_cmd = app.add_subcommand("validate", "validate a config file");
    std::string validate_path;
    validate_cmd->add_option("config", validate_path, "config file to check")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (list_cmd->parsed()) {
            for (const auto& d : registered_scenarios())
                std::cout << d.name << "\n    " << d.description << "\n";
            return 0;
        }
        if (validate_cmd->parsed()) {
            const ScenarioConfig config = parse_config_file(validate_path, ScenarioConfig{});
            if (const auto* d = find_scenario(config.scenario)) {
                ScenarioConfig merged = parse_config_file(validate_path, d->config);
                validate_config(merged);
            } else {
                validate_config(config);
            }
            std::cout << "ok\n";
            return 0;
        }
        // run
        const ScenarioDescriptor* descriptor = find_scenario(scenario_name);
        if (!descriptor) throw config_error("unknown scenario: " + scenario_name);
        ScenarioConfig config = descriptor->config;
        if (!config_path.empty()) config = parse_config_file(config_path, config);
        apply_sets(config, sets);
        if (seed_given) config.master_seed = seed;
        if (threads > 0) config.threads = threads;
        validate_config(config);

        const ResultTable table = run_scenario(config);
        const std::string path = out_path.empty() ? default_output_path(config.scenario) : out_path;
        emit_csv(table, path);
        std::cout << path << "\n";
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace d2dcache
