// wnlab: scenario runner for weak-null asymptotic systems and their wave
// equations. Exit codes: 0 ok, 1 error, 2 a classification failed.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "wnlab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"wnlab - asymptotic systems, Condition 1 sweeps and spherical wave runs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    auto* run = app.add_subcommand("run", "execute a scenario config and write report.json");
    run->add_option("--config", config_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    auto* out_opt = run->add_option("--output", output_dir, "output directory (overrides output_dir)");
    auto* seed_opt = run->add_option("--seed", seed, "seed override");
    run->add_option("--threads", threads, "parallelism cap")->check(CLI::Range(1u, 1024u));

    auto* list = app.add_subcommand("list", "list built-in systems");

    auto* validate = app.add_subcommand("validate-config", "parse a scenario config without running it");
    validate->add_option("--config", config_path, "scenario JSON file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            std::cout << wnlab::list_catalogue();
            return 0;
        }
        const auto cfg = wnlab::load_config(config_path);
        if (validate->parsed()) {
            std::cout << "ok: " << cfg.system_name << ", action " << wnlab::to_string(cfg.action) << '\n';
            return 0;
        }
        wnlab::RunOverrides ov;
        if (*out_opt) ov.output_dir = output_dir;
        if (*seed_opt) ov.seed = seed;
        ov.threads = threads;
        const auto result = wnlab::run(cfg, ov);
        const auto& rep = result.report;
        std::cout << "action " << rep["action"].get<std::string>() << ": "
                  << (rep["pass"].get<bool>() ? "pass" : "FAIL") << '\n';
        if (rep["results"].contains("verdict"))
            std::cout << "verdict " << rep["results"]["verdict"].get<std::string>() << '\n';
        std::cout << "wrote";
        for (const auto& a : result.artifacts) std::cout << ' ' << a;
        std::cout << " to " << ov.output_dir.value_or(cfg.output_dir) << '\n';
        return result.exit_code;
    } catch (const wnlab::ConfigError& e) {
        std::cerr << "config error at " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
