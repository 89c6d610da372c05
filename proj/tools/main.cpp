// Command-line front end: run a scenario, validate a scenario file, or emit
// one of the built-in demo scenarios as JSON.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "swarmopt/runner.hpp"
#include "swarmopt/scenario.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<double> rho, std::optional<int> max_rounds,
            std::optional<std::uint64_t> seed) {
    swarmopt::ScenarioConfig cfg = swarmopt::load_scenario(scenario_path);
    if (rho) cfg.admm.rho = *rho;
    if (max_rounds) cfg.admm.max_rounds = *max_rounds;
    if (seed) cfg.channel.seed = *seed;
    cfg.validate_or_throw();  // overrides may have broken an invariant

    const swarmopt::RunResult result = swarmopt::mpc_loop(cfg);
    swarmopt::write_outputs(result, out_dir);

    std::printf("scenario: %s\n", cfg.name.c_str());
    std::printf("mpc steps: %d (%s)\n", result.steps_executed,
                result.all_reached ? "all goals reached" : "step limit hit");
    double min_dist = std::numeric_limits<double>::infinity();
    for (const double d : result.min_distance) min_dist = std::min(min_dist, d);
    if (std::isfinite(min_dist)) std::printf("min pairwise distance: %.4f m\n", min_dist);
    std::printf("outputs written to %s\n", out_dir.c_str());
    return result.all_reached ? 0 : 2;
}

int cmd_validate(const std::string& scenario_path) {
    const swarmopt::ScenarioConfig cfg = swarmopt::load_scenario(scenario_path);
    std::printf("ok: %d agent(s), %d edge(s), horizon %d\n", cfg.n_agents,
                static_cast<int>(cfg.graph_edges.size()), cfg.mpc.horizon);
    return 0;
}

int cmd_demo(const std::string& name, const std::string& out_path) {
    const swarmopt::ScenarioConfig cfg = swarmopt::builtin_scenario(name);
    const std::string text = swarmopt::scenario_to_json(cfg);
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::FILE* f = std::fopen(out_path.c_str(), "w");
        if (!f) throw swarmopt::Error("cannot open " + out_path + " for writing");
        std::fwrite(text.data(), 1, text.size(), f);
        if (std::fclose(f) != 0) throw swarmopt::Error("failed to finish writing " + out_path);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed multi-drone trajectory optimization runner"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", demo_name, demo_out;
    std::optional<double> rho;
    std::optional<int> max_rounds;
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "Run a scenario and write output files");
    run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Output directory (default: out)");
    run->add_option("--rho", rho, "Override the consensus penalty parameter");
    run->add_option("--max-rounds", max_rounds, "Override the per-step round limit");
    run->add_option("--seed", seed, "Override the channel RNG seed");

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    CLI::App* demo = app.add_subcommand("demo", "Emit a built-in scenario as JSON");
    std::string names;
    for (const auto& n : swarmopt::builtin_scenario_names()) {
        names += names.empty() ? n : ", " + n;
    }
    demo->add_option("--name", demo_name, "One of: " + names)->required();
    demo->add_option("--out", demo_out, "Write to this file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scenario_path, out_dir, rho, max_rounds, seed);
        if (validate->parsed()) return cmd_validate(scenario_path);
        if (demo->parsed()) return cmd_demo(demo_name, demo_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
