// ramsey-forge: run, sweep, validate and traj subcommands.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ramsey_forge/coloring.hpp"
#include "ramsey_forge/pipeline.hpp"
#include "ramsey_forge/trajectories.hpp"
#include "ramsey_forge/validator.hpp"

using namespace ramsey_forge;

namespace {

struct RunFlags {
    std::uint32_t n = 0;
    double epsilon = 0.1;
    std::uint64_t seed = 1;
    std::string on_no_pair = "skip";
    std::string stop = "natural";
    std::uint64_t checkpoint_every = 0;
    std::uint64_t phase2_budget = 1'000'000;
    std::string mode = "auto";
    std::string out = "ramsey-forge-out";
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--n", f.n, "number of vertices (>= 4)")->required();
    cmd->add_option("--epsilon", f.epsilon, "color-budget slack in (0, 1)")->capture_default_str();
    cmd->add_option("--on-no-pair", f.on_no_pair, "terminate | skip")->capture_default_str();
    cmd->add_option("--stop", f.stop, "natural | number of Phase-1 steps")->capture_default_str();
    cmd->add_option("--checkpoint-every", f.checkpoint_every, "steps between telemetry snapshots (0: none)")
        ->capture_default_str();
    cmd->add_option("--phase2-budget", f.phase2_budget, "resampling round budget")->capture_default_str();
    cmd->add_option("--mode", f.mode, "validation: auto | exhaustive | pairwise | sampled")->capture_default_str();
    cmd->add_option("--out", f.out, "output directory")->capture_default_str();
}

RunOptions to_options(const RunFlags& f) {
    RunOptions o;
    o.config.n = f.n;
    o.config.epsilon = f.epsilon;
    o.config.seed = f.seed;
    o.config.on_no_pair = parse_no_pair_policy(f.on_no_pair);
    if (f.stop == "natural") {
        o.config.stop = StopCriterion::natural();
    } else {
        std::size_t used = 0;
        const unsigned long long steps = std::stoull(f.stop, &used);
        if (used != f.stop.size()) throw std::invalid_argument("--stop must be 'natural' or a step count");
        o.config.stop = StopCriterion::steps(steps);
    }
    o.config.checkpoint_every = f.checkpoint_every;
    o.config.phase2_budget = f.phase2_budget;
    o.mode = parse_validation_mode(f.mode);
    o.out_dir = f.out;
    o.config.validate();
    return o;
}

std::vector<std::uint64_t> parse_seeds(const std::string& list, std::uint64_t count) {
    std::vector<std::uint64_t> seeds;
    if (!list.empty()) {
        std::stringstream ss(list);
        for (std::string item; std::getline(ss, item, ',');) seeds.push_back(std::stoull(item));
    } else {
        for (std::uint64_t s = 1; s <= count; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw std::invalid_argument("no seeds given");
    return seeds;
}

int cmd_run(const RunFlags& f) {
    const RunOptions options = to_options(f);
    const RunResult r = run_pipeline(options);
    write_run_outputs(options.out_dir, options, r);
    std::cout << report_json(options, r).dump(2) << '\n';
    return r.exit_code;
}

int cmd_sweep(const RunFlags& f, const std::string& seed_list, std::uint64_t seed_count) {
    const RunOptions options = to_options(f);
    const SweepResult r = run_sweep(options, parse_seeds(seed_list, seed_count));
    std::cout << r.aggregate.dump(2) << '\n';
    return r.exit_code;
}

int cmd_validate(const std::string& path, const std::string& mode) {
    Coloring c;
    try {
        c = load_coloring(path);
    } catch (const std::runtime_error& e) {
        std::cerr << "cannot read coloring: " << e.what() << '\n';
        return exit_invalid;
    }
    nlohmann::json j;
    if (!c.is_complete()) {
        std::cerr << "coloring is incomplete\n";
        return exit_invalid;
    }
    const std::vector<Violation> violations = verify_45(c, parse_validation_mode(mode));
    const ComponentCensus cs = census(c);
    j["violations"] = violations.size();
    j["examples"] = violations_json(violations);
    j["x0"] = cs.x0;
    j["x1"] = cs.x1;
    j["x2"] = cs.x2;
    j["colors_used"] = cs.colors_used;
    int code = violations.empty() ? exit_ok : exit_invalid;
    try {
        j["lb_slack"] = lower_bound_certificate(c).slack;
    } catch (const std::logic_error& e) {
        j["lb_slack"] = nullptr;
        j["lb_error"] = e.what();
        code = exit_invalid;
    }
    std::cout << j.dump(2) << '\n';
    return code;
}

int cmd_traj(double epsilon, std::size_t points, double from, double to, double n) {
    const double s = special_probability(epsilon);
    const std::vector<double> grid = uniform_grid(from, to, points);
    if (n > 0.0) {
        TrajectoryParams params = TrajectoryParams::make(n, epsilon);
        params.enforce_t_max = false;
        write_trajectory_csv(std::cout, grid, s, &params);
    } else {
        write_trajectory_csv(std::cout, grid, s);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-phase randomized (4,5)-coloring of K_n: simulate, track, verify"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run = app.add_subcommand("run", "one seeded run: Phase 1, Phase 2, validation");
    add_run_flags(run, run_flags);
    run->add_option("--seed", run_flags.seed, "64-bit seed")->capture_default_str();

    RunFlags sweep_flags;
    std::string seed_list;
    std::uint64_t seed_count = 5;
    auto* sweep = app.add_subcommand("sweep", "independent runs over several seeds");
    add_run_flags(sweep, sweep_flags);
    sweep->add_option("--seeds", seed_list, "comma-separated seeds");
    sweep->add_option("--seed-count", seed_count, "use seeds 1..N when --seeds is absent")->capture_default_str();

    std::string path, validate_mode = "auto";
    auto* validate = app.add_subcommand("validate", "check a coloring file");
    validate->add_option("path", path, "coloring file")->required();
    validate->add_option("--mode", validate_mode, "auto | exhaustive | pairwise | sampled")->capture_default_str();

    double traj_eps = 0.1, traj_from = 0.01, traj_to = 0.15, traj_n = 0.0;
    std::size_t traj_points = 50;
    auto* trajc = app.add_subcommand("traj", "trajectory table as CSV");
    trajc->add_option("--epsilon", traj_eps)->capture_default_str();
    trajc->add_option("--points", traj_points)->capture_default_str();
    trajc->add_option("--from", traj_from)->capture_default_str();
    trajc->add_option("--to", traj_to)->capture_default_str();
    trajc->add_option("--n", traj_n, "add log error functions for this n")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*run) return cmd_run(run_flags);
        if (*sweep) return cmd_sweep(sweep_flags, seed_list, seed_count);
        if (*validate) return cmd_validate(path, validate_mode);
        if (*trajc) return cmd_traj(traj_eps, traj_points, traj_from, traj_to, traj_n);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
