#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ramsey_forge/coloring.hpp"
#include "ramsey_forge/coloring_state.hpp"
#include "ramsey_forge/config.hpp"
#include "ramsey_forge/phase1.hpp"
#include "ramsey_forge/phase2.hpp"
#include "ramsey_forge/random.hpp"
#include "ramsey_forge/telemetry.hpp"
#include "ramsey_forge/validator.hpp"

namespace ramsey_forge {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_invalid = 2, exit_budget = 3, exit_usage = 64 };

enum class InvariantChecks { none, checkpoints, every_step };

struct RunOptions {
    ProcessConfig config;
    ValidationMode mode = ValidationMode::automatic;
    std::string out_dir;  // empty: nothing is written
    SamplePlan plan;
    /// Extra telemetry checkpoints (step numbers) besides checkpoint_every.
    std::vector<std::uint64_t> checkpoint_steps;
    InvariantChecks invariants = InvariantChecks::checkpoints;
    Phase2Options phase2;
    bool keep_telemetry = true;
};

struct RunResult {
    Phase1Report phase1;
    std::optional<Phase2Report> phase2;
    bool budget_exceeded = false;
    std::vector<Violation> violations;
    ValidationMode mode_used = ValidationMode::exhaustive;
    ComponentCensus census;
    std::optional<LowerBoundReport> lower_bound;
    std::string lower_bound_error;
    std::uint32_t palette_total = 0;  // before any enlargement
    std::uint32_t colors_used = 0;
    double coverage = 0.0;            // Phase-1 colored fraction of edges
    std::vector<TelemetryRecord> telemetry;
    ProcessInvariants invariants;
    std::uint64_t invariant_checks = 0;
    Coloring coloring;
    double seconds = 0.0;
    int exit_code = exit_ok;
};

/**
 * init -> Phase 1 (telemetry and invariant checks at checkpoints) ->
 * random completion -> resampling -> validation.
 */
inline RunResult run_pipeline(const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const ProcessConfig& cfg = options.config;
    cfg.validate();
    RunResult result;
    RandomStream special_rng(cfg.seed, Substream::special_sets);
    RandomStream phase1_rng(cfg.seed, Substream::phase1);
    RandomStream phase2_rng(cfg.seed, Substream::phase2);
    RandomStream telemetry_rng(cfg.seed, Substream::telemetry);

    ColoringState state = ColoringState::init(cfg, special_rng);
    result.palette_total = state.palette().total;
    const std::set<std::uint64_t> extra(options.checkpoint_steps.begin(), options.checkpoint_steps.end());

    auto add_invariants = [&](const ColoringState& s) {
        const ProcessInvariants inv = check_process_invariants(s);
        result.invariants.large_components += inv.large_components;
        result.invariants.special_hit += inv.special_hit;
        result.invariants.alternating_cycles += inv.alternating_cycles;
        result.invariants.unpaired_cherries += inv.unpaired_cherries;
        ++result.invariant_checks;
    };
    auto observer = [&](const ColoringState& s, const StepOutcome&) {
        const std::uint64_t i = s.steps();
        const bool checkpoint = (cfg.checkpoint_every != 0 && i % cfg.checkpoint_every == 0) || extra.count(i) != 0;
        if (checkpoint && options.keep_telemetry) {
            auto records = snapshot(s, options.plan, telemetry_rng, cfg.epsilon);
            result.telemetry.insert(result.telemetry.end(), records.begin(), records.end());
        }
        if (options.invariants == InvariantChecks::every_step ||
            (options.invariants == InvariantChecks::checkpoints && checkpoint))
            add_invariants(s);
    };
    result.phase1 = run_phase1(state, phase1_rng, cfg, observer);
    if (options.invariants != InvariantChecks::none) add_invariants(state);
    result.coverage = static_cast<double>(state.colored_edges()) / static_cast<double>(state.edge_count());

    bool complete = true;
    if (state.colored_edges() < state.edge_count()) {
        random_complete(state, phase2_rng);
        Phase2Options p2 = options.phase2;
        p2.budget = cfg.phase2_budget;
        try {
            result.phase2 = resample(state, phase2_rng, p2, cfg.epsilon);
        } catch (const BudgetExceeded& e) {
            result.phase2 = e.report;
            result.budget_exceeded = true;
        }
    } else {
        state.begin_phase2();
        result.phase2 = Phase2Report{};
        result.phase2->success = true;
        result.phase2->reserved_final = state.palette().reserved;
    }
    result.coloring = state.to_coloring();
    complete = result.coloring.is_complete();
    result.census = census(result.coloring);
    result.colors_used = result.census.colors_used;
    if (complete) {
        result.mode_used = resolve_mode(options.mode, cfg.n);
        result.violations = verify_45(result.coloring, options.mode, cfg.seed);
        try {
            result.lower_bound = lower_bound_certificate(result.coloring);
        } catch (const std::logic_error& e) {
            result.lower_bound_error = e.what();
        }
    }
    if (result.budget_exceeded)
        result.exit_code = exit_budget;
    else if (!complete || !result.violations.empty() || !result.lower_bound)
        result.exit_code = exit_invalid;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

// --- JSON ------------------------------------------------------------------

inline nlohmann::json to_json(const ProcessConfig& c) {
    return {{"n", c.n},
            {"epsilon", c.epsilon},
            {"seed", c.seed},
            {"on_no_pair", std::string(to_string(c.on_no_pair))},
            {"stop", c.stop.is_natural() ? nlohmann::json("natural") : nlohmann::json(*c.stop.max_steps)},
            {"checkpoint_every", c.checkpoint_every},
            {"phase2_budget", c.phase2_budget},
            {"sampling", c.sampling == TriangleSampling::explicit_store ? "explicit_store" : "rejection"}};
}

inline nlohmann::json to_json(const PaletteSpec& p) {
    return {{"total", p.total}, {"phase1", p.phase1}, {"reserved", p.reserved}};
}

inline nlohmann::json to_json(const Phase2Report& r) {
    const DependencyDiagnostics& d = r.dependencies;
    return {{"uncolored_at_start", r.uncolored_at_start},
            {"rounds", r.rounds},
            {"final_bad_events", r.final_bad_events},
            {"enlargements", r.enlargements},
            {"reserved_final", r.reserved_final},
            {"success", r.success},
            {"dependencies",
             {{"max_adjacent", d.max_adjacent},
              {"mean_adjacent", d.mean_adjacent},
              {"max_b2_cycles", d.max_b2_cycles},
              {"max_b3_partners", d.max_b3_partners},
              {"mean_b3_partners", d.mean_b3_partners},
              {"lll_log_margin", d.lll_log_margin}}}};
}

inline nlohmann::json violations_json(const std::vector<Violation>& vs, std::size_t limit = 20) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < vs.size() && i < limit; ++i)
        arr.push_back({{"vertices", vs[i].vertices}, {"colors", vs[i].colors}});
    return arr;
}

inline nlohmann::json report_json(const RunOptions& options, const RunResult& r) {
    nlohmann::json j;
    j["config"] = to_json(options.config);
    j["palette"] = to_json(options.config.palette());
    j["phase1"] = {{"steps", r.phase1.steps},
                   {"edges_colored", r.phase1.edges_colored},
                   {"coverage", r.coverage},
                   {"termination", to_string(r.phase1.termination)},
                   {"skips", r.phase1.skips},
                   {"colors_used", r.phase1.colors_used},
                   {"seconds", r.phase1.seconds}};
    j["phase2"] = r.phase2 ? to_json(*r.phase2) : nlohmann::json(nullptr);
    j["budget_exceeded"] = r.budget_exceeded;
    j["validation"] = {{"mode", to_string(r.mode_used)},
                       {"violations", r.violations.size()},
                       {"examples", violations_json(r.violations)}};
    j["census"] = {{"x0", r.census.x0},
                   {"x1", r.census.x1},
                   {"x2", r.census.x2},
                   {"large_components", r.census.large_components},
                   {"colors_used", r.census.colors_used}};
    if (r.lower_bound)
        j["lower_bound"] = {{"bound", r.lower_bound->bound}, {"slack", r.lower_bound->slack}};
    else
        j["lower_bound"] = {{"error", r.lower_bound_error}};
    j["colors_used"] = r.colors_used;
    j["colors_per_n"] = static_cast<double>(r.colors_used) / options.config.n;
    j["palette_total"] = r.palette_total;
    j["invariants"] = {{"checks", r.invariant_checks},
                       {"large_components", r.invariants.large_components},
                       {"special_hit", r.invariants.special_hit},
                       {"alternating_cycles", r.invariants.alternating_cycles},
                       {"unpaired_cherries", r.invariants.unpaired_cherries}};
    j["seconds"] = r.seconds;
    j["exit_code"] = r.exit_code;
    return j;
}

inline nlohmann::json manifest_json(const RunOptions& options) {
    const ProcessConfig& c = options.config;
    return {{"tool", "ramsey-forge"},
            {"version", kVersion},
            {"config", to_json(c)},
            {"palette", to_json(c.palette())},
            {"substreams",
             {{"special_sets", static_cast<int>(Substream::special_sets)},
              {"phase1", static_cast<int>(Substream::phase1)},
              {"phase2", static_cast<int>(Substream::phase2)},
              {"telemetry", static_cast<int>(Substream::telemetry)}}},
            {"validation_mode", to_string(options.mode)},
            {"outputs", {"coloring.txt", "telemetry.csv", "report.json"}},
            {"compiler", __VERSION__}};
}

/// Writes coloring.txt, telemetry.csv, report.json and manifest.json into dir.
inline void write_run_outputs(const std::string& dir, const RunOptions& options, const RunResult& r) {
    std::filesystem::create_directories(dir);
    save_coloring(dir + "/coloring.txt", r.coloring);
    std::ofstream tel(dir + "/telemetry.csv");
    write_telemetry_csv(tel, r.telemetry);
    std::ofstream(dir + "/report.json") << report_json(options, r).dump(2) << '\n';
    std::ofstream(dir + "/manifest.json") << manifest_json(options).dump(2) << '\n';
}

// --- sweeps ----------------------------------------------------------------

inline unsigned sweep_threads(std::size_t jobs) {
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RAMSEY_FORGE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, jobs)));
}

struct SweepResult {
    std::vector<std::uint64_t> seeds;  // sorted
    std::vector<RunResult> runs;       // same order as seeds
    int exit_code = exit_ok;
    nlohmann::json aggregate;
};

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Runs every seed independently (in parallel) and aggregates.
inline SweepResult run_sweep(const RunOptions& base, std::vector<std::uint64_t> seeds) {
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    SweepResult out;
    out.seeds = seeds;
    out.runs.resize(seeds.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < seeds.size();) {
            try {
                RunOptions opt = base;
                opt.config.seed = seeds[i];
                out.runs[i] = run_pipeline(opt);
                if (!base.out_dir.empty())
                    write_run_outputs(base.out_dir + "/seed_" + std::to_string(seeds[i]), opt, out.runs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < sweep_threads(seeds.size()); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    nlohmann::json per_seed = nlohmann::json::array();
    std::map<std::pair<std::uint64_t, std::string>, std::vector<double>> deviations;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const RunResult& r = out.runs[i];
        out.exit_code = std::max(out.exit_code, r.exit_code);
        per_seed.push_back({{"seed", seeds[i]},
                            {"colors_used", r.colors_used},
                            {"colors_per_n", static_cast<double>(r.colors_used) / base.config.n},
                            {"coverage", r.coverage},
                            {"phase1_steps", r.phase1.steps},
                            {"enlargements", r.phase2 ? r.phase2->enlargements : 0},
                            {"violations", r.violations.size()},
                            {"exit_code", r.exit_code}});
        for (const TelemetryRecord& t : r.telemetry)
            if (!std::isnan(t.rel_dev)) deviations[{t.step, to_string(t.family)}].push_back(std::abs(t.rel_dev));
    }
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& [key, devs] : deviations)
        summary.push_back({{"step", key.first}, {"family", key.second}, {"median_abs_rel_dev", median(devs)},
                           {"samples", devs.size()}});
    out.aggregate = {{"config", to_json(base.config)},
                     {"seeds", seeds},
                     {"runs", per_seed},
                     {"deviation_summary", summary},
                     {"exit_code", out.exit_code}};
    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        std::ofstream(base.out_dir + "/aggregate.json") << out.aggregate.dump(2) << '\n';
    }
    return out;
}

}  // namespace ramsey_forge
