#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ramsey_forge {

using Vertex = std::uint32_t;
using Color = std::int32_t;

inline constexpr Color kUncolored = -1;

enum class NoPairPolicy { terminate, skip };

/// How Phase 1 draws uniform uncolored triangles.
enum class TriangleSampling {
    explicit_store,  // dense store with swap-remove, O(n^3) memory
    rejection,       // draw three vertices until an uncolored triangle appears
};

inline std::string_view to_string(NoPairPolicy p) {
    return p == NoPairPolicy::terminate ? "terminate" : "skip";
}

inline NoPairPolicy parse_no_pair_policy(std::string_view s) {
    if (s == "terminate") return NoPairPolicy::terminate;
    if (s == "skip") return NoPairPolicy::skip;
    throw std::invalid_argument("unknown no-pair policy: " + std::string(s));
}

/// Stop criterion: run to natural termination or stop after a step count.
struct StopCriterion {
    std::optional<std::uint64_t> max_steps;

    static StopCriterion natural() { return {}; }
    static StopCriterion steps(std::uint64_t i) { return {i}; }
    bool is_natural() const { return !max_steps.has_value(); }
};

/// ceil() that ignores floating noise of a few ulps above an integer.
inline std::uint32_t robust_ceil(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::uint32_t>(r);
    return static_cast<std::uint32_t>(std::ceil(x));
}

/**
 * Palette sizes for a run. Colors 0..phase1-1 form the Phase-1 palette;
 * phase1..total-1 are reserved for Phase 2.
 */
struct PaletteSpec {
    std::uint32_t total = 0;
    std::uint32_t phase1 = 0;
    std::uint32_t reserved = 0;

    static PaletteSpec for_run(std::uint32_t n, double epsilon) {
        PaletteSpec p;
        p.phase1 = robust_ceil((5.0 / 6.0 + epsilon / 2.0) * n);
        // reserved >= 1 even when epsilon*n/2 rounds away
        p.total = std::max(robust_ceil((5.0 / 6.0 + epsilon) * n), p.phase1 + 1);
        p.reserved = p.total - p.phase1;
        return p;
    }

    bool is_phase1(Color k) const { return k >= 0 && static_cast<std::uint32_t>(k) < phase1; }
};

/// Probability that a color lands in a vertex's special set.
inline double special_probability(double epsilon) {
    return (epsilon / 2.0) / (5.0 / 6.0 + epsilon / 2.0);
}

struct ProcessConfig {
    std::uint32_t n = 0;
    double epsilon = 0.1;
    std::uint64_t seed = 1;
    NoPairPolicy on_no_pair = NoPairPolicy::terminate;
    StopCriterion stop = StopCriterion::natural();
    std::uint64_t checkpoint_every = 0;  // 0 disables periodic telemetry
    std::uint64_t phase2_budget = 1'000'000;
    TriangleSampling sampling = TriangleSampling::explicit_store;

    void validate() const {
        if (n < 4) throw std::invalid_argument("n must be at least 4");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("epsilon must lie in (0, 1)");
    }

    double s() const { return special_probability(epsilon); }
    PaletteSpec palette() const { return PaletteSpec::for_run(n, epsilon); }
};

}  // namespace ramsey_forge
