#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ramsey_forge/coloring_state.hpp"
#include "ramsey_forge/config.hpp"
#include "ramsey_forge/random.hpp"

namespace ramsey_forge {

/// Triangle oriented away from `apex`; the other two vertices in increasing order.
struct OrientedTriangle {
    Vertex apex = 0;
    Vertex left = 0;   // u'
    Vertex right = 0;  // u''

    Triangle triangle() const { return Triangle::sorted(apex, left, right); }
    int apex_index() const { return triangle().index_of(apex); }
};

inline OrientedTriangle orient(const Triangle& t, int apex_index) {
    switch (apex_index) {
        case 0: return {t.a, t.b, t.c};
        case 1: return {t.b, t.a, t.c};
        default: return {t.c, t.a, t.b};
    }
}

/// Uniform live triangle, uniform apex; nullopt when nothing can be drawn.
inline std::optional<OrientedTriangle> sample_oriented_triangle(const ColoringState& state, RandomStream& rng) {
    if (state.live_triangles() == 0) return std::nullopt;
    const Triangle t = state.sample_live_triangle(rng);
    return orient(t, static_cast<int>(rng.uniform_below(3)));
}

/// 1-available colors (P^1 role) and 2-available colors (P^2 role) at a triple.
struct Candidates {
    std::vector<Color> one;  // k' in S_u, available at u'u''
    std::vector<Color> two;  // k not in S_u, available at uu' and uu''

    bool empty() const { return one.empty() || two.empty(); }
};

inline Candidates enumerate_candidates(const ColoringState& state, Vertex u, Vertex u1, Vertex u2) {
    if (state.is_colored(u, u1) || state.is_colored(u, u2) || state.is_colored(u1, u2))
        throw std::logic_error("enumerate_candidates needs three uncolored edges");
    const std::size_t words = state.phase1_words();
    const std::uint32_t phase1 = state.palette().phase1;
    std::vector<std::uint64_t> one(words), two(words);
    const std::uint64_t *su = state.special_row(u), *s1 = state.special_row(u1), *s2 = state.special_row(u2);
    const std::uint64_t *hu = state.hit_row(u), *h1 = state.hit_row(u1), *h2 = state.hit_row(u2);
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t mask = ~std::uint64_t{0};
        if (w + 1 == words && phase1 % 64 != 0) mask = (std::uint64_t{1} << (phase1 % 64)) - 1;
        one[w] = su[w] & ~(s1[w] | s2[w] | h1[w] | h2[w]) & mask;
        two[w] = ~(su[w] | s1[w] | s2[w] | hu[w] | h1[w] | h2[w]) & mask;
    }
    auto clear = [](std::vector<std::uint64_t>& bits, Color k) {
        bits[static_cast<std::size_t>(k) / 64] &= ~(std::uint64_t{1} << (static_cast<std::size_t>(k) % 64));
    };
    state.for_each_path_color(u1, u2, [&](Color k) { if (k >= 0 && static_cast<std::uint32_t>(k) < phase1) clear(one, k); });
    state.for_each_path_color(u, u1, [&](Color k) { if (k >= 0 && static_cast<std::uint32_t>(k) < phase1) clear(two, k); });
    state.for_each_path_color(u, u2, [&](Color k) { if (k >= 0 && static_cast<std::uint32_t>(k) < phase1) clear(two, k); });

    Candidates out;
    for (std::size_t w = 0; w < words; ++w) {
        for (std::uint64_t b = one[w]; b; b &= b - 1)
            out.one.push_back(static_cast<Color>(w * 64 + static_cast<std::size_t>(std::countr_zero(b))));
        for (std::uint64_t b = two[w]; b; b &= b - 1)
            out.two.push_back(static_cast<Color>(w * 64 + static_cast<std::size_t>(std::countr_zero(b))));
    }
    return out;
}

inline Candidates enumerate_candidates(const ColoringState& state, const OrientedTriangle& t) {
    return enumerate_candidates(state, t.apex, t.left, t.right);
}

struct ColorPair {
    Color k = kUncolored;   // on uu' and uu''
    Color k1 = kUncolored;  // on u'u''
};

/// k' uniform on C1 and k uniform on C2, drawn independently (k' first).
inline ColorPair draw_pair(const Candidates& c, RandomStream& rng) {
    ColorPair p;
    p.k1 = c.one[rng.uniform_below(c.one.size())];
    p.k = c.two[rng.uniform_below(c.two.size())];
    return p;
}

struct StepOutcome {
    enum class Tag { colored, no_pair_available, no_triangles };

    Tag tag = Tag::no_triangles;
    OrientedTriangle triangle;
    ColorPair pair;
    std::size_t c1_size = 0;
    std::size_t c2_size = 0;
};

/**
 * One Phase-1 step. Under the skip policy a starved orientation is marked and
 * never drawn again; orientations marked earlier are redrawn silently.
 */
inline StepOutcome step(ColoringState& state, RandomStream& rng, NoPairPolicy policy = NoPairPolicy::terminate) {
    if (state.phase() != Phase::phase1) throw std::logic_error("step requires Phase 1");
    StepOutcome out;
    for (;;) {
        const auto drawn = sample_oriented_triangle(state, rng);
        if (!drawn) return out;
        if (state.is_starved(drawn->triangle(), drawn->apex_index())) continue;
        out.triangle = *drawn;
        break;
    }
    const OrientedTriangle& t = out.triangle;
    const Candidates cand = enumerate_candidates(state, t);
    out.c1_size = cand.one.size();
    out.c2_size = cand.two.size();
    if (cand.empty()) {
        out.tag = StepOutcome::Tag::no_pair_available;
        if (policy == NoPairPolicy::skip) state.mark_starved(t.triangle(), t.apex_index());
        return out;
    }
    out.pair = draw_pair(cand, rng);
    state.color_oriented_triangle(t.apex, t.left, t.right, out.pair.k, out.pair.k1);
    out.tag = StepOutcome::Tag::colored;
    return out;
}

enum class Termination { no_triangles, no_pair_available, all_starved, max_steps };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::no_triangles: return "no_triangles";
        case Termination::no_pair_available: return "no_pair_available";
        case Termination::all_starved: return "all_starved";
        case Termination::max_steps: return "max_steps";
    }
    return "unknown";
}

struct Phase1Report {
    std::uint64_t steps = 0;
    std::uint64_t edges_colored = 0;
    Termination termination = Termination::no_triangles;
    std::uint64_t skips = 0;
    std::uint32_t colors_used = 0;
    double seconds = 0.0;
};

/// Called after every step that colored a triangle.
using StepObserver = std::function<void(const ColoringState&, const StepOutcome&)>;

inline Phase1Report run_phase1(ColoringState& state, RandomStream& rng, const ProcessConfig& config,
                               const StepObserver& observer = {}) {
    const auto start = std::chrono::steady_clock::now();
    Phase1Report report;
    for (;;) {
        if (config.stop.max_steps && state.steps() >= *config.stop.max_steps) {
            report.termination = Termination::max_steps;
            break;
        }
        const StepOutcome out = step(state, rng, config.on_no_pair);
        if (out.tag == StepOutcome::Tag::no_triangles) {
            report.termination = state.uncolored_triangles() == 0 ? Termination::no_triangles : Termination::all_starved;
            break;
        }
        if (out.tag == StepOutcome::Tag::no_pair_available) {
            if (config.on_no_pair == NoPairPolicy::terminate) {
                report.termination = Termination::no_pair_available;
                break;
            }
            ++report.skips;
            continue;
        }
        if (observer) observer(state, out);
    }
    report.steps = state.steps();
    report.edges_colored = state.colored_edges();
    report.colors_used = state.colors_used();
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace ramsey_forge
