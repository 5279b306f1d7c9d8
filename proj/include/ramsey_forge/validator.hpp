#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ramsey_forge/coloring.hpp"
#include "ramsey_forge/coloring_state.hpp"
#include "ramsey_forge/random.hpp"
#include "ramsey_forge/triangle_store.hpp"

namespace ramsey_forge {

struct IncompleteColoring : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Components of the color classes. Uncolored edges are ignored.
struct ComponentCensus {
    std::uint32_t n = 0;
    /// Edge counts of the components of G_c, one list per used color.
    std::vector<std::pair<Color, std::vector<std::uint64_t>>> components;
    std::uint64_t x0 = 0;  // isolated vertices summed over used colors
    std::uint64_t x1 = 0;  // one-edge components
    std::uint64_t x2 = 0;  // two-edge components
    std::uint64_t large_components = 0;  // three or more edges
    std::uint32_t colors_used = 0;
};

inline ComponentCensus census(const Coloring& c) {
    const std::uint32_t n = c.n();
    std::vector<std::vector<std::pair<Vertex, Vertex>>> by_color(c.palette_size());
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (c.is_colored(u, v)) {
                const auto k = static_cast<std::size_t>(c.at(u, v));
                if (k >= by_color.size()) by_color.resize(k + 1);
                by_color[k].push_back({u, v});
            }
    ComponentCensus out;
    out.n = n;
    std::vector<Vertex> parent(n);
    std::vector<std::uint64_t> edges(n), vertices(n);
    for (std::size_t k = 0; k < by_color.size(); ++k) {
        if (by_color[k].empty()) continue;
        ++out.colors_used;
        std::vector<Vertex> touched;
        for (auto [u, v] : by_color[k]) touched.insert(touched.end(), {u, v});
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (Vertex v : touched) parent[v] = v, edges[v] = 0, vertices[v] = 1;
        auto find = [&](Vertex v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (auto [u, v] : by_color[k]) {
            Vertex a = find(u), b = find(v);
            if (a != b) {
                parent[b] = a;
                edges[a] += edges[b];
                vertices[a] += vertices[b];
            }
            ++edges[a];
        }
        std::vector<std::uint64_t> sizes;
        for (Vertex v : touched)
            if (find(v) == v) sizes.push_back(edges[v]);
        std::sort(sizes.begin(), sizes.end());
        for (std::uint64_t e : sizes) {
            if (e == 1) ++out.x1;
            else if (e == 2) ++out.x2;
            else ++out.large_components;
        }
        out.x0 += n - touched.size();
        out.components.push_back({static_cast<Color>(k), std::move(sizes)});
    }
    return out;
}

/// A 4-set spanning at most four colors.
struct Violation {
    std::array<Vertex, 4> vertices{};
    std::vector<Color> colors;  // distinct, sorted
    /// Edges sharing a color with another edge of the 4-set.
    std::vector<std::pair<Vertex, Vertex>> repeated_edges;

    bool operator==(const Violation& o) const { return vertices == o.vertices; }
    bool operator<(const Violation& o) const { return vertices < o.vertices; }
};

namespace detail {

inline void require_complete(const Coloring& c) {
    if (!c.is_complete()) throw IncompleteColoring("validation needs a complete coloring");
}

inline std::optional<Violation> check_four(const Coloring& c, std::array<Vertex, 4> q) {
    std::sort(q.begin(), q.end());
    static constexpr std::array<std::pair<int, int>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    std::array<Color, 6> col{};
    for (std::size_t i = 0; i < 6; ++i) col[i] = c.at(q[pairs[i].first], q[pairs[i].second]);
    std::array<Color, 6> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (distinct >= 5) return std::nullopt;
    Violation v;
    v.vertices = q;
    v.colors.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(distinct));
    for (std::size_t i = 0; i < 6; ++i)
        if (std::count(col.begin(), col.end(), col[i]) > 1)
            v.repeated_edges.push_back({q[pairs[i].first], q[pairs[i].second]});
    return v;
}

}  // namespace detail

/// All 4-sets with fewer than five colors, in lexicographic order.
inline std::vector<Violation> verify_45_exhaustive(const Coloring& c) {
    detail::require_complete(c);
    std::vector<Violation> out;
    const std::uint32_t n = c.n();
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            for (Vertex d = b + 1; d < n; ++d)
                for (Vertex e = d + 1; e < n; ++e)
                    if (auto v = detail::check_four(c, {a, b, d, e})) out.push_back(std::move(*v));
    return out;
}

/**
 * Same result as verify_45_exhaustive. A bad 4-set repeats some color, so it
 * contains two edges of one color class: either two disjoint edges (the
 * 4-set is their union) or a cherry plus one more vertex.
 */
inline std::vector<Violation> verify_45_pairwise(const Coloring& c) {
    detail::require_complete(c);
    const std::uint32_t n = c.n();
    std::vector<std::vector<std::pair<Vertex, Vertex>>> by_color(c.palette_size());
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) {
            const auto k = static_cast<std::size_t>(c.at(u, v));
            if (k >= by_color.size()) by_color.resize(k + 1);
            by_color[k].push_back({u, v});
        }
    std::set<Violation> found;
    for (const auto& edges : by_color)
        for (std::size_t i = 0; i < edges.size(); ++i)
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                const auto [a, b] = edges[i];
                const auto [x, y] = edges[j];
                std::array<Vertex, 4> q{a, b, x, y};
                std::sort(q.begin(), q.end());
                const auto unique_end = std::unique(q.begin(), q.end());
                if (unique_end == q.end()) {
                    if (auto v = detail::check_four(c, q)) found.insert(std::move(*v));
                    continue;
                }
                for (Vertex w = 0; w < n; ++w) {
                    if (w == q[0] || w == q[1] || w == q[2]) continue;
                    if (auto v = detail::check_four(c, {q[0], q[1], q[2], w})) found.insert(std::move(*v));
                }
            }
    return {found.begin(), found.end()};
}

/// Spot check of `samples` uniform random 4-sets; distinct violations found.
inline std::vector<Violation> verify_45_sampled(const Coloring& c, std::uint64_t samples, RandomStream& rng) {
    detail::require_complete(c);
    const std::uint32_t n = c.n();
    std::set<Violation> found;
    if (n < 4) return {};
    for (std::uint64_t i = 0; i < samples; ++i) {
        std::array<Vertex, 4> q{};
        for (std::size_t j = 0; j < 4;) {
            const auto v = static_cast<Vertex>(rng.uniform_below(n));
            if (std::find(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(j), v) == q.begin() + static_cast<std::ptrdiff_t>(j))
                q[j++] = v;
        }
        if (auto v = detail::check_four(c, q)) found.insert(std::move(*v));
    }
    return {found.begin(), found.end()};
}

enum class ValidationMode { automatic, exhaustive, pairwise, sampled };

inline ValidationMode parse_validation_mode(std::string_view s) {
    if (s == "auto") return ValidationMode::automatic;
    if (s == "exhaustive") return ValidationMode::exhaustive;
    if (s == "pairwise") return ValidationMode::pairwise;
    if (s == "sampled") return ValidationMode::sampled;
    throw std::invalid_argument("unknown validation mode: " + std::string(s));
}

inline std::string to_string(ValidationMode m) {
    switch (m) {
        case ValidationMode::automatic: return "auto";
        case ValidationMode::exhaustive: return "exhaustive";
        case ValidationMode::pairwise: return "pairwise";
        case ValidationMode::sampled: return "sampled";
    }
    return "auto";
}

/// Exhaustive up to n = 120, pairwise above.
inline ValidationMode resolve_mode(ValidationMode m, std::uint32_t n) {
    if (m != ValidationMode::automatic) return m;
    return n <= 120 ? ValidationMode::exhaustive : ValidationMode::pairwise;
}

inline std::vector<Violation> verify_45(const Coloring& c, ValidationMode mode, std::uint64_t seed = 1) {
    switch (resolve_mode(mode, c.n())) {
        case ValidationMode::exhaustive: return verify_45_exhaustive(c);
        case ValidationMode::sampled: {
            RandomStream rng(seed, 4u);
            return verify_45_sampled(c, 1'000'000, rng);
        }
        default: return verify_45_pairwise(c);
    }
}

struct LowerBoundReport {
    std::uint64_t x0 = 0, x1 = 0, x2 = 0;
    std::uint32_t colors_used = 0;
    double bound = 0.0;          // 5(n-1)/6
    std::uint32_t ceil_bound = 0;
    double slack = 0.0;          // colors_used - bound
};

/// Recomputes |C| from the census identities; throws logic_error if they break.
inline LowerBoundReport lower_bound_certificate(const Coloring& c) {
    detail::require_complete(c);
    const ComponentCensus cs = census(c);
    const std::uint64_t n = c.n();
    if (cs.large_components != 0) throw std::logic_error("a color class has a component with three or more edges");
    if (cs.x0 + 2 * cs.x1 + 3 * cs.x2 != n * cs.colors_used) throw std::logic_error("x0 + 2x1 + 3x2 != n|C|");
    if (cs.x1 + 2 * cs.x2 != n * (n - 1) / 2) throw std::logic_error("x1 + 2x2 != C(n,2)");
    if (cs.x1 < cs.x2) throw std::logic_error("x1 < x2");
    LowerBoundReport r;
    r.x0 = cs.x0;
    r.x1 = cs.x1;
    r.x2 = cs.x2;
    r.colors_used = cs.colors_used;
    r.bound = 5.0 * static_cast<double>(n - 1) / 6.0;
    r.ceil_bound = static_cast<std::uint32_t>((5 * (n - 1) + 5) / 6);
    r.slack = cs.colors_used - r.bound;
    if (cs.colors_used < r.ceil_bound) throw std::logic_error("fewer colors than the lower bound allows");
    return r;
}

/// Structural facts every Phase-1 state satisfies; all counts are zero when they hold.
struct ProcessInvariants {
    std::uint64_t large_components = 0;
    std::uint64_t special_hit = 0;        // (v, k) with k in S_v and v hit by k
    std::uint64_t alternating_cycles = 0; // 4-cycles with both opposite pairs monochromatic
    std::uint64_t unpaired_cherries = 0;  // two-edge components without a differently colored edge between their ends

    bool ok() const {
        return large_components == 0 && special_hit == 0 && alternating_cycles == 0 && unpaired_cherries == 0;
    }
};

inline ProcessInvariants check_process_invariants(const ColoringState& state) {
    ProcessInvariants out;
    const std::uint32_t n = state.n();
    const Coloring c = state.to_coloring();
    out.large_components = census(c).large_components;
    for (Vertex v = 0; v < n; ++v)
        for (Color k : state.special_colors(v))
            if (state.is_hit(v, k)) ++out.special_hit;

    std::vector<std::vector<std::pair<Vertex, Vertex>>> by_color(state.palette().total);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (c.is_colored(u, v)) by_color[static_cast<std::size_t>(c.at(u, v))].push_back({u, v});
    for (const auto& edges : by_color)
        for (std::size_t i = 0; i < edges.size(); ++i)
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                const auto [a, b] = edges[i];
                const auto [x, y] = edges[j];
                if (a == x || a == y || b == x || b == y) {
                    // cherry: the two ends must be joined by another color
                    const Vertex end1 = (a == x || a == y) ? b : a;
                    const Vertex end2 = (x == a || x == b) ? y : x;
                    const Color k = c.at(a, b);
                    if (!c.is_colored(end1, end2) || c.at(end1, end2) == k) ++out.unpaired_cherries;
                    continue;
                }
                // cycles a-b-y-x and a-b-x-y; each cycle is seen from both of its monochromatic pairs
                auto mono = [&](Vertex p, Vertex q, Vertex r, Vertex s) {
                    return c.is_colored(p, q) && c.is_colored(r, s) && c.at(p, q) == c.at(r, s);
                };
                if (mono(b, y, x, a)) ++out.alternating_cycles;
                if (mono(b, x, y, a)) ++out.alternating_cycles;
            }
    out.alternating_cycles /= 2;
    return out;
}

}  // namespace ramsey_forge
