#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ramsey_forge/coloring_state.hpp"
#include "ramsey_forge/random.hpp"

namespace ramsey_forge {

struct EmptyReservedPalette : std::logic_error {
    using std::logic_error::logic_error;
};

using Edge = std::pair<Vertex, Vertex>;  // first < second

inline Edge make_edge(Vertex u, Vertex v) { return u < v ? Edge{u, v} : Edge{v, u}; }

/**
 * A violated Phase-2 constraint.
 *  B1: two adjacent Phase-2 edges with equal color.
 *  B2: 4-cycle of Phase-2 edges whose opposite edges have equal colors.
 *  B3: opposite Phase-2 edges e1, e3 of a 4-cycle whose other two edges share
 *      a Phase-1 color, with color(e1) = color(e3).
 * `edges` are the Phase-2 edges of the event, sorted; `witness` lists the
 * colors that make it bad (for B3 the shared Phase-1 color comes last).
 */
struct BadEvent {
    enum class Kind { b1 = 1, b2 = 2, b3 = 3 };

    Kind kind = Kind::b1;
    std::vector<Edge> edges;
    std::vector<Color> witness;

    auto key() const { return std::tie(kind, edges); }
    bool operator<(const BadEvent& o) const { return key() < o.key(); }
    bool operator==(const BadEvent& o) const { return key() == o.key(); }
};

inline std::string to_string(BadEvent::Kind k) {
    return k == BadEvent::Kind::b1 ? "B1" : (k == BadEvent::Kind::b2 ? "B2" : "B3");
}

/**
 * `budget` caps the total number of resampling rounds. A palette size is
 * abandoned after `stage_rounds_per_edge` rounds per Phase-2 edge (0: after
 * the whole budget), and immediately when it is smaller than the maximum
 * Phase-2 degree, since B1 alone then cannot be avoided.
 */
struct Phase2Options {
    std::uint64_t budget = 1'000'000;
    bool fallback = true;
    double enlargement_factor = 0.1;
    std::uint32_t max_enlargements = 64;
    std::uint64_t stage_rounds_per_edge = 10;
    bool degree_shortcut = true;
};

/// Dependency counts of the Phase-2 event family and the local-lemma
/// inequality evaluated with x1 = x3 = 10/(eps n), x2 = 10/(eps n)^2.
struct DependencyDiagnostics {
    std::uint32_t max_adjacent = 0;  // Phase-2 edges sharing a vertex with one Phase-2 edge
    double mean_adjacent = 0.0;
    std::uint32_t max_b2_cycles = 0;  // Phase-2 4-cycles through one Phase-2 edge
    std::uint32_t max_b3_partners = 0;
    double mean_b3_partners = 0.0;
    /// log(rhs) - log(P(B_j)) for j = 1, 2, 3; nonnegative means the inequality holds.
    std::array<double, 3> lll_log_margin{0.0, 0.0, 0.0};
};

struct Phase2Report {
    std::uint64_t uncolored_at_start = 0;
    std::uint64_t rounds = 0;
    std::uint64_t final_bad_events = 0;
    std::uint32_t enlargements = 0;
    std::uint32_t reserved_final = 0;
    bool success = false;
    DependencyDiagnostics dependencies;
};

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded(const std::string& what, Phase2Report r) : std::runtime_error(what), report(std::move(r)) {}
    Phase2Report report;
};

/// Colors every uncolored edge with an independent uniform reserved color.
inline void random_complete(ColoringState& state, RandomStream& rng) {
    const PaletteSpec& pal = state.palette();
    if (pal.total <= pal.phase1) throw EmptyReservedPalette("no reserved colors for Phase 2");
    state.begin_phase2();
    const std::uint32_t n = state.n();
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (!state.is_colored(u, v)) {
                const auto k = static_cast<Color>(pal.phase1 + rng.uniform_below(pal.total - pal.phase1));
                state.assign_color(u, v, k);
            }
}

namespace detail {

/**
 * Working index over the Phase-2 edges of a completed coloring: slots in
 * lexicographic edge order, per-vertex adjacency, per-(vertex, color)
 * buckets and the static B3 partner lists derived from Phase-1 partners.
 */
class Phase2Index {
public:
    explicit Phase2Index(const ColoringState& state) : state_(state), n_(state.n()), phase1_(state.palette().phase1) {
        slot_of_.assign(static_cast<std::size_t>(n_) * n_, -1);
        adj_.resize(n_);
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v = u + 1; v < n_; ++v) {
                const Color k = state.color(u, v);
                if (k == kUncolored) throw std::logic_error("Phase 2 needs a complete coloring");
                if (state.palette().is_phase1(k)) continue;
                const auto s = static_cast<std::int32_t>(edges_.size());
                edges_.push_back({u, v});
                slot_of_[static_cast<std::size_t>(u) * n_ + v] = s;
                slot_of_[static_cast<std::size_t>(v) * n_ + u] = s;
                adj_[u].push_back({v, s});
                adj_[v].push_back({u, s});
            }
        reset_buckets();
        b3_.resize(edges_.size());
        for (std::size_t s = 0; s < edges_.size(); ++s) {
            const auto [a, b] = edges_[s];
            collect_b3(static_cast<std::int32_t>(s), a, b);
        }
    }

    std::size_t size() const { return edges_.size(); }
    const Edge& edge(std::int32_t s) const { return edges_[static_cast<std::size_t>(s)]; }
    Color color(std::int32_t s) const { return state_.color(edge(s).first, edge(s).second); }
    std::int32_t slot(Vertex u, Vertex v) const { return slot_of_[static_cast<std::size_t>(u) * n_ + v]; }
    const std::vector<std::pair<Vertex, std::int32_t>>& adjacent(Vertex v) const { return adj_[v]; }

    struct B3Partner {
        std::int32_t slot;
        Color shared;  // Phase-1 color on the other two cycle edges
    };
    const std::vector<B3Partner>& b3_partners(std::int32_t s) const { return b3_[static_cast<std::size_t>(s)]; }

    const std::vector<std::int32_t>& bucket(Vertex v, Color k) const {
        static const std::vector<std::int32_t> empty;
        const auto off = static_cast<std::size_t>(k) - phase1_;
        if (k < 0 || static_cast<std::uint32_t>(k) < phase1_ || off >= width_) return empty;
        return buckets_[static_cast<std::size_t>(v) * width_ + off];
    }

    void reset_buckets() {
        width_ = state_.palette().total - phase1_;
        buckets_.assign(static_cast<std::size_t>(n_) * width_, {});
        for (std::size_t s = 0; s < edges_.size(); ++s) add_to_buckets(static_cast<std::int32_t>(s));
    }

    void remove_from_buckets(std::int32_t s) {
        const Color k = color(s);
        for (Vertex v : {edge(s).first, edge(s).second}) {
            auto& b = buckets_[static_cast<std::size_t>(v) * width_ + (static_cast<std::size_t>(k) - phase1_)];
            b.erase(std::find(b.begin(), b.end(), s));
        }
    }

    void add_to_buckets(std::int32_t s) {
        const Color k = color(s);
        for (Vertex v : {edge(s).first, edge(s).second})
            buckets_[static_cast<std::size_t>(v) * width_ + (static_cast<std::size_t>(k) - phase1_)].push_back(s);
    }

    /// Calls f(event) for every bad event containing slot s (duplicates possible).
    template <typename F>
    void for_each_bad_event(std::int32_t s, F&& f) const {
        const auto [a, b] = edge(s);
        const Color c = color(s);
        for (Vertex v : {a, b})
            for (std::int32_t o : bucket(v, c))
                if (o != s) f(make_event(BadEvent::Kind::b1, {s, o}, {c}));
        // 4-cycles a-b-x-y-a with ab ~ xy and bx ~ ya
        for (const auto& [x, s_bx] : adj_[b]) {
            if (x == a) continue;
            const Color c2 = color(s_bx);
            for (std::int32_t s_ay : bucket(a, c2)) {
                const Edge& e = edge(s_ay);
                const Vertex y = e.first == a ? e.second : e.first;
                if (y == b || y == x) continue;
                const std::int32_t s_xy = slot(x, y);
                if (s_xy >= 0 && color(s_xy) == c) f(make_event(BadEvent::Kind::b2, {s, s_bx, s_xy, s_ay}, {c, c2}));
            }
        }
        for (const B3Partner& p : b3_[static_cast<std::size_t>(s)])
            if (color(p.slot) == c) f(make_event(BadEvent::Kind::b3, {s, p.slot}, {c, p.shared}));
    }

    BadEvent make_event(BadEvent::Kind kind, std::vector<std::int32_t> slots, std::vector<Color> witness) const {
        std::sort(slots.begin(), slots.end());
        BadEvent ev;
        ev.kind = kind;
        ev.witness = std::move(witness);
        for (std::int32_t s : slots) ev.edges.push_back(edge(s));
        return ev;
    }

    std::uint32_t b2_cycles_through(std::int32_t s) const {
        const auto [a, b] = edge(s);
        std::uint32_t count = 0;
        for (const auto& [x, s_bx] : adj_[b]) {
            if (x == a) continue;
            for (const auto& [y, s_ay] : adj_[a])
                if (y != b && y != x && slot(x, y) >= 0) ++count;
        }
        return count;
    }

private:
    void collect_b3(std::int32_t s, Vertex a, Vertex b) {
        // cycle a-b-y-x-a with ax, by sharing a Phase-1 color and xy a Phase-2 edge
        const std::uint64_t* ha = state_.hit_row(a);
        const std::uint64_t* hb = state_.hit_row(b);
        auto& out = b3_[static_cast<std::size_t>(s)];
        for (std::size_t w = 0; w < state_.phase1_words(); ++w)
            for (std::uint64_t common = ha[w] & hb[w]; common; common &= common - 1) {
                const auto c = static_cast<Color>(w * 64 + static_cast<std::size_t>(std::countr_zero(common)));
                if (!state_.palette().is_phase1(c)) break;
                const PartnerPair pa = state_.partners(a, c), pb = state_.partners(b, c);
                for (std::size_t i = 0; i < pa.size(); ++i)
                    for (std::size_t j = 0; j < pb.size(); ++j) {
                        const Vertex x = pa[i], y = pb[j];
                        if (x == y || x == b || y == a) continue;
                        const std::int32_t t = slot(x, y);
                        if (t < 0) continue;
                        if (std::none_of(out.begin(), out.end(), [&](const B3Partner& p) { return p.slot == t; }))
                            out.push_back({t, c});
                    }
            }
    }

    const ColoringState& state_;
    std::uint32_t n_;
    std::uint32_t phase1_;
    std::vector<Edge> edges_;
    std::vector<std::int32_t> slot_of_;
    std::vector<std::vector<std::pair<Vertex, std::int32_t>>> adj_;
    std::vector<std::vector<B3Partner>> b3_;
    std::size_t width_ = 0;
    std::vector<std::vector<std::int32_t>> buckets_;
};

inline DependencyDiagnostics diagnose(const Phase2Index& index, std::uint32_t n, double epsilon,
                                      std::uint32_t reserved) {
    DependencyDiagnostics d;
    if (index.size() == 0) return d;
    double adj_sum = 0.0, b3_sum = 0.0;
    for (std::int32_t s = 0; s < static_cast<std::int32_t>(index.size()); ++s) {
        const auto [a, b] = index.edge(s);
        const auto adjacent = static_cast<std::uint32_t>(index.adjacent(a).size() + index.adjacent(b).size() - 2);
        const auto partners = static_cast<std::uint32_t>(index.b3_partners(s).size());
        d.max_adjacent = std::max(d.max_adjacent, adjacent);
        d.max_b3_partners = std::max(d.max_b3_partners, partners);
        d.max_b2_cycles = std::max(d.max_b2_cycles, index.b2_cycles_through(s));
        adj_sum += adjacent;
        b3_sum += partners;
    }
    d.mean_adjacent = adj_sum / static_cast<double>(index.size());
    d.mean_b3_partners = b3_sum / static_cast<double>(index.size());

    const double en = epsilon * n;
    const std::array<double, 3> x{10.0 / en, 10.0 / (en * en), 10.0 / en};
    const std::array<double, 3> per_edge{static_cast<double>(d.max_adjacent), static_cast<double>(d.max_b2_cycles),
                                         static_cast<double>(d.max_b3_partners)};
    const std::array<double, 3> edges_in_event{2.0, 4.0, 2.0};
    const double r = reserved;
    const std::array<double, 3> prob{1.0 / r, 1.0 / (r * r), 1.0 / r};
    for (std::size_t i = 0; i < 3; ++i) {
        double log_rhs = std::log(std::min(x[i], 1.0 - 1e-12));
        for (std::size_t j = 0; j < 3; ++j)
            log_rhs += edges_in_event[i] * per_edge[j] * std::log1p(-std::min(x[j], 1.0 - 1e-12));
        d.lll_log_margin[i] = log_rhs - std::log(prob[i]);
    }
    return d;
}

}  // namespace detail

/// Exhaustive list of bad events of a complete coloring, sorted by (kind, edges).
inline std::vector<BadEvent> find_bad_events(const ColoringState& state) {
    const detail::Phase2Index index(state);
    std::set<BadEvent> found;
    for (std::int32_t s = 0; s < static_cast<std::int32_t>(index.size()); ++s)
        index.for_each_bad_event(s, [&](BadEvent ev) { found.insert(std::move(ev)); });
    return {found.begin(), found.end()};
}

/**
 * Moser-Tardos style resampling: while a bad event exists, re-randomize the
 * Phase-2 edges of the lexicographically smallest one. When a palette size is
 * abandoned (see Phase2Options) the reserved palette grows by
 * ceil(factor * reserved) fresh colors, or straight to the maximum Phase-2
 * degree if that is larger. Each growth counts as one enlargement.
 * Throws BudgetExceeded when the budget runs out or growth is not allowed.
 */
inline Phase2Report resample(ColoringState& state, RandomStream& rng, const Phase2Options& options = {},
                             double epsilon_for_diagnostics = 0.1) {
    if (state.phase() != Phase::phase2) throw std::logic_error("resample runs after random_complete");
    detail::Phase2Index index(state);
    Phase2Report report;
    report.uncolored_at_start = index.size();
    report.dependencies = detail::diagnose(index, state.n(), epsilon_for_diagnostics, state.palette().reserved);

    std::uint32_t max_degree = 0;
    for (Vertex v = 0; v < state.n(); ++v)
        max_degree = std::max(max_degree, static_cast<std::uint32_t>(index.adjacent(v).size()));
    const std::uint64_t stage_limit = options.stage_rounds_per_edge == 0
                                          ? options.budget
                                          : std::max<std::uint64_t>(1, options.stage_rounds_per_edge * index.size());

    std::set<BadEvent> bad;
    for (std::int32_t s = 0; s < static_cast<std::int32_t>(index.size()); ++s)
        index.for_each_bad_event(s, [&](BadEvent ev) { bad.insert(std::move(ev)); });

    auto infeasible = [&] { return options.degree_shortcut && state.palette().reserved < max_degree; };
    std::uint64_t stage_rounds = 0;
    std::vector<std::int32_t> targets;
    while (!bad.empty() && report.rounds < options.budget) {
        if (stage_rounds >= stage_limit || infeasible()) {
            if (!options.fallback || report.enlargements >= options.max_enlargements) break;
            const std::uint32_t reserved = state.palette().reserved;
            auto extra = static_cast<std::uint32_t>(
                std::max(1.0, std::ceil(options.enlargement_factor * reserved - 1e-9)));
            if (options.degree_shortcut && reserved + extra < max_degree) extra = max_degree - reserved;
            state.add_reserved_colors(extra);
            index.reset_buckets();
            ++report.enlargements;
            stage_rounds = 0;
        }
        const BadEvent ev = *bad.begin();
        targets.clear();
        for (const Edge& e : ev.edges) targets.push_back(index.slot(e.first, e.second));
        for (std::int32_t s : targets) index.for_each_bad_event(s, [&](const BadEvent& old) { bad.erase(old); });
        const PaletteSpec& pal = state.palette();
        for (std::int32_t s : targets) {
            index.remove_from_buckets(s);
            const auto k = static_cast<Color>(pal.phase1 + rng.uniform_below(pal.total - pal.phase1));
            state.recolor_reserved(index.edge(s).first, index.edge(s).second, k);
            index.add_to_buckets(s);
        }
        for (std::int32_t s : targets) index.for_each_bad_event(s, [&](BadEvent fresh) { bad.insert(std::move(fresh)); });
        ++report.rounds;
        ++stage_rounds;
    }
    state.rebuild_reserved_hits();
    report.final_bad_events = bad.size();
    report.reserved_final = state.palette().reserved;
    report.success = bad.empty();
    if (!report.success)
        throw BudgetExceeded("Phase 2 left " + std::to_string(bad.size()) + " bad events after " +
                                 std::to_string(report.rounds) + " rounds",
                             report);
    return report;
}

}  // namespace ramsey_forge
