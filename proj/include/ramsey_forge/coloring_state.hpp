#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ramsey_forge/coloring.hpp"
#include "ramsey_forge/config.hpp"
#include "ramsey_forge/random.hpp"
#include "ramsey_forge/triangle_store.hpp"

namespace ramsey_forge {

struct AlreadyColored : std::logic_error {
    using std::logic_error::logic_error;
};

struct AvailabilityViolation : std::logic_error {
    using std::logic_error::logic_error;
};

enum class Phase { phase1, phase2 };

/// Fixed-width bitset rows, one row per vertex.
class BitRows {
public:
    BitRows() = default;
    BitRows(std::size_t rows, std::size_t bits)
        : bits_(bits), words_((bits + 63) / 64), data_(rows * words_, 0) {}

    bool test(std::size_t row, std::size_t bit) const {
        return bit < bits_ && ((data_[row * words_ + bit / 64] >> (bit % 64)) & 1u);
    }
    void set(std::size_t row, std::size_t bit) {
        data_[row * words_ + bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
    std::size_t bits() const { return bits_; }
    std::size_t words() const { return words_; }
    const std::uint64_t* row(std::size_t r) const { return data_.data() + r * words_; }

    std::size_t count(std::size_t r) const {
        std::size_t total = 0;
        for (std::size_t w = 0; w < words_; ++w) total += std::popcount(row(r)[w]);
        return total;
    }

    /// Grows every row to hold `bits` bits, preserving contents.
    void widen(std::size_t bits) {
        if (bits <= bits_) return;
        const std::size_t words = (bits + 63) / 64;
        const std::size_t rows = words_ == 0 ? 0 : data_.size() / words_;
        std::vector<std::uint64_t> next(rows * words, 0);
        for (std::size_t r = 0; r < rows; ++r)
            std::copy_n(row(r), words_, next.data() + r * words);
        data_ = std::move(next);
        words_ = words;
        bits_ = bits;
    }

private:
    std::size_t bits_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Neighbours joined to a vertex by one Phase-1 color (at most two).
struct PartnerPair {
    std::array<std::int32_t, 2> slot{-1, -1};

    std::size_t size() const { return (slot[0] >= 0) + (slot[1] >= 0); }
    Vertex operator[](std::size_t i) const { return static_cast<Vertex>(slot[i]); }
};

/**
 * Partial edge coloring of K_n together with the bookkeeping the Phase-1
 * process queries on every step: special sets, hit sets, per-(vertex, color)
 * partners and the set of uncolored triangles.
 *
 * Partners are tracked for Phase-1 colors only; hit sets cover every color.
 * Single writer; const queries are safe to issue concurrently between
 * mutations.
 */
class ColoringState {
public:
    /// Fresh state with S_v drawn as independent Bernoulli(s) over Phase-1 colors.
    static ColoringState init(const ProcessConfig& config, RandomStream& rng) {
        config.validate();
        const PaletteSpec palette = config.palette();
        const double s = config.s();
        std::vector<std::vector<Color>> special(config.n);
        for (Vertex v = 0; v < config.n; ++v)
            for (std::uint32_t k = 0; k < palette.phase1; ++k)
                if (rng.bernoulli(s)) special[v].push_back(static_cast<Color>(k));
        return ColoringState(config.n, palette, special, config.sampling);
    }

    ColoringState(std::uint32_t n, PaletteSpec palette,
                  const std::vector<std::vector<Color>>& special,
                  TriangleSampling sampling = TriangleSampling::explicit_store)
        : n_(n),
          palette_(palette),
          edge_color_(static_cast<std::size_t>(n) * n, kUncolored),
          special_(n, palette.phase1),
          hit_(n, palette.total),
          partners_(static_cast<std::size_t>(n) * palette.phase1) {
        if (n < 4) throw std::invalid_argument("n must be at least 4");
        if (special.size() != n) throw std::invalid_argument("special sets must cover every vertex");
        for (Vertex v = 0; v < n; ++v)
            for (Color k : special[v]) {
                if (!palette_.is_phase1(k)) throw std::invalid_argument("special colors must be Phase-1 colors");
                special_.set(v, static_cast<std::size_t>(k));
            }
        if (sampling == TriangleSampling::explicit_store)
            store_.emplace(n);
        else
            rejection_.emplace(n);
    }

    std::uint32_t n() const { return n_; }
    const PaletteSpec& palette() const { return palette_; }
    Phase phase() const { return phase_; }
    std::uint64_t steps() const { return steps_; }
    std::uint64_t colored_edges() const { return colored_edges_; }
    std::uint64_t edge_count() const { return choose2(n_); }

    Color color(Vertex u, Vertex v) const { return edge_color_[index(u, v)]; }
    bool is_colored(Vertex u, Vertex v) const { return color(u, v) != kUncolored; }

    bool is_special(Vertex v, Color k) const {
        return palette_.is_phase1(k) && special_.test(v, static_cast<std::size_t>(k));
    }
    bool is_hit(Vertex v, Color k) const { return k >= 0 && hit_.test(v, static_cast<std::size_t>(k)); }

    std::vector<Color> special_colors(Vertex v) const { return bits_to_colors(special_, v); }
    std::vector<Color> hit_colors(Vertex v) const { return bits_to_colors(hit_, v); }
    std::size_t special_count(Vertex v) const { return special_.count(v); }

    /// Raw bit rows; Phase-1 colors occupy the first phase1_words() words.
    const std::uint64_t* special_row(Vertex v) const { return special_.row(v); }
    const std::uint64_t* hit_row(Vertex v) const { return hit_.row(v); }
    std::size_t phase1_words() const { return (palette_.phase1 + 63) / 64; }

    /// Distinct colors on colored edges.
    std::uint32_t colors_used() const {
        std::vector<std::uint64_t> all(hit_.words(), 0);
        for (Vertex v = 0; v < n_; ++v)
            for (std::size_t w = 0; w < all.size(); ++w) all[w] |= hit_.row(v)[w];
        std::uint32_t used = 0;
        for (std::uint64_t w : all) used += static_cast<std::uint32_t>(std::popcount(w));
        return used;
    }

    PartnerPair partners(Vertex v, Color k) const {
        if (!palette_.is_phase1(k)) return {};
        return partners_[static_cast<std::size_t>(v) * palette_.phase1 + static_cast<std::size_t>(k)];
    }

    // --- triangles -------------------------------------------------------

    std::uint64_t uncolored_triangles() const { return store_ ? store_->size() : rejection_->size(); }
    std::uint64_t live_triangles() const { return store_ ? store_->live_size() : rejection_->live_size(); }
    bool uses_explicit_store() const { return store_.has_value(); }
    const TriangleStore* triangle_store() const { return store_ ? &*store_ : nullptr; }

    Triangle sample_live_triangle(RandomStream& rng) const {
        if (store_) return store_->sample_live(rng);
        return rejection_->sample_live(rng, [this](Vertex x, Vertex y) { return !is_colored(x, y); });
    }

    bool is_starved(const Triangle& t, int apex_index) const {
        return store_ ? store_->is_starved(t, apex_index) : rejection_->is_starved(t, apex_index);
    }

    /// Marks an oriented triangle whose candidate set is empty. Availability
    /// only shrinks, so the mark is permanent.
    bool mark_starved(const Triangle& t, int apex_index) {
        return store_ ? store_->mark_starved(t, apex_index) : rejection_->mark_starved(t, apex_index);
    }

    // --- availability ----------------------------------------------------

    bool available_at_vertex(Vertex v, Color k) const {
        return palette_.is_phase1(k) && !is_special(v, k) && !is_hit(v, k);
    }

    /// Calls f(k) for every color k closing an alternating (uv, k)-path,
    /// possibly repeating a color.
    template <typename F>
    void for_each_path_color(Vertex u, Vertex v, F&& f) const {
        const std::uint64_t* hu = hit_.row(u);
        const std::uint64_t* hv = hit_.row(v);
        const std::size_t words = (palette_.phase1 + 63) / 64;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t common = hu[w] & hv[w];
            while (common != 0) {
                const auto c = static_cast<Color>(w * 64 + static_cast<std::size_t>(std::countr_zero(common)));
                common &= common - 1;
                if (!palette_.is_phase1(c)) break;
                const PartnerPair pu = partners(u, c);
                const PartnerPair pv = partners(v, c);
                for (std::size_t i = 0; i < pu.size(); ++i)
                    for (std::size_t j = 0; j < pv.size(); ++j) {
                        const Vertex x = pu[i], y = pv[j];
                        if (x == y || x == v || y == u) continue;
                        const Color k = color(x, y);
                        if (k != kUncolored) f(k);
                    }
            }
        }
    }

    /// Colors forbidden at uv by an alternating path, sorted and unique.
    std::vector<Color> forbidden_by_path(Vertex u, Vertex v) const {
        std::vector<Color> out;
        for_each_path_color(u, v, [&](Color k) { out.push_back(k); });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool has_alternating_path(Vertex u, Vertex v, Color k) const {
        bool found = false;
        for_each_path_color(u, v, [&](Color c) { found = found || c == k; });
        return found;
    }

    bool available_at_edge(Vertex u, Vertex v, Color k) const {
        return u != v && !is_colored(u, v) && available_at_vertex(u, k) && available_at_vertex(v, k) &&
               !has_alternating_path(u, v, k);
    }

    // --- mutation --------------------------------------------------------

    /// Colors one edge. In Phase 1 the color must be available at the edge.
    void assign_color(Vertex u, Vertex v, Color k) {
        check_uncolored(u, v);
        if (phase_ == Phase::phase1 && !available_at_edge(u, v, k))
            throw AvailabilityViolation("color " + std::to_string(k) + " is not available at edge " +
                                        std::to_string(u) + "-" + std::to_string(v));
        if (phase_ == Phase::phase2 && (k < 0 || static_cast<std::uint32_t>(k) >= palette_.total))
            throw std::out_of_range("color outside the palette");
        apply(u, v, k);
    }

    /// One Phase-1 step: uu', uu'' get k and u'u'' gets k'. The pair must be
    /// available at the triple (checked against the pre-step state).
    void color_oriented_triangle(Vertex u, Vertex u1, Vertex u2, Color k, Color k1) {
        if (phase_ != Phase::phase1) throw std::logic_error("oriented triangles are colored in Phase 1 only");
        check_uncolored(u, u1);
        check_uncolored(u, u2);
        check_uncolored(u1, u2);
        if (!is_special(u, k1) || !available_at_edge(u1, u2, k1))
            throw AvailabilityViolation("k' is not 1-available at the triple");
        if (is_special(u, k) || !available_at_edge(u, u1, k) || !available_at_edge(u, u2, k))
            throw AvailabilityViolation("k is not 2-available at the triple");
        apply(u, u1, k);
        apply(u, u2, k);
        apply(u1, u2, k1);
        ++steps_;
    }

    void begin_phase2() { phase_ = Phase::phase2; }

    /// Appends fresh reserved colors (Phase-2 palette enlargement).
    void add_reserved_colors(std::uint32_t count) {
        palette_.total += count;
        palette_.reserved += count;
        hit_.widen(palette_.total);
    }

    /// Phase-2 resampling: replaces the reserved color of an edge. Hit bits of
    /// the old color go stale until rebuild_reserved_hits().
    void recolor_reserved(Vertex u, Vertex v, Color k) {
        if (phase_ != Phase::phase2) throw std::logic_error("recoloring is a Phase-2 operation");
        const Color old = color(u, v);
        if (old == kUncolored || palette_.is_phase1(old)) throw std::logic_error("only Phase-2 edges can be recolored");
        if (palette_.is_phase1(k) || k < 0 || static_cast<std::uint32_t>(k) >= palette_.total)
            throw std::out_of_range("recolor needs a reserved color");
        edge_color_[index(u, v)] = k;
        edge_color_[index(v, u)] = k;
        hit_.set(u, static_cast<std::size_t>(k));
        hit_.set(v, static_cast<std::size_t>(k));
    }

    /// Recomputes the reserved-color part of every hit set from the edges.
    void rebuild_reserved_hits() {
        BitRows fresh(n_, palette_.total);
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v = 0; v < n_; ++v) {
                const Color k = color(u, v);
                if (u != v && k != kUncolored) fresh.set(u, static_cast<std::size_t>(k));
            }
        hit_ = std::move(fresh);
    }

    /// Plain snapshot of the edge colors.
    Coloring to_coloring() const {
        Coloring c(n_, palette_.total);
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v = u + 1; v < n_; ++v)
                if (is_colored(u, v)) c.set(u, v, color(u, v));
        return c;
    }

private:
    std::size_t index(Vertex u, Vertex v) const { return static_cast<std::size_t>(u) * n_ + v; }

    void check_uncolored(Vertex u, Vertex v) const {
        if (u == v || u >= n_ || v >= n_) throw std::out_of_range("invalid edge");
        if (is_colored(u, v))
            throw AlreadyColored("edge " + std::to_string(u) + "-" + std::to_string(v) + " is already colored");
    }

    void apply(Vertex u, Vertex v, Color k) {
        if (store_)
            store_->remove_edge(u, v);
        else
            rejection_->remove_edge(u, v, [this](Vertex x, Vertex y) { return !is_colored(x, y); });
        edge_color_[index(u, v)] = k;
        edge_color_[index(v, u)] = k;
        hit_.set(u, static_cast<std::size_t>(k));
        hit_.set(v, static_cast<std::size_t>(k));
        if (palette_.is_phase1(k)) {
            add_partner(u, k, v);
            add_partner(v, k, u);
        }
        ++colored_edges_;
    }

    void add_partner(Vertex v, Color k, Vertex w) {
        PartnerPair& p = partners_[static_cast<std::size_t>(v) * palette_.phase1 + static_cast<std::size_t>(k)];
        if (p.slot[0] < 0)
            p.slot[0] = static_cast<std::int32_t>(w);
        else if (p.slot[1] < 0)
            p.slot[1] = static_cast<std::int32_t>(w);
        else
            throw std::logic_error("color class would get a vertex of degree 3");
    }

    static std::vector<Color> bits_to_colors(const BitRows& rows, Vertex v) {
        std::vector<Color> out;
        for (std::size_t k = 0; k < rows.bits(); ++k)
            if (rows.test(v, k)) out.push_back(static_cast<Color>(k));
        return out;
    }

    std::uint32_t n_;
    PaletteSpec palette_;
    std::vector<Color> edge_color_;
    BitRows special_;
    BitRows hit_;
    std::vector<PartnerPair> partners_;
    std::optional<TriangleStore> store_;
    std::optional<RejectionTriangles> rejection_;
    Phase phase_ = Phase::phase1;
    std::uint64_t steps_ = 0;
    std::uint64_t colored_edges_ = 0;
};

}  // namespace ramsey_forge
