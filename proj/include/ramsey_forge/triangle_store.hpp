#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ramsey_forge/config.hpp"
#include "ramsey_forge/random.hpp"

namespace ramsey_forge {

/// Vertex triple with a < b < c.
struct Triangle {
    Vertex a = 0, b = 0, c = 0;

    static Triangle sorted(Vertex x, Vertex y, Vertex z) {
        if (x > y) std::swap(x, y);
        if (y > z) std::swap(y, z);
        if (x > y) std::swap(x, y);
        return {x, y, z};
    }

    Vertex operator[](int i) const { return i == 0 ? a : (i == 1 ? b : c); }
    int index_of(Vertex v) const { return v == a ? 0 : (v == b ? 1 : (v == c ? 2 : -1)); }
    bool operator==(const Triangle&) const = default;
};

inline std::uint64_t choose2(std::uint64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; }
inline std::uint64_t choose3(std::uint64_t x) { return x < 3 ? 0 : x * (x - 1) * (x - 2) / 6; }

/// Combinadic rank of a sorted triple; dense in [0, C(n,3)).
inline std::uint64_t triangle_rank(const Triangle& t) {
    return choose3(t.c) + choose2(t.b) + t.a;
}

/**
 * Dense store of the uncolored triangles of K_n.
 *
 * Slots [0, live) hold triangles that can still be drawn; slots [live, size)
 * hold retired triangles (every orientation starved under the skip policy).
 * Both regions use swap-remove, so deletion is O(1) per triangle and the
 * triangles through an edge uv are found by probing the ranks of {u, v, w}.
 */
class TriangleStore {
public:
    static constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();

    explicit TriangleStore(std::uint32_t n) : n_(n) {
        const std::uint64_t total = choose3(n);
        if (total >= kAbsent || n > 65535) throw std::length_error("triangle store too large for n");
        slots_.reserve(total);
        pos_.assign(total, kAbsent);
        starved_.assign(total, 0);
        for (Vertex c = 2; c < n; ++c)
            for (Vertex b = 1; b < c; ++b)
                for (Vertex a = 0; a < b; ++a) {
                    const Triangle t{a, b, c};
                    pos_[triangle_rank(t)] = static_cast<std::uint32_t>(slots_.size());
                    slots_.push_back(pack(t));
                }
        live_ = slots_.size();
    }

    std::uint64_t size() const { return slots_.size(); }
    std::uint64_t live_size() const { return live_; }
    std::uint32_t n() const { return n_; }
    Triangle at(std::size_t i) const { return unpack(slots_[i]); }

    bool contains(const Triangle& t) const { return pos_[triangle_rank(t)] != kAbsent; }

    /// Removes every stored triangle containing edge uv; returns how many.
    std::uint32_t remove_edge(Vertex u, Vertex v) {
        std::uint32_t removed = 0;
        for (Vertex w = 0; w < n_; ++w) {
            if (w == u || w == v) continue;
            const std::uint64_t r = triangle_rank(Triangle::sorted(u, v, w));
            if (pos_[r] != kAbsent) {
                erase_slot(pos_[r]);
                ++removed;
            }
        }
        return removed;
    }

    /// Uniform draw over live triangles. Requires live_size() > 0.
    Triangle sample_live(RandomStream& rng) const {
        return unpack(slots_[rng.uniform_below(live_)]);
    }

    bool is_starved(const Triangle& t, int apex_index) const {
        return (starved_[triangle_rank(t)] >> apex_index) & 1u;
    }

    std::uint8_t starved_mask(const Triangle& t) const { return starved_[triangle_rank(t)]; }

    /// Marks one orientation as starved; retires the triangle once all three are.
    /// Returns true if the triangle was retired.
    bool mark_starved(const Triangle& t, int apex_index) {
        const std::uint64_t r = triangle_rank(t);
        starved_[r] |= static_cast<std::uint8_t>(1u << apex_index);
        if (starved_[r] != 0b111) return false;
        const std::uint32_t p = pos_[r];
        if (p != kAbsent && p < live_) {
            // move to the head of the retired region
            const std::size_t last_live = live_ - 1;
            swap_slots(p, last_live);
            --live_;
        }
        return true;
    }

private:
    struct Packed {
        std::uint16_t a, b, c;
    };

    static Packed pack(const Triangle& t) {
        return {static_cast<std::uint16_t>(t.a), static_cast<std::uint16_t>(t.b),
                static_cast<std::uint16_t>(t.c)};
    }
    static Triangle unpack(const Packed& p) { return {p.a, p.b, p.c}; }
    static std::uint64_t rank_of(const Packed& p) { return triangle_rank(unpack(p)); }

    void swap_slots(std::size_t i, std::size_t j) {
        if (i == j) return;
        std::swap(slots_[i], slots_[j]);
        pos_[rank_of(slots_[i])] = static_cast<std::uint32_t>(i);
        pos_[rank_of(slots_[j])] = static_cast<std::uint32_t>(j);
    }

    void erase_slot(std::size_t i) {
        if (i < live_) {
            swap_slots(i, live_ - 1);
            i = live_ - 1;
            --live_;
        }
        swap_slots(i, slots_.size() - 1);
        pos_[rank_of(slots_.back())] = kAbsent;
        slots_.pop_back();
    }

    std::uint32_t n_;
    std::vector<Packed> slots_;
    std::vector<std::uint32_t> pos_;
    std::vector<std::uint8_t> starved_;
    std::size_t live_ = 0;
};

/**
 * Uncolored-triangle bookkeeping without the O(n^3) store. Counts are kept
 * exact by scanning the common neighbourhood of each newly colored edge;
 * draws are by rejection, with acceptance probability about p^3.
 */
class RejectionTriangles {
public:
    explicit RejectionTriangles(std::uint32_t n) : n_(n), count_(choose3(n)) {}

    std::uint64_t size() const { return count_; }
    std::uint64_t live_size() const { return count_ - retired_; }

    /// Call before edge uv becomes colored. `uncolored(x, y)` reports edge state.
    template <typename IsUncolored>
    std::uint32_t remove_edge(Vertex u, Vertex v, IsUncolored&& uncolored) {
        std::uint32_t removed = 0;
        for (Vertex w = 0; w < n_; ++w) {
            if (w == u || w == v || !uncolored(u, w) || !uncolored(v, w)) continue;
            ++removed;
            auto it = starved_.find(triangle_rank(Triangle::sorted(u, v, w)));
            if (it != starved_.end()) {
                if (it->second == 0b111) --retired_;
                starved_.erase(it);
            }
        }
        count_ -= removed;
        return removed;
    }

    template <typename IsUncolored>
    Triangle sample_live(RandomStream& rng, IsUncolored&& uncolored) const {
        for (;;) {
            const auto x = static_cast<Vertex>(rng.uniform_below(n_));
            const auto y = static_cast<Vertex>(rng.uniform_below(n_));
            const auto z = static_cast<Vertex>(rng.uniform_below(n_));
            if (x == y || y == z || x == z) continue;
            if (!uncolored(x, y) || !uncolored(y, z) || !uncolored(x, z)) continue;
            const Triangle t = Triangle::sorted(x, y, z);
            if (starved_mask(t) == 0b111) continue;
            return t;
        }
    }

    std::uint8_t starved_mask(const Triangle& t) const {
        auto it = starved_.find(triangle_rank(t));
        return it == starved_.end() ? 0 : it->second;
    }

    bool is_starved(const Triangle& t, int apex_index) const {
        return (starved_mask(t) >> apex_index) & 1u;
    }

    bool mark_starved(const Triangle& t, int apex_index) {
        auto& mask = starved_[triangle_rank(t)];
        const bool was_retired = mask == 0b111;
        mask |= static_cast<std::uint8_t>(1u << apex_index);
        if (mask == 0b111 && !was_retired) ++retired_;
        return mask == 0b111;
    }

private:
    std::uint32_t n_;
    std::uint64_t count_;
    std::uint64_t retired_ = 0;
    std::unordered_map<std::uint64_t, std::uint8_t> starved_;
};

}  // namespace ramsey_forge
