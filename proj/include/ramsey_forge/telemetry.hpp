#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ramsey_forge/coloring_state.hpp"
#include "ramsey_forge/phase1.hpp"
#include "ramsey_forge/random.hpp"
#include "ramsey_forge/trajectories.hpp"

namespace ramsey_forge {

// Counts below are for Phase-1 states. Vertices named in a definition are
// pairwise distinct, and D, E, F count ordered vertex pairs.

/// Phase-1 colors available at edge uv, as a bit row (empty if uv is colored).
class AvailabilityMask {
public:
    AvailabilityMask() = default;
    AvailabilityMask(const ColoringState& state, Vertex u, Vertex v) : bits_(state.phase1_words(), 0) {
        if (u == v || state.is_colored(u, v)) return;
        const std::uint32_t phase1 = state.palette().phase1;
        const std::uint64_t *su = state.special_row(u), *sv = state.special_row(v);
        const std::uint64_t *hu = state.hit_row(u), *hv = state.hit_row(v);
        for (std::size_t w = 0; w < bits_.size(); ++w) {
            std::uint64_t mask = ~std::uint64_t{0};
            if (w + 1 == bits_.size() && phase1 % 64 != 0) mask = (std::uint64_t{1} << (phase1 % 64)) - 1;
            bits_[w] = ~(su[w] | sv[w] | hu[w] | hv[w]) & mask;
        }
        state.for_each_path_color(u, v, [&](Color k) {
            if (state.palette().is_phase1(k))
                bits_[static_cast<std::size_t>(k) / 64] &= ~(std::uint64_t{1} << (static_cast<std::size_t>(k) % 64));
        });
    }

    bool test(Color k) const {
        return k >= 0 && static_cast<std::size_t>(k) / 64 < bits_.size() &&
               ((bits_[static_cast<std::size_t>(k) / 64] >> (static_cast<std::size_t>(k) % 64)) & 1u);
    }
    const std::vector<std::uint64_t>& words() const { return bits_; }

private:
    std::vector<std::uint64_t> bits_;
};

namespace detail {

inline std::uint64_t popcount_and(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < a.size(); ++w) c += static_cast<std::uint64_t>(std::popcount(a[w] & b[w]));
    return c;
}

inline std::uint64_t popcount_and(const std::uint64_t* a, const std::vector<std::uint64_t>& b) {
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < b.size(); ++w) c += static_cast<std::uint64_t>(std::popcount(a[w] & b[w]));
    return c;
}

inline std::vector<AvailabilityMask> masks_from(const ColoringState& state, Vertex u) {
    std::vector<AvailabilityMask> m;
    m.reserve(state.n());
    for (Vertex x = 0; x < state.n(); ++x) m.emplace_back(state, u, x);
    return m;
}

}  // namespace detail

inline std::uint64_t measure_Q(const ColoringState& state) { return state.uncolored_triangles(); }

/// Vertices u'' with uu'' and u'u'' uncolored.
inline std::uint64_t measure_Y(const ColoringState& state, Vertex u, Vertex u1) {
    std::uint64_t count = 0;
    for (Vertex w = 0; w < state.n(); ++w)
        if (w != u && w != u1 && !state.is_colored(u, w) && !state.is_colored(u1, w)) ++count;
    return count;
}

/// Pairs (u, k): k available at uu' and uu'', k' in S_u.
inline std::uint64_t measure_A(const ColoringState& state, Vertex u1, Vertex u2, Color k1) {
    std::uint64_t count = 0;
    for (Vertex u = 0; u < state.n(); ++u) {
        if (u == u1 || u == u2 || !state.is_special(u, k1)) continue;
        if (state.is_colored(u, u1) || state.is_colored(u, u2)) continue;
        count += detail::popcount_and(AvailabilityMask(state, u, u1).words(), AvailabilityMask(state, u, u2).words());
    }
    return count;
}

/// Pairs (u'', k'): k available at uu'', k' available at u'u'', k' in S_u.
inline std::uint64_t measure_B(const ColoringState& state, Vertex u, Vertex u1, Color k) {
    std::uint64_t count = 0;
    for (Vertex w = 0; w < state.n(); ++w) {
        if (w == u || w == u1 || !state.available_at_edge(u, w, k) || state.is_colored(u1, w)) continue;
        count += detail::popcount_and(state.special_row(u), AvailabilityMask(state, u1, w).words());
    }
    return count;
}

inline std::uint64_t measure_C1(const ColoringState& state, Vertex u, Vertex u1, Vertex u2) {
    return enumerate_candidates(state, u, u1, u2).one.size();
}

inline std::uint64_t measure_C2(const ColoringState& state, Vertex u, Vertex u1, Vertex u2) {
    return enumerate_candidates(state, u, u1, u2).two.size();
}

/// Triples (u', u'', k') with (k, k') available at (u, u', u'').
inline std::uint64_t measure_D(const ColoringState& state, Vertex u, Color k) {
    if (state.is_special(u, k)) return 0;
    std::vector<Vertex> ends;
    for (Vertex x = 0; x < state.n(); ++x)
        if (x != u && state.available_at_edge(u, x, k)) ends.push_back(x);
    std::uint64_t count = 0;
    for (Vertex a : ends)
        for (Vertex b : ends)
            if (a != b && !state.is_colored(a, b))
                count += detail::popcount_and(state.special_row(u), AvailabilityMask(state, a, b).words());
    return count;
}

/// Triples (u, u', k') with (k, k') available at (u, u', u'').
inline std::uint64_t measure_E(const ColoringState& state, Vertex u2, Color k) {
    if (state.is_special(u2, k)) return 0;
    std::vector<char> ok_at_u2(state.n(), 0);
    for (Vertex x = 0; x < state.n(); ++x) ok_at_u2[x] = x != u2 && state.available_at_edge(x, u2, k);
    const std::vector<AvailabilityMask> at_u2 = detail::masks_from(state, u2);
    std::uint64_t count = 0;
    for (Vertex u = 0; u < state.n(); ++u) {
        if (!ok_at_u2[u]) continue;
        for (Vertex u1 = 0; u1 < state.n(); ++u1)
            if (u1 != u && u1 != u2 && !state.is_colored(u1, u2) && state.available_at_edge(u, u1, k))
                count += detail::popcount_and(state.special_row(u), at_u2[u1].words());
    }
    return count;
}

/// Triples (u, u', k) with (k, k') available at (u, u', u'').
inline std::uint64_t measure_F(const ColoringState& state, Vertex u2, Color k1) {
    if (state.is_special(u2, k1)) return 0;
    const std::vector<AvailabilityMask> at_u2 = detail::masks_from(state, u2);
    std::vector<Vertex> opposite;  // u' with k' available at u'u''
    for (Vertex x = 0; x < state.n(); ++x)
        if (at_u2[x].test(k1)) opposite.push_back(x);
    std::uint64_t count = 0;
    for (Vertex u = 0; u < state.n(); ++u) {
        if (u == u2 || !state.is_special(u, k1) || state.is_colored(u, u2)) continue;
        for (Vertex u1 : opposite)
            if (u1 != u && !state.is_colored(u, u1))
                count += detail::popcount_and(AvailabilityMask(state, u, u1).words(), at_u2[u].words());
    }
    return count;
}

/// Triples (x, y, k') such that for e1 = ux, e2 = xy, e3 = yv with colors
/// k', k, k': a_j = 1 means e_j has that color, a_j = 0 that it is available there.
inline std::uint64_t measure_Z(const ColoringState& state, Vertex u, Vertex v, Color k, int a1, int a2, int a3) {
    if (a1 == 1 && a2 == 1 && a3 == 1) throw std::invalid_argument("pattern (1,1,1) is not a Z variable");
    const std::vector<AvailabilityMask> at_u = detail::masks_from(state, u);
    const std::vector<AvailabilityMask> at_v = detail::masks_from(state, v);
    const std::uint32_t n = state.n();
    std::uint64_t count = 0;
    for (Vertex x = 0; x < n; ++x) {
        if (x == u || x == v) continue;
        if (a1 == 1 && !state.palette().is_phase1(state.color(u, x))) continue;
        for (Vertex y = 0; y < n; ++y) {
            if (y == u || y == v || y == x) continue;
            if (a2 == 1 ? state.color(x, y) != k : !state.available_at_edge(x, y, k)) continue;
            if (a1 == 1) {
                const Color k1 = state.color(u, x);
                if (a3 == 1 ? state.color(y, v) == k1 : at_v[y].test(k1)) ++count;
            } else if (a3 == 1) {
                const Color k1 = state.color(y, v);
                if (state.palette().is_phase1(k1) && at_u[x].test(k1)) ++count;
            } else {
                count += detail::popcount_and(at_u[x].words(), at_v[y].words());
            }
        }
    }
    return count;
}

/// Alternating (uv, k)-paths u-x-y-v.
inline std::uint64_t measure_Xi(const ColoringState& state, Vertex u, Vertex v, Color k) {
    std::uint64_t count = 0;
    for (Vertex x = 0; x < state.n(); ++x) {
        if (x == u || x == v) continue;
        const PartnerPair ys = state.partners(v, state.color(u, x));
        for (std::size_t j = 0; j < ys.size(); ++j)
            if (ys[j] != u && ys[j] != x && state.color(x, ys[j]) == k) ++count;
    }
    return count;
}

/// Pairs (x, y) with color(ux) = color(u'y) and color(vx) = color(v'y).
inline std::uint64_t measure_Phi(const ColoringState& state, Vertex u, Vertex u1, Vertex v, Vertex v1) {
    const std::array<Vertex, 4> fixed{u, u1, v, v1};
    auto is_fixed = [&](Vertex w) { return std::find(fixed.begin(), fixed.end(), w) != fixed.end(); };
    std::uint64_t count = 0;
    for (Vertex x = 0; x < state.n(); ++x) {
        if (is_fixed(x)) continue;
        const PartnerPair ys = state.partners(u1, state.color(u, x));
        const Color c2 = state.color(v, x);
        if (c2 == kUncolored) continue;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const Vertex y = ys[j];
            if (y != x && !is_fixed(y) && state.color(v1, y) == c2) ++count;
        }
    }
    return count;
}

/// Triples (x, y, z) with color(ux) = color(zu''), color(xy) = k, color(yz) = k''.
inline std::uint64_t measure_Psi(const ColoringState& state, Vertex u, Vertex u2, Color k, Color k2) {
    std::uint64_t count = 0;
    for (Vertex x = 0; x < state.n(); ++x) {
        if (x == u || x == u2) continue;
        const PartnerPair zs = state.partners(u2, state.color(u, x));
        const PartnerPair ys = state.partners(x, k);
        for (std::size_t i = 0; i < zs.size(); ++i) {
            const Vertex z = zs[i];
            if (z == u || z == x) continue;
            for (std::size_t j = 0; j < ys.size(); ++j) {
                const Vertex y = ys[j];
                if (y != u && y != u2 && y != z && state.color(y, z) == k2) ++count;
            }
        }
    }
    return count;
}

/// Pairs (x, y) with color(ux) = color(vy) and color(vx) = color(wy).
inline std::uint64_t measure_Lambda(const ColoringState& state, Vertex u, Vertex v, Vertex w) {
    std::uint64_t count = 0;
    for (Vertex x = 0; x < state.n(); ++x) {
        if (x == u || x == v || x == w) continue;
        const PartnerPair ys = state.partners(v, state.color(u, x));
        const Color c2 = state.color(v, x);
        if (c2 == kUncolored) continue;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const Vertex y = ys[j];
            if (y != u && y != w && y != x && state.color(w, y) == c2) ++count;
        }
    }
    return count;
}

inline std::uint64_t uncolored_degree(const ColoringState& state, Vertex v) {
    std::uint64_t d = 0;
    for (Vertex x = 0; x < state.n(); ++x)
        if (x != v && !state.is_colored(v, x)) ++d;
    return d;
}

// --- snapshots -------------------------------------------------------------

enum class Family {
    Q, Y, A, B, C1, C2, D, E, F, Z000, Z100, Z010, Z001, Z110, Z101, Z011, Xi, Phi, Psi, Lambda, degree
};

inline constexpr std::size_t kFamilyCount = 21;

inline std::string to_string(Family f) {
    static constexpr std::array<std::string_view, kFamilyCount> names{
        "Q",    "Y",    "A",    "B",    "C1",   "C2", "D",   "E",   "F",      "Z000",  "Z100",
        "Z010", "Z001", "Z110", "Z101", "Z011", "Xi", "Phi", "Psi", "Lambda", "degree"};
    return std::string(names[static_cast<std::size_t>(f)]);
}

inline Family parse_family(std::string_view name) {
    for (std::size_t i = 0; i < kFamilyCount; ++i)
        if (to_string(static_cast<Family>(i)) == name) return static_cast<Family>(i);
    throw std::invalid_argument("unknown telemetry family '" + std::string(name) + "'");
}

inline bool is_expensive(Family f) {
    return f == Family::D || f == Family::E || f == Family::F || (f >= Family::Z000 && f <= Family::Z011);
}

struct SamplePlan {
    std::uint32_t m = 32;
    std::uint32_t m_expensive = 8;
    std::uint32_t max_tries = 100;
    std::array<bool, kFamilyCount> enabled{};

    SamplePlan() { enabled.fill(true); }

    static SamplePlan only(std::initializer_list<Family> families, std::uint32_t m) {
        SamplePlan p;
        p.enabled.fill(false);
        for (Family f : families) p.enabled[static_cast<std::size_t>(f)] = true;
        p.m = m;
        p.m_expensive = m;
        return p;
    }

    bool is_enabled(Family f) const { return enabled[static_cast<std::size_t>(f)]; }
    std::uint32_t samples_for(Family f) const { return is_expensive(f) ? m_expensive : m; }
};

struct TelemetryRecord {
    std::uint64_t step = 0;
    double t = 0.0;
    Family family = Family::Q;
    std::vector<std::int64_t> args;
    double empirical = 0.0;
    double predicted = 0.0;
    double rel_dev = 0.0;
    double window = 0.0;
    bool in_window = false;

    bool operator==(const TelemetryRecord& o) const {
        auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
        return step == o.step && same(t, o.t) && family == o.family && args == o.args &&
               same(empirical, o.empirical) && same(predicted, o.predicted) && same(rel_dev, o.rel_dev) &&
               same(window, o.window) && in_window == o.in_window;
    }
};

namespace detail {

struct Prediction {
    double value = 0.0;
    double log_window = 0.0;
    bool upper_bound_only = false;
};

inline Prediction predict(Family f, double t, const TrajectoryParams& params) {
    const double n = params.n, s = params.s, log_n = std::log(n);
    auto traj_pred = [&](Trajectory id, ErrorFn g, int pow) {
        return Prediction{std::pow(n, pow) * traj(id, t, s), pow * log_n + log_err(g, t, params), false};
    };
    switch (f) {
        case Family::Q: return traj_pred(Trajectory::q, ErrorFn::g_q, 3);
        case Family::Y: return traj_pred(Trajectory::y, ErrorFn::g_y, 1);
        case Family::A: return traj_pred(Trajectory::a, ErrorFn::g_ab, 2);
        case Family::B: return traj_pred(Trajectory::b, ErrorFn::g_ab, 2);
        case Family::C1: return traj_pred(Trajectory::c1, ErrorFn::g_c1, 1);
        case Family::C2: return traj_pred(Trajectory::c2, ErrorFn::g_c2, 1);
        case Family::D: return traj_pred(Trajectory::d, ErrorFn::g_def, 3);
        case Family::E: return traj_pred(Trajectory::e, ErrorFn::g_def, 3);
        case Family::F: return traj_pred(Trajectory::f, ErrorFn::g_def, 3);
        case Family::Z000: return traj_pred(Trajectory::z0, ErrorFn::g_0, 3);
        case Family::Z100:
        case Family::Z010:
        case Family::Z001: return traj_pred(Trajectory::z1, ErrorFn::g_1, 2);
        case Family::Z110:
        case Family::Z101:
        case Family::Z011: return traj_pred(Trajectory::z2, ErrorFn::g_2, 1);
        case Family::Xi:
        case Family::Phi:
        case Family::Psi:
        case Family::Lambda: {
            const double bound = 4.0 * params.delta * log_n;
            return Prediction{std::exp(bound), bound, true};
        }
        case Family::degree: return Prediction{n * p_of(t), log_n + log_err(ErrorFn::g_y, t, params), false};
    }
    throw std::invalid_argument("unknown family");
}

inline TelemetryRecord make_record(Family f, std::uint64_t step, double t, std::vector<std::int64_t> args,
                                   double empirical, const TrajectoryParams& params) {
    const Prediction pr = predict(f, t, params);
    TelemetryRecord r;
    r.step = step;
    r.t = t;
    r.family = f;
    r.args = std::move(args);
    r.empirical = empirical;
    r.predicted = pr.value;
    r.rel_dev = pr.value > 0.0 ? empirical / pr.value - 1.0 : std::numeric_limits<double>::quiet_NaN();
    r.window = std::exp(pr.log_window);
    if (pr.upper_bound_only) {
        r.in_window = empirical <= pr.value;
    } else {
        const double diff = std::abs(empirical - pr.value);
        r.in_window = diff == 0.0 || std::log(diff) <= pr.log_window;
    }
    return r;
}

}  // namespace detail

/**
 * Measures Q and the degree extremes, then up to samples_for(f) argument
 * tuples per enabled family. Arguments are drawn uniformly and rejected
 * until valid; a tuple still invalid after max_tries draws is skipped.
 */
inline std::vector<TelemetryRecord> snapshot(const ColoringState& state, const SamplePlan& plan, RandomStream& rng,
                                             double epsilon) {
    if (plan.m == 0 || plan.m_expensive == 0) throw std::invalid_argument("sample count must be at least 1");
    const std::uint32_t n = state.n();
    const double t = static_cast<double>(state.steps()) / (static_cast<double>(n) * n);
    TrajectoryParams params = TrajectoryParams::make(n, epsilon);
    params.enforce_t_max = false;
    const std::uint64_t step = state.steps();
    const std::uint32_t phase1 = state.palette().phase1;
    std::vector<TelemetryRecord> out;

    if (plan.is_enabled(Family::Q))
        out.push_back(detail::make_record(Family::Q, step, t, {}, static_cast<double>(measure_Q(state)), params));
    if (plan.is_enabled(Family::degree)) {
        Vertex lo = 0, hi = 0;
        std::uint64_t dlo = std::numeric_limits<std::uint64_t>::max(), dhi = 0;
        for (Vertex v = 0; v < n; ++v) {
            const std::uint64_t d = uncolored_degree(state, v);
            if (d < dlo) dlo = d, lo = v;
            if (d > dhi) dhi = d, hi = v;
        }
        out.push_back(detail::make_record(Family::degree, step, t, {lo}, static_cast<double>(dlo), params));
        out.push_back(detail::make_record(Family::degree, step, t, {hi}, static_cast<double>(dhi), params));
    }

    auto vertex = [&] { return static_cast<Vertex>(rng.uniform_below(n)); };
    auto color = [&] { return static_cast<Color>(rng.uniform_below(phase1)); };
    auto distinct = [](std::initializer_list<Vertex> vs) {
        for (auto i = vs.begin(); i != vs.end(); ++i)
            for (auto j = std::next(i); j != vs.end(); ++j)
                if (*i == *j) return false;
        return true;
    };
    // Draws one valid argument tuple and measures it; nullopt after max_tries.
    auto draw = [&](Family f) -> std::optional<std::pair<std::vector<std::int64_t>, std::uint64_t>> {
        using Args = std::vector<std::int64_t>;
        for (std::uint32_t attempt = 0; attempt < plan.max_tries; ++attempt) {
            switch (f) {
                case Family::Y: {
                    const Vertex u = vertex(), u1 = vertex();
                    if (u == u1 || state.is_colored(u, u1)) continue;
                    return std::pair{Args{u, u1}, measure_Y(state, u, u1)};
                }
                case Family::A: {
                    const Vertex u1 = vertex(), u2 = vertex();
                    const Color k1 = color();
                    if (u1 == u2 || state.is_colored(u1, u2) || state.is_special(u1, k1) || state.is_special(u2, k1))
                        continue;
                    return std::pair{Args{u1, u2, k1}, measure_A(state, u1, u2, k1)};
                }
                case Family::B: {
                    const Vertex u = vertex(), u1 = vertex();
                    const Color k = color();
                    if (u == u1 || state.is_colored(u, u1) || state.is_special(u, k) || state.is_special(u1, k))
                        continue;
                    return std::pair{Args{u, u1, k}, measure_B(state, u, u1, k)};
                }
                case Family::C1:
                case Family::C2: {
                    const Vertex u = vertex(), u1 = vertex(), u2 = vertex();
                    if (!distinct({u, u1, u2}) || state.is_colored(u, u1) || state.is_colored(u, u2) ||
                        state.is_colored(u1, u2))
                        continue;
                    const Candidates c = enumerate_candidates(state, u, u1, u2);
                    return std::pair{Args{u, u1, u2}, f == Family::C1 ? c.one.size() : c.two.size()};
                }
                case Family::D:
                case Family::E:
                case Family::F: {
                    const Vertex u = vertex();
                    const Color k = color();
                    if (!state.available_at_vertex(u, k)) continue;
                    const std::uint64_t value = f == Family::D   ? measure_D(state, u, k)
                                                : f == Family::E ? measure_E(state, u, k)
                                                                 : measure_F(state, u, k);
                    return std::pair{Args{u, k}, value};
                }
                case Family::Z000:
                case Family::Z100:
                case Family::Z010:
                case Family::Z001:
                case Family::Z110:
                case Family::Z101:
                case Family::Z011: {
                    const Vertex u = vertex(), v = vertex();
                    const Color k = color();
                    if (u == v || state.is_colored(u, v) || state.is_special(u, k) || state.is_special(v, k)) continue;
                    const std::string name = to_string(f);
                    const int a1 = name[1] - '0', a2 = name[2] - '0', a3 = name[3] - '0';
                    return std::pair{Args{u, v, k}, measure_Z(state, u, v, k, a1, a2, a3)};
                }
                case Family::Xi: {
                    const Vertex u = vertex(), v = vertex();
                    if (u == v) continue;
                    const Color k = color();
                    return std::pair{Args{u, v, k}, measure_Xi(state, u, v, k)};
                }
                case Family::Phi: {
                    const Vertex u = vertex(), u1 = vertex(), v = vertex(), v1 = vertex();
                    if (!distinct({u, u1, v, v1})) continue;
                    return std::pair{Args{u, u1, v, v1}, measure_Phi(state, u, u1, v, v1)};
                }
                case Family::Psi: {
                    const Vertex u = vertex(), u2 = vertex();
                    if (u == u2) continue;
                    const Color k = color(), k2 = color();
                    return std::pair{Args{u, u2, k, k2}, measure_Psi(state, u, u2, k, k2)};
                }
                case Family::Lambda: {
                    const Vertex u = vertex(), v = vertex(), w = vertex();
                    if (!distinct({u, v, w})) continue;
                    return std::pair{Args{u, v, w}, measure_Lambda(state, u, v, w)};
                }
                default: return std::nullopt;
            }
        }
        return std::nullopt;
    };

    for (std::size_t i = 0; i < kFamilyCount; ++i) {
        const auto f = static_cast<Family>(i);
        if (f == Family::Q || f == Family::degree || !plan.is_enabled(f)) continue;
        for (std::uint32_t j = 0; j < plan.samples_for(f); ++j) {
            auto sample = draw(f);
            if (!sample) continue;
            out.push_back(detail::make_record(f, step, t, std::move(sample->first),
                                              static_cast<double>(sample->second), params));
        }
    }
    return out;
}

// --- CSV -------------------------------------------------------------------

inline constexpr std::string_view kTelemetryHeader = "step,t,family,args,empirical,predicted,rel_dev,window,in_window";

inline void write_telemetry_header(std::ostream& out) { out << kTelemetryHeader << '\n'; }

inline void write_telemetry_row(std::ostream& out, const TelemetryRecord& r) {
    std::ostringstream line;
    line.precision(std::numeric_limits<double>::max_digits10);
    line << r.step << ',' << r.t << ',' << to_string(r.family) << ',';
    for (std::size_t i = 0; i < r.args.size(); ++i) line << (i ? ";" : "") << r.args[i];
    line << ',' << r.empirical << ',' << r.predicted << ',' << r.rel_dev << ',' << r.window << ','
         << (r.in_window ? 1 : 0);
    out << line.str() << '\n';
}

inline void write_telemetry_csv(std::ostream& out, const std::vector<TelemetryRecord>& records) {
    write_telemetry_header(out);
    for (const TelemetryRecord& r : records) write_telemetry_row(out, r);
}

namespace detail {

inline double parse_double(const std::string& s) {
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

}  // namespace detail

inline std::vector<TelemetryRecord> read_telemetry_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTelemetryHeader) throw std::runtime_error("missing telemetry header");
    std::vector<TelemetryRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 9) throw std::runtime_error("telemetry row needs 9 fields: " + line);
        TelemetryRecord r;
        r.step = std::stoull(cells[0]);
        r.t = detail::parse_double(cells[1]);
        r.family = parse_family(cells[2]);
        std::stringstream args(cells[3]);
        for (std::string a; std::getline(args, a, ';');) r.args.push_back(std::stoll(a));
        r.empirical = detail::parse_double(cells[4]);
        r.predicted = detail::parse_double(cells[5]);
        r.rel_dev = detail::parse_double(cells[6]);
        r.window = detail::parse_double(cells[7]);
        r.in_window = cells[8] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace ramsey_forge
