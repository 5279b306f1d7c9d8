#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "ramsey_forge/telemetry.hpp"

using namespace ramsey_forge;

namespace {

struct Case {
    ColoringState state;
    std::uint64_t seed;
};

// 100 reachable states, n in [8, 15], at assorted depths.
std::vector<Case> reachable_states() {
    std::vector<Case> out;
    RandomStream pick(2024, 0);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto n = static_cast<std::uint32_t>(8 + pick.uniform_below(8));
        const double eps = i % 2 ? 0.4 : 0.1;
        const std::uint64_t steps = pick.uniform_below(n * n / 4 + 2);
        out.push_back({oracle::reachable_state(n, eps, i + 1, steps), i + 1});
    }
    return out;
}

const std::vector<Case>& states() {
    static const std::vector<Case> cached = reachable_states();
    return cached;
}

Vertex rv(RandomStream& r, const ColoringState& s) { return static_cast<Vertex>(r.uniform_below(s.n())); }
Color rc(RandomStream& r, const ColoringState& s) { return static_cast<Color>(r.uniform_below(s.palette().phase1)); }

}  // namespace

TEST(TelemetryOracle, QAndY) {
    for (const auto& [s, seed] : states()) {
        EXPECT_EQ(measure_Q(s), oracle::triangles(s));
        for (Vertex u = 0; u < s.n(); ++u)
            for (Vertex v = 0; v < s.n(); ++v) {
                if (u == v || s.is_colored(u, v)) continue;
                std::uint64_t y = 0;
                for (Vertex w = 0; w < s.n(); ++w)
                    y += w != u && w != v && !s.is_colored(u, w) && !s.is_colored(v, w);
                ASSERT_EQ(measure_Y(s, u, v), y);
            }
        for (Vertex v = 0; v < s.n(); ++v) {
            std::uint64_t d = 0;
            for (Vertex w = 0; w < s.n(); ++w) d += w != v && !s.is_colored(v, w);
            EXPECT_EQ(uncolored_degree(s, v), d);
        }
    }
}

TEST(TelemetryOracle, AvailabilityMask) {
    for (const auto& [s, seed] : states())
        for (Vertex u = 0; u < s.n(); ++u)
            for (Vertex v = 0; v < s.n(); ++v) {
                if (u == v) continue;
                const AvailabilityMask m(s, u, v);
                for (Color k = 0; k < oracle::phase1_colors(s); ++k)
                    ASSERT_EQ(m.test(k), oracle::available(s, u, v, k));
            }
}

TEST(TelemetryOracle, AB) {
    std::uint64_t nonzero = 0;
    for (const auto& [s, seed] : states()) {
        RandomStream r(seed, 7);
        for (int i = 0; i < 12; ++i) {
            const Vertex a = rv(r, s), b = rv(r, s);
            const Color k = rc(r, s);
            if (a == b) continue;
            const std::uint64_t A = measure_A(s, a, b, k), B = measure_B(s, a, b, k);
            ASSERT_EQ(A, oracle::A(s, a, b, k));
            ASSERT_EQ(B, oracle::B(s, a, b, k));
            nonzero += (A > 0) + (B > 0);
        }
    }
    EXPECT_GT(nonzero, 0u);
}

TEST(TelemetryOracle, C1C2) {
    std::size_t checked = 0;
    for (const auto& [s, seed] : states()) {
        RandomStream r(seed, 8);
        for (int i = 0; i < 40; ++i) {
            const Vertex u = rv(r, s), a = rv(r, s), b = rv(r, s);
            if (!oracle::all_distinct({u, a, b}) || s.is_colored(u, a) || s.is_colored(u, b) || s.is_colored(a, b))
                continue;
            const auto [c1, c2] = oracle::C(s, u, a, b);
            ASSERT_EQ(measure_C1(s, u, a, b), c1);
            ASSERT_EQ(measure_C2(s, u, a, b), c2);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100u);
}

TEST(TelemetryOracle, DEF) {
    std::uint64_t nonzero = 0;
    for (std::size_t i = 0; i < states().size(); i += 2) {
        const auto& [s, seed] = states()[i];
        RandomStream r(seed, 9);
        for (int j = 0; j < 3; ++j) {
            const Vertex u = rv(r, s);
            const Color k = rc(r, s);
            const std::uint64_t D = measure_D(s, u, k);
            ASSERT_EQ(D, oracle::D(s, u, k)) << "D";
            ASSERT_EQ(measure_E(s, u, k), oracle::E(s, u, k)) << "E";
            ASSERT_EQ(measure_F(s, u, k), oracle::F(s, u, k)) << "F";
            nonzero += D > 0;
        }
    }
    EXPECT_GT(nonzero, 0u);
}

TEST(TelemetryOracle, Z) {
    const std::array<std::array<int, 3>, 7> patterns{
        {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}}};
    std::array<std::uint64_t, 7> nonzero{};
    for (const auto& [s, seed] : states()) {
        RandomStream r(seed, 10);
        for (int j = 0; j < 3; ++j) {
            const Vertex u = rv(r, s), v = rv(r, s);
            if (u == v) continue;
            // a used color for the middle edge makes the patterns with a2 = 1 nontrivial
            Color k = rc(r, s);
            if (j == 0) {
                const Vertex x = rv(r, s), y = rv(r, s);
                if (x != y && s.is_colored(x, y)) k = s.color(x, y);
            }
            for (std::size_t p = 0; p < patterns.size(); ++p) {
                const auto [a1, a2, a3] = patterns[p];
                const std::uint64_t z = measure_Z(s, u, v, k, a1, a2, a3);
                ASSERT_EQ(z, oracle::Z(s, u, v, k, a1, a2, a3)) << a1 << a2 << a3;
                nonzero[p] += z > 0;
            }
        }
    }
    for (std::uint64_t c : nonzero) EXPECT_GT(c, 0u);
    EXPECT_THROW(measure_Z(states()[0].state, 0, 1, 0, 1, 1, 1), std::invalid_argument);
}

TEST(TelemetryOracle, PathFamilies) {
    std::array<std::uint64_t, 4> nonzero{};
    for (const auto& [s, seed] : states()) {
        RandomStream r(seed, 11);
        for (int j = 0; j < 20; ++j) {
            const Vertex u = rv(r, s), v = rv(r, s), w = rv(r, s), x = rv(r, s);
            const Color k = rc(r, s), k2 = rc(r, s);
            if (u != v) {
                const auto xi = measure_Xi(s, u, v, k);
                ASSERT_EQ(xi, oracle::Xi(s, u, v, k));
                const auto psi = measure_Psi(s, u, v, k, k2);
                ASSERT_EQ(psi, oracle::Psi(s, u, v, k, k2));
                nonzero[0] += xi > 0;
                nonzero[2] += psi > 0;
            }
            if (oracle::all_distinct({u, v, w})) {
                const auto lam = measure_Lambda(s, u, v, w);
                ASSERT_EQ(lam, oracle::Lambda(s, u, v, w));
                nonzero[3] += lam > 0;
            }
            if (oracle::all_distinct({u, v, w, x})) {
                const auto phi = measure_Phi(s, u, v, w, x);
                ASSERT_EQ(phi, oracle::Phi(s, u, v, w, x));
                nonzero[1] += phi > 0;
            }
        }
    }
    for (std::uint64_t c : nonzero) EXPECT_GT(c, 0u);
}

TEST(TelemetryOracle, XiCountsForbiddingPaths) {
    for (const auto& [s, seed] : states())
        for (Vertex u = 0; u < s.n(); ++u)
            for (Vertex v = u + 1; v < s.n(); ++v) {
                const std::vector<Color> forbidden = s.forbidden_by_path(u, v);
                for (Color k = 0; k < oracle::phase1_colors(s); ++k) {
                    const bool listed = std::find(forbidden.begin(), forbidden.end(), k) != forbidden.end();
                    ASSERT_EQ(measure_Xi(s, u, v, k) >= 1, listed);
                }
            }
}

TEST(Snapshot, RecordsAreConsistent) {
    const ColoringState& s = states()[41].state;
    RandomStream rng(3, Substream::telemetry);
    const auto records = snapshot(s, SamplePlan{}, rng, 0.4);
    ASSERT_FALSE(records.empty());
    EXPECT_EQ(records[0].family, Family::Q);
    EXPECT_EQ(records[0].empirical, static_cast<double>(oracle::triangles(s)));
    for (const TelemetryRecord& r : records) {
        EXPECT_EQ(r.step, s.steps());
        EXPECT_DOUBLE_EQ(r.t, static_cast<double>(s.steps()) / (s.n() * s.n()));
        if (r.predicted > 0) {
            EXPECT_DOUBLE_EQ(r.rel_dev, r.empirical / r.predicted - 1.0);
        }
    }
}

TEST(Snapshot, DeterministicAndFiltered) {
    const ColoringState& s = states()[17].state;
    RandomStream a(5, Substream::telemetry), b(5, Substream::telemetry);
    EXPECT_EQ(snapshot(s, SamplePlan{}, a, 0.4), snapshot(s, SamplePlan{}, b, 0.4));
    RandomStream c(5, Substream::telemetry);
    for (const TelemetryRecord& r : snapshot(s, SamplePlan::only({Family::Y, Family::Xi}, 4), c, 0.4))
        EXPECT_TRUE(r.family == Family::Y || r.family == Family::Xi);
    SamplePlan zero = SamplePlan::only({Family::Y}, 0);
    EXPECT_THROW(snapshot(s, zero, c, 0.4), std::invalid_argument);
}

TEST(TelemetryCsv, RoundTrip) {
    const ColoringState& s = states()[63].state;
    RandomStream rng(8, Substream::telemetry);
    auto records = snapshot(s, SamplePlan{}, rng, 0.4);
    TelemetryRecord odd;
    odd.family = Family::Psi;
    odd.args = {1, 2, 3, 4};
    odd.rel_dev = std::numeric_limits<double>::quiet_NaN();
    odd.t = 0.1 / 3.0;
    records.push_back(odd);
    std::stringstream ss;
    write_telemetry_csv(ss, records);
    EXPECT_EQ(read_telemetry_csv(ss), records);
}

TEST(TelemetryCsv, RejectsBadRows) {
    std::stringstream missing("nope\n");
    EXPECT_THROW(read_telemetry_csv(missing), std::runtime_error);
    std::stringstream short_row(std::string(kTelemetryHeader) + "\n1,0.1,Q\n");
    EXPECT_THROW(read_telemetry_csv(short_row), std::runtime_error);
}

TEST(Families, NamesRoundTrip) {
    for (std::size_t i = 0; i < kFamilyCount; ++i) {
        const auto f = static_cast<Family>(i);
        EXPECT_EQ(parse_family(to_string(f)), f);
    }
}
