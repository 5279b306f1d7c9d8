#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "ramsey_forge/coloring.hpp"
#include "ramsey_forge/config.hpp"
#include "ramsey_forge/random.hpp"

using namespace ramsey_forge;

TEST(Palette, SizesAtSixty) {
    const PaletteSpec p = PaletteSpec::for_run(60, 0.1);
    EXPECT_EQ(p.total, 56u);
    EXPECT_EQ(p.phase1, 53u);
    EXPECT_EQ(p.reserved, 3u);
}

TEST(Palette, ExactProductsDoNotRoundUp) {
    // (5/6 + 1/6) * 12 = 12 exactly, though the double product may be 12.000000000000002
    const PaletteSpec p = PaletteSpec::for_run(12, 1.0 / 6.0);
    EXPECT_EQ(p.total, 12u);
    EXPECT_EQ(robust_ceil(3.0000000000000004), 3u);
    EXPECT_EQ(robust_ceil(3.001), 4u);
}

TEST(Palette, ReservedAtLeastOne) {
    for (std::uint32_t n : {4u, 5u, 7u, 10u, 13u}) {
        const PaletteSpec p = PaletteSpec::for_run(n, 0.01);
        EXPECT_GE(p.reserved, 1u) << n;
        EXPECT_EQ(p.total, p.phase1 + p.reserved);
    }
}

TEST(Palette, SpecialProbability) {
    EXPECT_NEAR(special_probability(0.1), 0.05 / (5.0 / 6.0 + 0.05), 1e-15);
    EXPECT_NEAR(special_probability(0.005), 0.00299103, 1e-8);
}

TEST(Config, RejectsBadInput) {
    ProcessConfig c;
    c.n = 3;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.n = 10;
    c.epsilon = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.epsilon = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_THROW(parse_no_pair_policy("never"), std::invalid_argument);
}

TEST(Random, SameSeedSameStream) {
    RandomStream a(42, Substream::phase1), b(42, Substream::phase1), c(42, Substream::phase2);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Random, UniformBelowInRangeAndRoughlyFlat) {
    RandomStream r(7, 9);
    std::array<int, 7> hist{};
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
        const auto x = r.uniform_below(7);
        ASSERT_LT(x, 7u);
        ++hist[x];
    }
    for (int h : hist) EXPECT_NEAR(h, draws / 7.0, 5 * std::sqrt(draws / 7.0));
    EXPECT_EQ(r.uniform_below(1), 0u);
}

TEST(Random, Uniform01) {
    RandomStream r(1, 0);
    double sum = 0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(TriangleStore, RankIsABijection) {
    std::set<std::uint64_t> seen;
    const Vertex n = 9;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            for (Vertex c = b + 1; c < n; ++c) seen.insert(triangle_rank({a, b, c}));
    EXPECT_EQ(seen.size(), choose3(n));
    EXPECT_EQ(*seen.rbegin(), choose3(n) - 1);
}

// Replays runs and compares the incremental triangle count against a recount after every step.
class TriangleReplay : public ::testing::TestWithParam<TriangleSampling> {};

TEST_P(TriangleReplay, CountMatchesRecount) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        for (std::uint32_t n : {6u, 9u, 15u}) {
            ProcessConfig cfg;
            cfg.n = n;
            cfg.epsilon = 0.3;
            cfg.seed = seed;
            cfg.on_no_pair = NoPairPolicy::skip;
            cfg.sampling = GetParam();
            RandomStream sp(seed, Substream::special_sets), rng(seed, Substream::phase1);
            ColoringState st = ColoringState::init(cfg, sp);
            ASSERT_EQ(st.uncolored_triangles(), choose3(n));
            bool ok = true;
            run_phase1(st, rng, cfg, [&](const ColoringState& s, const StepOutcome&) {
                ok = ok && s.uncolored_triangles() == oracle::triangles(s);
            });
            EXPECT_TRUE(ok) << "n=" << n << " seed=" << seed;
            EXPECT_EQ(st.uncolored_triangles(), oracle::triangles(st));
            EXPECT_EQ(st.live_triangles(), 0u);
            if (const TriangleStore* store = st.triangle_store()) {
                for (std::size_t i = 0; i < store->size(); ++i) {
                    const Triangle t = store->at(i);
                    EXPECT_FALSE(st.is_colored(t.a, t.b) || st.is_colored(t.a, t.c) || st.is_colored(t.b, t.c));
                    EXPECT_TRUE(store->contains(t));
                }
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Sampling, TriangleReplay,
                         ::testing::Values(TriangleSampling::explicit_store, TriangleSampling::rejection));

TEST(ColoringState, RejectsRecoloring) {
    ProcessConfig cfg;
    cfg.n = 6;
    ColoringState st(6, cfg.palette(), std::vector<std::vector<Color>>(6));
    st.assign_color(0, 1, 0);
    EXPECT_THROW(st.assign_color(0, 1, 1), AlreadyColored);
    EXPECT_THROW(st.assign_color(1, 0, 2), AlreadyColored);
    EXPECT_THROW(st.assign_color(0, 2, 0), AvailabilityViolation);
}

TEST(ColoringState, SpecialColorsMustBePhase1) {
    const PaletteSpec p = PaletteSpec::for_run(6, 0.1);
    std::vector<std::vector<Color>> special(6);
    special[2] = {static_cast<Color>(p.phase1)};
    EXPECT_THROW(ColoringState(6, p, special), std::invalid_argument);
}

TEST(ColoringFile, RoundTrip) {
    Coloring c(5, 7);
    c.set(0, 1, 3);
    c.set(2, 4, 6);
    c.set(1, 3, 0);
    std::stringstream ss;
    write_coloring(ss, c);
    EXPECT_EQ(read_coloring(ss), c);
}

TEST(ColoringFile, RejectsCorruptInput) {
    const char* bad[] = {
        "",
        "m 4 colors 3\n",
        "n 4 colors 3\n0 1\n",
        "n 4 colors 3\n0 1 3\n",
        "n 4 colors 3\n0 4 1\n",
        "n 4 colors 3\n2 2 1\n",
        "n 4 colors 3\n0 1 1\n1 0 2\n",
        "n 4 colors 3\n0 1 1 9\n",
        "n 4 colors 3\n0 x 1\n",
    };
    for (const char* text : bad) {
        std::stringstream ss(text);
        EXPECT_THROW(read_coloring(ss), ParseError) << text;
    }
}
