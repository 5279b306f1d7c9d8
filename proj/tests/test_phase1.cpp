#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "oracles.hpp"
#include "ramsey_forge/phase1.hpp"

using namespace ramsey_forge;

namespace {

std::vector<ColoringState> sample_states() {
    std::vector<ColoringState> out;
    for (std::uint64_t seed = 1; seed <= 8; ++seed)
        for (std::uint64_t steps : {0u, 3u, 8u, 20u, 1000u})
            out.push_back(oracle::reachable_state(8 + static_cast<std::uint32_t>(seed % 4) * 2, 0.4, seed, steps));
    return out;
}

}  // namespace

TEST(Availability, MatchesDefinition) {
    for (const ColoringState& s : sample_states())
        for (Vertex u = 0; u < s.n(); ++u)
            for (Vertex v = 0; v < s.n(); ++v) {
                if (u == v) continue;
                for (Color k = 0; k < oracle::phase1_colors(s); ++k)
                    ASSERT_EQ(s.available_at_edge(u, v, k), oracle::available(s, u, v, k))
                        << u << ' ' << v << ' ' << k << " step " << s.steps();
            }
}

TEST(Availability, PathColorsMatchDefinition) {
    for (const ColoringState& s : sample_states())
        for (Vertex u = 0; u < s.n(); ++u)
            for (Vertex v = u + 1; v < s.n(); ++v)
                for (Color k = 0; k < oracle::phase1_colors(s); ++k)
                    ASSERT_EQ(s.has_alternating_path(u, v, k), oracle::alternating_path(s, u, v, k));
}

TEST(Candidates, MatchDefinition) {
    for (const ColoringState& s : sample_states())
        for (Vertex u = 0; u < s.n(); ++u)
            for (Vertex u1 = 0; u1 < s.n(); ++u1)
                for (Vertex u2 = u1 + 1; u2 < s.n(); ++u2) {
                    if (u == u1 || u == u2 || s.is_colored(u, u1) || s.is_colored(u, u2) || s.is_colored(u1, u2))
                        continue;
                    const Candidates c = enumerate_candidates(s, u, u1, u2);
                    const auto [c1, c2] = oracle::C(s, u, u1, u2);
                    ASSERT_EQ(c.one.size(), c1);
                    ASSERT_EQ(c.two.size(), c2);
                    for (Color k : c.one) ASSERT_TRUE(oracle::one_available(s, u, u1, u2, k));
                    for (Color k : c.two) ASSERT_TRUE(oracle::two_available(s, u, u1, u2, k));
                }
}

TEST(Phase1, SkipRunsToAllStarvedOrNoTriangles) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ProcessConfig cfg;
        cfg.n = 20;
        cfg.seed = seed;
        cfg.on_no_pair = NoPairPolicy::skip;
        RandomStream sp(seed, Substream::special_sets), rng(seed, Substream::phase1);
        ColoringState st = ColoringState::init(cfg, sp);
        const Phase1Report r = run_phase1(st, rng, cfg);
        EXPECT_TRUE(r.termination == Termination::all_starved || r.termination == Termination::no_triangles);
        EXPECT_EQ(r.edges_colored, 3 * r.steps);
        EXPECT_EQ(st.live_triangles(), 0u);
    }
}

TEST(Phase1, TerminateStopsAtFirstStarvedTriangle) {
    ProcessConfig cfg;
    cfg.n = 20;
    cfg.on_no_pair = NoPairPolicy::terminate;
    RandomStream sp(3, Substream::special_sets), rng(3, Substream::phase1);
    ColoringState st = ColoringState::init(cfg, sp);
    const Phase1Report r = run_phase1(st, rng, cfg);
    EXPECT_TRUE(r.termination == Termination::no_pair_available || r.termination == Termination::no_triangles);
    EXPECT_EQ(r.skips, 0u);
}

TEST(Phase1, StepLimitAndDeterminism) {
    ProcessConfig cfg;
    cfg.n = 30;
    cfg.on_no_pair = NoPairPolicy::skip;
    cfg.stop = StopCriterion::steps(25);
    auto go = [&] {
        RandomStream sp(11, Substream::special_sets), rng(11, Substream::phase1);
        ColoringState st = ColoringState::init(cfg, sp);
        const Phase1Report r = run_phase1(st, rng, cfg);
        EXPECT_EQ(r.termination, Termination::max_steps);
        EXPECT_EQ(r.steps, 25u);
        return st.to_coloring();
    };
    EXPECT_EQ(go(), go());
}

TEST(Phase1, EachStepColorsAnAvailablePair) {
    ProcessConfig cfg;
    cfg.n = 12;
    cfg.epsilon = 0.4;
    cfg.on_no_pair = NoPairPolicy::skip;
    RandomStream sp(5, Substream::special_sets), rng(5, Substream::phase1);
    ColoringState st = ColoringState::init(cfg, sp);
    while (true) {
        const ColoringState before = st;
        const StepOutcome out = step(st, rng, NoPairPolicy::skip);
        if (out.tag == StepOutcome::Tag::no_triangles) break;
        if (out.tag != StepOutcome::Tag::colored) continue;
        const OrientedTriangle& t = out.triangle;
        EXPECT_TRUE(oracle::two_available(before, t.apex, t.left, t.right, out.pair.k));
        EXPECT_TRUE(oracle::one_available(before, t.apex, t.left, t.right, out.pair.k1));
        EXPECT_EQ(st.color(t.apex, t.left), out.pair.k);
        EXPECT_EQ(st.color(t.apex, t.right), out.pair.k);
        EXPECT_EQ(st.color(t.left, t.right), out.pair.k1);
    }
}

TEST(Phase1, NoSpecialColorsMeansNoPair) {
    // without special colors C1 is always empty
    const PaletteSpec p = PaletteSpec::for_run(6, 0.5);
    ColoringState st(6, p, std::vector<std::vector<Color>>(6));
    RandomStream rng(1, Substream::phase1);
    const StepOutcome out = step(st, rng, NoPairPolicy::terminate);
    EXPECT_EQ(out.tag, StepOutcome::Tag::no_pair_available);
    EXPECT_EQ(out.c1_size, 0u);
}

TEST(Phase1, DrawPairIsUniformOverCandidates) {
    Candidates c;
    c.one = {2, 5, 9};
    c.two = {1, 4};
    RandomStream rng(9, 0);
    std::map<std::pair<Color, Color>, int> hist;
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        const ColorPair p = draw_pair(c, rng);
        ++hist[{p.k, p.k1}];
    }
    ASSERT_EQ(hist.size(), 6u);
    const double mean = draws / 6.0, sd = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
    for (const auto& [pair, count] : hist) EXPECT_NEAR(count, mean, 4 * sd);
}
