#pragma once

#include <cstdint>
#include <random>

namespace ramsey_forge {

/// Named substreams derived from one run seed.
enum class Substream : std::uint32_t {
    special_sets = 0,
    phase1 = 1,
    phase2 = 2,
    telemetry = 3,
};

/**
 * Seeded random stream with platform-independent output.
 *
 * The engine is std::mt19937_64 (its output sequence is fixed by the standard)
 * seeded through std::seed_seq. Distributions are implemented here because the
 * standard library ones are implementation-defined.
 */
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint32_t stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32), stream_id,
                          0x9e3779b9u};
        engine_.seed(seq);
    }

    RandomStream(std::uint64_t seed, Substream stream)
        : RandomStream(seed, static_cast<std::uint32_t>(stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). Unbiased (Lemire's multiply-and-reject).
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t x = engine_();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = engine_();
                m = static_cast<unsigned __int128>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double prob) { return uniform01() < prob; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ramsey_forge
