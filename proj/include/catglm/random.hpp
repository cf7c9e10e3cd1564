#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace catglm {

/// Tags that separate the independent random streams derived from one seed.
enum class StreamTag : std::uint32_t {
    split = 1,
    validation = 2,
    grasp_repeat = 3,
    reshuffle_seed = 4,
};

/// Deterministic engine for stream (seed, tag, index). mt19937_64 and
/// seed_seq are fully specified, so the sequence is portable.
inline std::mt19937_64 make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform draw in [0, bound). Rejection sampling instead of
/// std::uniform_int_distribution, whose output is implementation-defined.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

template <typename T>
void shuffle_in_place(std::span<T> values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace catglm
