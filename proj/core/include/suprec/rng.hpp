#pragma once

#include <cstdint>
#include <random>

namespace suprec {

using Rng = std::mt19937_64;

/// Tags separating the independent random streams of a single trial.
enum class StreamTag : std::uint64_t {
  Support = 1,
  Variance = 2,
  Signals = 3,
  Matrices = 4,
  Noise = 5,
  MonteCarlo = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive mix of two words.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

/// Seed of the stream identified by (master_seed, trial_index, tag).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index, StreamTag tag);

Rng make_stream(std::uint64_t master_seed, std::uint64_t trial_index, StreamTag tag);

}  // namespace suprec
