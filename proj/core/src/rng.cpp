#include "suprec/rng.hpp"

namespace suprec {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index, StreamTag tag) {
  return hash_combine(hash_combine(splitmix64(master_seed), trial_index), static_cast<std::uint64_t>(tag));
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t trial_index, StreamTag tag) {
  return Rng(derive_seed(master_seed, trial_index, tag));
}

}  // namespace suprec
