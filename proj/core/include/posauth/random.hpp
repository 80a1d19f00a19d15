#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace posauth {

using RandomStream = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a key path into the master seed. Distinct paths give statistically
/// independent seeds, so workers can own disjoint substreams without sharing
/// state, and results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

RandomStream make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Standard normal draw. A fresh distribution object per call keeps the
/// number of engine draws independent of call history.
double standard_normal(RandomStream& rng);

double uniform(RandomStream& rng, double lo, double hi);

}  // namespace posauth
