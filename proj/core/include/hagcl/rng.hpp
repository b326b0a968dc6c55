#pragma once

#include <cstdint>
#include <vector>

namespace hagcl::rng {

// Counter-based randomness.  Every draw is a pure function of (seed, counter),
// so element i of a batch always sees the same noise under a given seed no
// matter what happens to the other elements.

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t x);

// Derive a child seed from a parent seed and up to three tags.
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t a);
std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b);

// Uniform double in [0, 1).
double uniform(std::uint64_t seed, std::uint64_t counter);

// Uniform double in [lo, hi).
double uniform_in(std::uint64_t seed, std::uint64_t counter, double lo, double hi);

// Integer in [0, n); n must be >= 1.
std::uint64_t bounded(std::uint64_t seed, std::uint64_t counter, std::uint64_t n);

// Deterministic Fisher-Yates permutation of {0, ..., n-1}.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

// Stream tags.  Every consumer of randomness derives its own stream from the
// single run seed through one of these, which keeps runs reproducible and
// keeps streams independent of each other.
namespace stream {
inline constexpr std::uint64_t kParamInit = 1;
inline constexpr std::uint64_t kBatchShuffle = 2;
inline constexpr std::uint64_t kGumbelEdge = 3;
inline constexpr std::uint64_t kGumbelFeature = 4;
inline constexpr std::uint64_t kPairSample = 5;
inline constexpr std::uint64_t kFoldSplit = 6;
inline constexpr std::uint64_t kProbeSeed = 7;
inline constexpr std::uint64_t kInnerSplit = 8;
}  // namespace stream

}  // namespace hagcl::rng
