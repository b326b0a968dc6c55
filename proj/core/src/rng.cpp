#include "hagcl/rng.hpp"

#include <numeric>

#include "hagcl/error.hpp"

namespace hagcl::rng {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) { return mix(seed ^ mix(tag)); }

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t a) {
  return mix(derive(seed, tag) ^ mix(a + 0x51ull));
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
  return mix(derive(seed, tag, a) ^ mix(b + 0xa3ull));
}

double uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = mix(seed ^ mix(counter + 0x2545f4914f6cdd1dull));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double uniform_in(std::uint64_t seed, std::uint64_t counter, double lo, double hi) {
  return lo + (hi - lo) * uniform(seed, counter);
}

std::uint64_t bounded(std::uint64_t seed, std::uint64_t counter, std::uint64_t n) {
  if (n == 0) throw ContractError("rng::bounded: n must be >= 1");
  const std::uint64_t bits = mix(seed ^ mix(counter + 0x452821e638d01377ull));
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(seed, i, i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace hagcl::rng
