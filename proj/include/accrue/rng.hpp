#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace accrue {

// One SplitMix64 step. Used to spread seeds; state advances in place.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (base, stream, index). Distinct
// (stream, index) pairs give decorrelated generators for parallel tasks.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream,
                              std::uint64_t index = 0) {
  std::uint64_t s = base;
  s ^= splitmix64(s) + 0x9e3779b97f4a7c15ull * (stream + 1);
  s ^= splitmix64(s) + 0xd1b54a32d192ed03ull * (index + 1);
  return splitmix64(s);
}

// Seedable uniform source. Double draws use the top 53 bits so the stream is
// identical across platforms; uniform01() never returns 0 or 1.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on the open interval (0, 1): midpoints of a 2^-53 grid.
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Modulo bias is < n / 2^64, irrelevant here.
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

// Fisher-Yates shuffle driven by Rng so the permutation is seed-stable.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace accrue
