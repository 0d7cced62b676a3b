#ifndef OPHIST_RNG_HPP
#define OPHIST_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace ophist {

// Deterministic random source for the mutation engine: std::mt19937_64
// (a fixed, standardized algorithm) plus hand-rolled draw helpers, because
// the standard <random> distributions are not bit-stable across library
// implementations. Same seed, same draw sequence, on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Unbiased integer in [0, n) by rejection sampling.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t limit =
        UINT64_MAX - (UINT64_MAX % static_cast<std::uint64_t>(n) + 1) % n;
    std::uint64_t v = next_u64();
    while (v > limit) v = next_u64();
    return static_cast<std::size_t>(v % n);
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i)
      std::swap(items[i - 1], items[uniform_index(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ophist

#endif  // OPHIST_RNG_HPP
