#pragma once

#include <cstdint>
#include <vector>

namespace mtpoison {

// splitmix64; used both to derive sub-seeds and as the mixing step for
// stable ids of derived sentence pairs.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ b);
}

// Deterministic RNG with portable bounded draws. std::uniform_int_distribution
// is implementation-defined, so sampling and shuffling go through here to keep
// seeded runs byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x6a09e667f3bcc909ULL) {}

  std::uint64_t next() {
    state_ = mix64(state_ ^ 0xd1b54a32d192ed03ULL);
    return state_;
  }

  // Unbiased draw in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  double unit() {  // [0, 1)
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First k indices of a shuffled [0, n) range; sampling without replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx);
    idx.resize(k < n ? k : n);
    return idx;
  }

 private:
  std::uint64_t state_;
};

}  // namespace mtpoison
