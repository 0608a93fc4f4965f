#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace grn {

// splitmix64-style mixer, used to derive independent seeds from (seed, salt)
// pairs without relying on implementation-defined std::hash.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_string(std::uint64_t seed, const std::string& s) {
  std::uint64_t h = seed ^ 0xcbf29ce484222325ull;
  for (unsigned char c : s) h = mix64(h, c + 0x100);
  return h;
}

// Deterministic RNG. The mt19937_64 engine itself is bit-exact by the
// standard; the distribution helpers are hand-rolled because the standard
// library's distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform real in [lo, hi)
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // uniform integer in [lo, hi], inclusive, via rejection sampling
  int uniform_int(int lo, int hi) {
    std::uint64_t range = static_cast<std::uint64_t>(hi) - lo + 1;
    std::uint64_t limit = ~0ull - ~0ull % range;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return lo + static_cast<int>(draw % range);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      std::swap(v[i], v[uniform_int(0, i)]);
    }
  }

  // Independent stream derived from this rng's original seed and a salt.
  Rng fork(std::uint64_t salt) const { return Rng(mix64(seed_, salt)); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace grn
