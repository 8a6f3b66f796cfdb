#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace binomix {

// splitmix64 step; used both as a mixer for stream derivation and to seed
// the main engine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive a child seed from a root seed and up to three counters. Pure
// function of its arguments, so any (grid point, replicate) stream can be
// reconstructed independently of thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  s = h ^ (a + 0x9e3779b97f4a7c15ULL);
  h = splitmix64(s);
  s = h ^ (b + 0xd1b54a32d192ed03ULL);
  h = splitmix64(s);
  s = h ^ (c + 0x8cb92ba72f3d8dd7ULL);
  return splitmix64(s);
}

// xoshiro256++, self-contained so that draws are identical on every
// platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Inversion sampler enumerating outcomes outward from the mode, so the
  // starting pmf never underflows for large t. Deterministic everywhere.
  int next_binomial(int t, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return t;
    if (p > 0.5) return t - next_binomial(t, 1.0 - p);
    const double u = next_double();
    const int mode = static_cast<int>((t + 1) * p);
    double log_pm = std::lgamma(t + 1.0) - std::lgamma(mode + 1.0) -
                    std::lgamma(t - mode + 1.0) + mode * std::log(p) +
                    (t - mode) * std::log1p(-p);
    const double pm = std::exp(log_pm);
    const double odds = p / (1.0 - p);
    double acc = pm;
    if (u <= acc) return mode;
    double pmf_lo = pm, pmf_hi = pm;
    int lo = mode, hi = mode;
    while (lo > 0 || hi < t) {
      if (hi < t) {
        pmf_hi *= odds * static_cast<double>(t - hi) /
                  static_cast<double>(hi + 1);
        ++hi;
        acc += pmf_hi;
        if (u <= acc) return hi;
      }
      if (lo > 0) {
        pmf_lo *= static_cast<double>(lo) /
                  (odds * static_cast<double>(t - lo + 1));
        --lo;
        acc += pmf_lo;
        if (u <= acc) return lo;
      }
    }
    // Floating point left a sliver of mass unassigned; land on the mode.
    return mode;
  }

  // Index draw from a cumulative weight table (ascending, last entry ~1).
  std::size_t next_index(const std::vector<double>& cumulative) {
    double u = next_double();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (u <= cumulative[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

}  // namespace binomix
