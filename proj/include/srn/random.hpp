#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace srn {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded from (seed, stream id); each path owns one stream.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    for (auto& w : s_) w = splitmix64(k);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t out = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

  // Uniform on (0,1); zero is resampled.
  double uniform() {
    for (;;) {
      double u = static_cast<double>((*this)() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  // Unit exponential as log(1/u).
  double exponential() { return -std::log(uniform()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Stream ids for distinct purposes never collide: purpose in the top byte.
constexpr std::uint64_t stream_id(std::uint64_t purpose, std::uint64_t level, std::uint64_t index) {
  return (purpose << 56) ^ (level << 44) ^ index;
}

// Exact Poisson sampler: inversion for small means, PTRS (Hormann 1993) above.
// Means below this use sequential inversion, larger ones the PTRS rejection sampler.
inline constexpr double kPoissonInversionLimit = 10.0;

std::int64_t poisson(Rng& rng, double mean);

// Counts calls to poisson() on this thread; used to check which code paths sample.
std::uint64_t& poisson_call_counter();

}  // namespace srn
