#include "srn/random.hpp"

#include <array>
#include <cmath>

namespace srn {

std::uint64_t& poisson_call_counter() {
  thread_local std::uint64_t count = 0;
  return count;
}

namespace {

std::int64_t poisson_inversion(Rng& rng, double mean) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;
    cdf = next;
  }
  return k;
}

// log(k!) from a table for small k.
double log_factorial(double k) {
  static const auto table = [] {
    std::array<double, 256> t{};
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < static_cast<double>(table.size())) return table[static_cast<std::size_t>(k)];
  int sign = 0;
  return ::lgamma_r(k + 1.0, &sign);
}

std::int64_t poisson_ptrs(Rng& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    const double lg = log_factorial(kd);
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -mean + kd * loglam - lg)
      return static_cast<std::int64_t>(kd);
  }
}

}  // namespace

std::int64_t poisson(Rng& rng, double mean) {
  ++poisson_call_counter();
  if (!(mean > 0.0)) return 0;
  if (mean < kPoissonInversionLimit) return poisson_inversion(rng, mean);
  return poisson_ptrs(rng, mean);
}

}  // namespace srn
