#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace srn {

// Streaming central moments up to order four; merge is associative.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;

  void add(double x) {
    Moments one;
    one.n = 1.0;
    one.mean = x;
    merge(one);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double N = n + o.n;
    const double delta = o.mean - mean;
    const double d2 = delta * delta, d3 = d2 * delta, d4 = d2 * d2;
    const double m4n = m4 + o.m4 + d4 * n * o.n * (n * n - n * o.n + o.n * o.n) / (N * N * N) +
                       6.0 * d2 * (n * n * o.m2 + o.n * o.n * m2) / (N * N) + 4.0 * delta * (n * o.m3 - o.n * m3) / N;
    const double m3n = m3 + o.m3 + d3 * n * o.n * (n - o.n) / (N * N) + 3.0 * delta * (n * o.m2 - o.n * m2) / N;
    const double m2n = m2 + o.m2 + d2 * n * o.n / N;
    mean += delta * o.n / N;
    m2 = m2n;
    m3 = m3n;
    m4 = m4n;
    n = N;
  }

  double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double std_error() const { return n > 1.0 ? std::sqrt(variance() / n) : 0.0; }
  // mu_4 / sigma^4 (not the excess kurtosis).
  double kurtosis() const { return m2 > 0.0 ? n * m4 / (m2 * m2) : 0.0; }
  // Approximate variance of the sample variance, (mu_4 - sigma^4) / n.
  double variance_of_variance() const {
    if (n < 2.0) return 0.0;
    const double s2 = m2 / n;
    return std::max(0.0, (m4 / n - s2 * s2) / n);
  }
};

inline Moments moments_of(std::span<const double> xs) {
  Moments m;
  for (double x : xs) m.add(x);
  return m;
}

}  // namespace srn
