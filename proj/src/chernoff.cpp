#include "srn/chernoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace srn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Channel {
  double rate;
  double nu;
};

// D(s) = sum a_j (exp(-s nu_j) - 1) and its first two derivatives.
struct Moment {
  const std::vector<Channel>& ch;

  double D(double s) const {
    double v = 0.0;
    for (const auto& c : ch) v += c.rate * std::expm1(-s * c.nu);
    return v;
  }
  double D1(double s) const {
    double v = 0.0;
    for (const auto& c : ch) v -= c.rate * c.nu * std::exp(-s * c.nu);
    return v;
  }
  double D2(double s) const {
    double v = 0.0;
    for (const auto& c : ch) v += c.rate * c.nu * c.nu * std::exp(-s * c.nu);
    return v;
  }
};

double species_tau(const std::vector<Channel>& ch, double xi, double delta_i) {
  const Moment m{ch};
  const double log_delta = std::log(delta_i);
  const double s0 = -log_delta / xi;
  const double d0 = m.D(s0);
  if (d0 < 0.0) return kInf;
  if (d0 == 0.0) {
    const double d1 = m.D1(s0);
    return d1 > 0.0 ? xi / d1 : kInf;
  }
  // tau'(s) = 0  <=>  h(s) = x D(s) - (log delta + s x) D'(s) = 0, with h strictly decreasing
  // on (s0, inf), h(s0) > 0 and h -> -inf.
  auto h = [&](double s) { return xi * m.D(s) - (log_delta + s * xi) * m.D1(s); };
  double lo = s0, hi = s0;
  double step = std::max(s0, 1e-3);
  for (int k = 0; k < 200; ++k) {
    hi = lo + step;
    if (!(h(hi) >= 0.0)) break;
    lo = hi;
    step *= 2.0;
  }
  double s = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double hv = h(s);
    if (hv > 0.0) lo = s;
    else hi = s;
    const double dh = -(log_delta + s * xi) * m.D2(s);
    double next = dh < 0.0 ? s - hv / dh : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool converged = std::fabs(next - s) <= 1e-10 * std::fabs(next);
    s = next;
    if (converged || hi - lo <= 1e-10 * hi) break;
  }
  return (log_delta + s * xi) / m.D(s);
}

}  // namespace

double chernoff_tau_at(const ReactionNetwork& net, std::size_t species, std::span<const std::int64_t> x,
                       std::span<const double> a, double delta_i, double s) {
  double D = 0.0;
  for (std::size_t j = 0; j < net.reactions(); ++j) D += a[j] * std::expm1(-s * net.nu(j)[species]);
  return (std::log(delta_i) + s * static_cast<double>(x[species])) / D;
}

double chernoff_tau(const ReactionNetwork& net, std::span<const std::int64_t> x, std::span<const double> a,
                    double delta) {
  const std::size_t d = net.species(), J = net.reactions();
  double a0 = 0.0;
  for (std::size_t j = 0; j < J; ++j) a0 += a[j];
  if (!(a0 > 0.0)) return 0.0;
  const double delta_i = delta / static_cast<double>(d);
  double tau = kInf;
  thread_local std::vector<Channel> ch;
  for (std::size_t i = 0; i < d; ++i) {
    ch.clear();
    bool decreasing = false;
    for (std::size_t j = 0; j < J; ++j) {
      const int v = net.nu(j)[i];
      if (v == 0 || a[j] == 0.0) continue;
      ch.push_back({a[j], static_cast<double>(v)});
      decreasing = decreasing || v < 0;
    }
    if (!decreasing) continue;  // species i cannot go down in one leap
    if (x[i] == 0) return 0.0;
    tau = std::min(tau, species_tau(ch, static_cast<double>(x[i]), delta_i));
  }
  return tau;
}

double chernoff_tau(const ReactionNetwork& net, std::span<const std::int64_t> x, double delta) {
  std::vector<double> a(net.reactions());
  net.propensities(x, a);
  return chernoff_tau(net, x, a, delta);
}

}  // namespace srn
