#include "srn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srn::oracle {

double decay_exact_mean(double x0, double c, double T) { return x0 * std::exp(-c * T); }

double decay_exact_variance(double x0, double c, double T) {
  const double p = std::exp(-c * T);
  return x0 * p * (1.0 - p);
}

VarianceEstimate mc_variance_oracle(const std::function<double(std::uint64_t)>& sample, double cv_target,
                                    std::size_t initial, std::size_t max_samples) {
  std::vector<double> xs;
  std::size_t target = std::max<std::size_t>(2, initial);
  VarianceEstimate out;
  for (;;) {
    while (xs.size() < target) xs.push_back(sample(xs.size()));
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
      const double d = (x - mean) * (x - mean);
      m2 += d;
      m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    out.mean = mean;
    out.samples = xs.size();
    out.variance = m2 * n / (n - 1.0);
    out.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    out.cv = m2 > 0.0 ? std::sqrt(std::max(0.0, m4 - m2 * m2) / n) / m2 : 0.0;
    if (out.cv < cv_target || xs.size() >= max_samples) return out;
    target = std::min(max_samples, 2 * xs.size());
  }
}

double three_point(Rng& rng, double p) {
  const double u = rng.uniform();
  if (u < p) return -1.0;
  if (u < 2.0 * p) return 1.0;
  return 0.0;
}

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binomial_pmf(std::int64_t n, std::int64_t k, double p) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(log_choose(n, k) + static_cast<double>(k) * std::log(p) +
                  static_cast<double>(n - k) * std::log1p(-p));
}

double poisson_pmf(double lambda, std::int64_t k) {
  if (lambda <= 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0));
}

double propensity_change(const BridgeInstance& inst, std::int64_t Q) {
  return inst.a(inst.x + inst.nu * Q) - inst.a(inst.x);
}

}  // namespace

std::vector<std::pair<std::int64_t, double>> bridge_law(const BridgeInstance& inst, std::int64_t Y, std::int64_t Q) {
  if (Q < 0 || Q > Y) throw std::invalid_argument("bridge_law: need 0 <= Q <= Y");
  const double da = propensity_change(inst, Q);
  std::vector<std::pair<std::int64_t, double>> law;
  if (da >= 0.0) {
    // nu R', R' ~ Poisson(da dt / 2).
    const double lambda = da * inst.dt / 2.0;
    double mass = 0.0;
    for (std::int64_t k = 0; mass < 1.0 - 1e-15 && k < 100000; ++k) {
      const double p = poisson_pmf(lambda, k);
      mass += p;
      law.emplace_back(inst.nu * k, p);
      if (lambda == 0.0) break;
    }
  } else {
    // -nu P'', P'' ~ binomial(Y - Q, -da / a(x)).
    const double p = -da / inst.a(inst.x);
    for (std::int64_t k = 0; k <= Y - Q; ++k) law.emplace_back(-inst.nu * k, binomial_pmf(Y - Q, k, p));
  }
  return law;
}

BridgeTable bridge_local_error_oracle(const BridgeInstance& inst, double tail) {
  BridgeTable table;
  const double a0 = inst.a(inst.x);
  const double lambda = a0 * inst.dt;
  double covered = 0.0;
  double second = 0.0;
  for (std::int64_t Y = 0; 1.0 - covered > tail && Y < 100000; ++Y) {
    const double pY = poisson_pmf(lambda, Y);
    covered += pY;
    BridgeRow row;
    row.Y = Y;
    row.probability = pY;
    double m1 = 0.0, m2 = 0.0;
    for (std::int64_t Q = 0; Q <= Y; ++Q) {
      const double pQ = binomial_pmf(Y, Q, 0.5);
      for (const auto& [e, p] : bridge_law(inst, Y, Q)) {
        const double v = static_cast<double>(e);
        m1 += pQ * p * v;
        m2 += pQ * p * v * v;
      }
    }
    row.mean = m1;
    row.variance = std::max(0.0, m2 - m1 * m1);
    table.mean += pY * m1;
    second += pY * m2;
    table.rows.push_back(row);
    if (lambda == 0.0) break;
  }
  table.variance = second - table.mean * table.mean;
  table.neglected_mass = std::max(0.0, 1.0 - covered);

  const double nu = static_cast<double>(inst.nu);
  const double G = inst.da(inst.x) * nu;  // a' nu
  const double half = a0 * inst.dt / 2.0;
  const double mu = G * half;
  table.taylor_mean = nu * inst.dt / 2.0 * mu;
  table.taylor_variance =
      nu * nu * (inst.dt * inst.dt * inst.dt / 8.0 * G * G * a0 + inst.dt / 2.0 * std::abs(G) * half);
  return table;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double s = std::sqrt(ne);
  const double lambda = (s + 0.12 + 0.11 / s) * d;
  if (lambda < 1e-3) return 1.0;
  double q = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace srn::oracle
