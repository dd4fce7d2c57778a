#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "srn/random.hpp"

namespace srn::oracle {

double decay_exact_mean(double x0, double c, double T);
// X(T) is binomial(x0, e^{-cT}).
double decay_exact_variance(double x0, double c, double T);

struct VarianceEstimate {
  double variance = 0.0;
  double mean = 0.0;
  double kurtosis = 0.0;  // mu_4 / sigma^4
  double cv = 0.0;        // coefficient of variation of the variance estimate
  std::size_t samples = 0;
};

// Brute-force sample variance of sample(0), sample(1), ..., doubling the sample size until the
// variance estimate has coefficient of variation below cv_target (or max_samples is reached).
VarianceEstimate mc_variance_oracle(const std::function<double(std::uint64_t)>& sample, double cv_target,
                                    std::size_t initial = 100, std::size_t max_samples = std::size_t{1} << 22);

// chi in {-1, 0, 1} with P(chi = 1) = P(chi = -1) = p.
double three_point(Rng& rng, double p);

// One species, one reaction: a(x) with derivative da(x), state change nu, tau-leap step dt from x.
struct BridgeInstance {
  std::function<double(std::int64_t)> a;
  std::function<double(std::int64_t)> da;
  std::int64_t nu = -1;
  std::int64_t x = 0;
  double dt = 0.0;
};

// Law of the local error given the full-step count Y and the first-half count Q, as (value, prob).
std::vector<std::pair<std::int64_t, double>> bridge_law(const BridgeInstance& inst, std::int64_t Y, std::int64_t Q);

struct BridgeRow {
  std::int64_t Y = 0;
  double probability = 0.0;  // P(Y)
  double mean = 0.0;         // E[e | Y]
  double variance = 0.0;     // Var[e | Y]
};

struct BridgeTable {
  std::vector<BridgeRow> rows;
  double mean = 0.0;
  double variance = 0.0;
  double taylor_mean = 0.0;      // nu dt/2 mu with mu = (a' nu) a dt / 2
  double taylor_variance = 0.0;  // nu^2 [dt^3/8 (a' nu)^2 a + dt/2 E|a' nu Q|]
  double neglected_mass = 0.0;
};

// Enumerates Y ~ Poisson(a dt), Q | Y ~ binomial(Y, 1/2) and the bridge law of the local error.
BridgeTable bridge_local_error_oracle(const BridgeInstance& inst, double tail = 1e-13);

// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_pvalue(double d, std::size_t n, std::size_t m);

}  // namespace srn::oracle
