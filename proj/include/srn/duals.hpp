#pragma once

#include <span>
#include <vector>

#include "srn/network.hpp"
#include "srn/path.hpp"

namespace srn {

struct DualAccumulators {
  double weak_error = 0.0;  // E_I of the path
  double s_e = 0.0;         // conditional mean part of the level-difference variance
  double s_v = 0.0;         // conditional variance part, nonnegative
};

// phi[n] for n = 0..N (N = number of steps): phi[N] = grad g, and
// phi[n] = phi[n+1] + dt_n * sum_j grad a_j(x_n) (nu_j . phi[n+1]).
std::vector<std::vector<double>> dual_weights(const ReactionNetwork& net, const PathRecord& path,
                                              std::span<const double> grad_g);

// Weak error of one path: sum over tau-leap steps n of
// dt_n/2 * sum_j (phi[n+1] . nu_j) (a_j(x_{n+1}) - a_j(x_n)).
double weak_error_path(const ReactionNetwork& net, const PathRecord& path, std::span<const double> grad_g);

// (S_e, S_v) of one path; the Gaussian approximation of the propensity increment is used for
// channels with a_j dt/2 above `threshold`.
std::pair<double, double> strong_error_terms(const ReactionNetwork& net, const PathRecord& path,
                                             std::span<const double> grad_g, double threshold = 10.0);

// All three in one backward sweep.
DualAccumulators dual_terms(const ReactionNetwork& net, const PathRecord& path, std::span<const double> grad_g,
                            double threshold = 10.0);

// Sample variance of S_e plus sample mean of S_v. Needs at least two paths.
double vhat_estimator(std::span<const double> s_e, std::span<const double> s_v);

double normal_cdf(double x);

}  // namespace srn
