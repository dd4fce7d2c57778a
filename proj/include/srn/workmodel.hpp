#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srn/model.hpp"
#include "srn/random.hpp"

namespace srn {

// Seconds per Poisson variate of mean lambda, one branch per sampler regime:
// zero_cost at lambda = 0; below the inversion limit a base cost, a term for entering the search
// loop (probability 1 - e^-lambda) and one per iteration; above it a constant plus a
// rejection overhead that fades like 1/sqrt(lambda).
struct PoissonCostCurve {
  double zero_cost = 0.0;
  double inv_base = 0.0;
  double inv_branch = 0.0;
  double inv_slope = 0.0;
  double ptrs_base = 0.0;
  double ptrs_coef = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> grid;  // measured (lambda, seconds)

  double operator()(double l) const {
    if (!(l > 0.0)) return zero_cost;
    if (l < kPoissonInversionLimit) return inv_base - inv_branch * std::expm1(-l) + inv_slope * l;
    return ptrs_base + ptrs_coef / std::sqrt(l);
  }
};

struct MachineConstants {
  double c1 = 0.0;      // MNRM step, K1 branch (no Chernoff computation)
  double c2 = 0.0;      // MNRM step after a rejected Chernoff step (K2 branch)
  double c3 = 0.0;      // Chernoff step-size computation
  double c_star = 0.0;  // SSA step
  double k1 = 0.0;      // c3 / c1
  PoissonCostCurve cp;
  std::string fingerprint;
  std::string timestamp;
  std::string model_hash;
};

double poisson_cost(const MachineConstants& m, double lambda);

// Cost of a tau-leap step of length tau relative to the exact steps it replaces.
double k2(const MachineConstants& m, std::span<const double> a, double tau);
double k2(const ReactionNetwork& net, std::span<const std::int64_t> x, double delta, const MachineConstants& m);

// Modeled work of a path from its step counts and the Poisson means it sampled.
double path_cost(const MachineConstants& m, std::int64_t n_k1, std::int64_t n_k2, std::int64_t n_tl,
                 std::span<const double> poisson_means);

// Least-squares fit of each regime of the curve to the measured grid.
PoissonCostCurve fit_poisson_cost(std::vector<std::pair<double, double>> grid);

std::string host_fingerprint();

// Times each branch of the switching rule on states visited by exact paths of the model.
MachineConstants calibrate_machine(const Model& model, std::size_t repetitions = 100000);

// Profiles are JSON documents; load throws CalibrationError on a missing file or
// a fingerprint/model mismatch.
void save_profile(const MachineConstants& m, const std::string& path);
MachineConstants load_profile(const std::string& path, const std::string& expected_model_hash);

// Fixed constants of plausible magnitude for tests that must not depend on timing.
MachineConstants reference_constants();

}  // namespace srn
