#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srn/hybrid.hpp"
#include "srn/model.hpp"
#include "srn/sampler.hpp"
#include "srn/workmodel.hpp"

namespace srn {

struct MlmcConfig {
  double tol = 1e-2;                 // relative tolerance
  double confidence = 1.96;          // C_A
  std::size_t refine_factor = 2;     // R
  double delta0 = 1e-2;
  double delta_refine = 10.0;        // c in delta <- delta / c
  double cv_target = 0.05;
  std::size_t initial_batch = 100;   // M_0 of the CV-controlled batches
  std::size_t max_batch_samples = std::size_t{1} << 16;
  double threshold = 10.0;           // Gaussian-regime cut for the variance estimator
  std::size_t max_levels = 25;
  double min_stat_share = 0.5;       // lower bound on theta
  double max_exit_fraction = 0.5;
  std::uint64_t seed = 1;
  std::optional<Mesh> level0_mesh;
  Execution execution = Execution::Parallel;
};

// Summary of one level's CV-controlled batch (level 0 alone, or the pair (l-1, l)).
struct LevelStats {
  std::size_t level = 0;
  double delta = 0.0;
  std::size_t samples = 0;
  double psi = 0.0;           // mean modeled cost of one sample, seconds
  double mean_g = 0.0;        // fine level, exits weighted by zero
  double var_g = 0.0;
  double mean_diff = 0.0;     // g_l - g_{l-1} (equals mean_g at level 0)
  double var_diff = 0.0;
  double var_g_coarse = 0.0;  // level l-1 inside the pair
  double vhat = 0.0;          // dual-weighted variance from the coarser paths
  double weak_error = 0.0;    // mean E_I of the fine paths
  double n_tl = 0.0, n_k1 = 0.0, n_k2 = 0.0;
  double ssa_steps = 0.0;
  double exit_fraction = 0.0;
  double cv = 0.0;
};

struct PlannedLevel {
  Mesh mesh;
  double delta = 0.0;
  std::size_t M = 1;
  double psi = 0.0;
  double V = 0.0;  // variance used by the allocation (absolute units)
  LevelStats stats;
};

struct LevelPlan {
  std::vector<PlannedLevel> levels;
  double tol = 0.0;
  double confidence = 1.96;
  std::size_t refine_factor = 2;
  double threshold = 10.0;
  double scale = 1.0;        // |E g| estimate; all relative quantities divide by it
  double weak_error = 0.0;   // relative E_I at the deepest level
  double exit_bound = 0.0;   // relative delta_L * N_TL,L
  double stat_error = 0.0;   // relative C_A sqrt(sum V/M)
  double theta = 0.0;        // statistical share of TOL
  double work = 0.0;         // sum psi M, seconds
  double work_ssa = 0.0;     // predicted SSA work for the same tolerance, seconds
  std::vector<double> work_by_depth;  // predicted work for each examined L (inf if infeasible)
  std::uint64_t seed = 0;
  std::string model_hash;

  std::size_t L() const { return levels.size() - 1; }
};

struct LevelOutcome {
  std::size_t level = 0;
  std::size_t M = 0;
  double mean_diff = 0.0;
  double var_diff = 0.0;
  double psi = 0.0;
  double vhat = 0.0;
  double n_tl = 0.0, n_k1 = 0.0, n_k2 = 0.0;
  double exit_fraction = 0.0;
};

struct EstimateReport {
  double estimate = 0.0;
  double tol = 0.0;
  double weak_error = 0.0;        // relative
  double exit_bound = 0.0;        // relative
  double stat_half_width = 0.0;   // relative, realized sample counts
  double scale = 1.0;
  double runtime_seconds = 0.0;
  double modeled_work = 0.0;
  std::size_t rounds = 0;
  bool extended = false;          // a level was added during estimation
  std::vector<LevelOutcome> levels;
  std::uint64_t seed = 0;
  std::string model_hash;
};

// Minimizes sum psi_l M_l subject to sum V_l / M_l <= ((tol - tol^2 - weak_error) / C_A)^2 and
// M_l >= 1. Inputs are relative (V divided by the squared scale). Throws InfeasibleTolerance
// when the bias leaves no statistical budget.
std::vector<double> kkt_allocate(const std::vector<double>& psi, const std::vector<double>& V, double tol,
                                 double weak_error, double confidence);

// Integer allocation from the continuous optimum: ceilings, then single-sample reductions
// while the variance constraint still holds.
std::vector<std::size_t> integer_allocation(const std::vector<double>& psi, const std::vector<double>& V,
                                            double rhs, const std::vector<double>& continuous);

double statistical_budget(double tol, double weak_error, double confidence);

// True if delta is acceptable for a level with the given dual variance, observable variance and
// mean number of tau-leap steps.
bool refine_delta_check(double vhat, double var_g, double delta, double n_tl);

// Largest power of 1/c not above `current` with |mean_g| delta n_tl < tol^2.
double last_level_delta(double mean_g, double n_tl, double tol, double c, double current);

// Coarsest uniform mesh on which forward Euler is stable along the mean-field solution.
Mesh level0_mesh(const Model& model);

// Stream purposes.
inline constexpr std::uint64_t kCalibrationStreams = 1;
inline constexpr std::uint64_t kEstimationStreams = 2;
inline constexpr std::uint64_t kExtensionStreams = 3;

class StreamCursor {
 public:
  std::uint64_t take(std::size_t level, std::size_t count) {
    if (next_.size() <= level) next_.resize(level + 1, 0);
    const std::uint64_t first = next_[level];
    next_[level] += count;
    return first;
  }

 private:
  std::vector<std::uint64_t> next_;
};


LevelStats summarize(std::size_t level, double delta, const std::vector<PairSample>& samples);

// CV-controlled statistics of level 0 (coarse empty) or of the pair (l-1, l).
LevelStats level_stats(const Model& model, const MachineConstants& machine, const MlmcConfig& cfg,
                       std::size_t level, const LevelSpec& fine, const std::optional<LevelSpec>& coarse,
                       StreamCursor& streams, std::uint64_t purpose = kCalibrationStreams);

using ProgressFn = std::function<void(const std::string&)>;

LevelPlan calibrate(const Model& model, const MachineConstants& machine, const MlmcConfig& cfg,
                    const ProgressFn& progress = {});

EstimateReport estimate(const Model& model, const LevelPlan& plan, const MachineConstants& machine,
                        const MlmcConfig& cfg, const ProgressFn& progress = {});

}  // namespace srn
