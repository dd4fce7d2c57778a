#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "srn/hybrid.hpp"
#include "srn/model.hpp"
#include "srn/path.hpp"
#include "srn/workmodel.hpp"

namespace srn {

struct LevelSpec {
  Mesh mesh;
  double delta = 1e-2;
};

// Per-path summary of a level-l sample: the fine path at level l and, for l > 0, the coarse
// path at level l-1 driven by the same randomness.
struct PairSample {
  double g_fine = 0.0;    // g times the in-lattice indicator
  double g_coarse = 0.0;  // zero at level 0
  bool fine_in = true;
  bool coarse_in = true;
  double cost = 0.0;       // modeled seconds, both levels
  double ssa_steps = 0.0;  // fine-level integral of a_0
  StepCounts fine_counts;
  StepCounts coarse_counts;
  // Dual-weighted terms: E_I from the fine path, (S_e, S_v) from the path one level coarser
  // (the level-0 path itself at level 0).
  double weak_error = 0.0;
  double s_e = 0.0;
  double s_v = 0.0;

  double difference() const { return g_fine - g_coarse; }
};

struct SampleRequest {
  std::size_t level = 0;
  LevelSpec fine;
  std::optional<LevelSpec> coarse;  // required for level > 0
  std::uint64_t seed = 0;
  std::uint64_t purpose = 0;
  std::uint64_t first_index = 0;
  std::size_t count = 0;
  bool duals = true;
  double threshold = 10.0;
};

enum class Execution { Serial, Parallel };

PairSample sample_pair(const Model& model, const SampleRequest& req, const MachineConstants& machine,
                       std::uint64_t index);

// Path i uses the stream (seed, purpose, level, first_index + i), so the result does not depend
// on the execution mode or the number of threads.
std::vector<PairSample> sample_batch(const Model& model, const SampleRequest& req, const MachineConstants& machine,
                                     Execution mode = Execution::Parallel);

void set_worker_count(int workers);

}  // namespace srn
