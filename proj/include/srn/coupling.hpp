#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "srn/exact.hpp"
#include "srn/hybrid.hpp"

namespace srn {

// P1 ~ Poisson(l1), P2 ~ Poisson(l2) sharing a common Poisson(min(l1, l2)) component.
std::pair<std::int64_t, std::int64_t> couple_poisson(double l1, double l2, Rng& rng);

// Channel rates of the coupled system, 3J entries ordered (common, coarse-only, fine-only).
void split_rates(std::span<const double> coarse, std::span<const double> fine, std::span<double> S);

struct Horizon {
  double H;
  Method method;
  StepKind kind;
  bool absorbing;
};

// Decides the method of one level at time t and writes the propensities frozen at t into a.
// A tau-leap horizon is min(next grid point, t + tau_Ch, T). An exact horizon ends at the level's
// next firing, which is only known once the coupled clocks produce it, so H = T is an upper bound.
Horizon next_horizon(const ReactionNetwork& net, std::span<const std::int64_t> x, double t, double next_grid,
                     double T, double delta, const MachineConstants& machine, std::span<double> a);

enum class ChannelGroup : std::uint8_t { Common, CoarseOnly, FineOnly, None };

struct CoupledFiring {
  ChannelGroup group = ChannelGroup::None;
  std::size_t reaction = 0;
};

// One firing of the 3J-channel system, or a horizon hit that only advances the clocks.
CoupledFiring coupled_mnrm_step(const ReactionNetwork& net, double& t, double H, State& x_coarse, State& x_fine,
                                MnrmClocks& clocks, std::span<const double> S, Rng& rng);

struct CoupledPathRecord {
  PathRecord coarse;
  PathRecord fine;
  std::int64_t b1_blocks = 0;     // tau-leap/tau-leap intervals
  std::int64_t mixed_blocks = 0;  // intervals with at least one exact level
  std::uint64_t b1_poisson_calls = 0;

  double cost() const { return coarse.cost + fine.cost; }
};

struct CoupledConfig {
  double delta_coarse = 1e-2;
  double delta_fine = 1e-2;
  bool record = true;
};

// mesh_fine must refine mesh_coarse.
CoupledPathRecord coupled_hybrid_path(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                                      const Mesh& mesh_coarse, const Mesh& mesh_fine, const CoupledConfig& cfg,
                                      const MachineConstants& machine, Rng& rng);

}  // namespace srn
