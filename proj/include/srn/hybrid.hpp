#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srn/exact.hpp"
#include "srn/network.hpp"
#include "srn/path.hpp"
#include "srn/random.hpp"
#include "srn/workmodel.hpp"

namespace srn {

// Sorted, strictly increasing time points covering [0, T].
using Mesh = std::vector<double>;

Mesh uniform_mesh(double T, std::size_t cells);
// Splits every cell into `factor` equal parts.
Mesh refine_mesh(const Mesh& mesh, std::size_t factor);
// First mesh point strictly after t (T if none).
double next_grid_point(const Mesh& mesh, double t);

enum class Method : std::uint8_t { Mnrm, TauLeap };

struct Decision {
  Method method;
  StepKind kind;  // MnrmK1, MnrmK2 or TauLeap
  double tau;     // Chernoff step for tau-leap, expected exact step 1/a0 otherwise
};

// One-step switching rule between an exact step and a Chernoff tau-leap.
// Requires a0 > 0 and t < next_grid.
Decision switching_rule(const ReactionNetwork& net, std::span<const std::int64_t> x, std::span<const double> a,
                        double a0, double t, double next_grid, double delta, const MachineConstants& machine);

struct HybridConfig {
  double delta = 1e-2;
  bool record = true;
};

PathRecord hybrid_path(const ReactionNetwork& net, std::span<const std::int64_t> x0, const Mesh& mesh,
                       const HybridConfig& cfg, const MachineConstants& machine, Rng& rng);

// Continues a single-level hybrid path already holding state x at time t.
void continue_hybrid(const ReactionNetwork& net, const Mesh& mesh, const HybridConfig& cfg,
                     const MachineConstants& machine, double t, State& x, PathRecord& path, Rng& rng);

// Samples one tau-leap step of length dt at frozen rates a and charges its cost to the path.
// Returns false if the state left the lattice.
bool tau_leap_step(const ReactionNetwork& net, std::span<const double> a, double dt, State& x,
                   PathRecord& path, const MachineConstants& machine, Rng& rng);

}  // namespace srn
