#pragma once

#include <span>
#include <vector>

#include "srn/network.hpp"
#include "srn/path.hpp"
#include "srn/random.hpp"

namespace srn {

// Internal times R and next firing times P of the unit-rate channels.
struct MnrmClocks {
  std::vector<double> R;
  std::vector<double> P;

  void reset(std::size_t channels, Rng& rng) {
    R.assign(channels, 0.0);
    P.resize(channels);
    for (auto& p : P) p = rng.exponential();
  }
  bool ready() const { return !P.empty(); }
};

// Next firing among channels with rates S: returns (channel, waiting time). Ties go to the
// lowest index; a channel with zero rate never fires. Returns (size, +inf) if all rates vanish.
std::pair<std::size_t, double> next_firing(const MnrmClocks& clocks, std::span<const double> S);

// Advances clocks by S*dt; if `fired` is a valid channel, draws its next firing time.
void advance_clocks(MnrmClocks& clocks, std::span<const double> S, double dt, std::size_t fired, Rng& rng);

PathRecord mnrm_simulate(const ReactionNetwork& net, std::span<const std::int64_t> x0, double t0, double T,
                         Rng& rng, bool record = true);

PathRecord ssa_simulate(const ReactionNetwork& net, std::span<const std::int64_t> x0, double t0, double T,
                        Rng& rng, bool record = true);

}  // namespace srn
