#include "srn/exact.hpp"

#include <cmath>
#include <limits>

namespace srn {

std::pair<std::size_t, double> next_firing(const MnrmClocks& clocks, std::span<const double> S) {
  std::size_t mu = S.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < S.size(); ++k) {
    if (!(S[k] > 0.0)) continue;
    const double dt = (clocks.P[k] - clocks.R[k]) / S[k];
    if (dt < best) {
      best = dt;
      mu = k;
    }
  }
  return {mu, best};
}

void advance_clocks(MnrmClocks& clocks, std::span<const double> S, double dt, std::size_t fired, Rng& rng) {
  for (std::size_t k = 0; k < S.size(); ++k) clocks.R[k] += S[k] * dt;
  if (fired < S.size()) clocks.P[fired] += rng.exponential();
}

PathRecord mnrm_simulate(const ReactionNetwork& net, std::span<const std::int64_t> x0, double t0, double T,
                         Rng& rng, bool record) {
  const std::size_t J = net.reactions();
  PathRecord path;
  path.recording = record;
  path.start(t0, x0, net.species(), J);
  State x(x0.begin(), x0.end());
  std::vector<double> a(J);
  MnrmClocks clocks;
  clocks.reset(J, rng);
  double t = t0;
  while (t < T) {
    const double a0 = net.propensities(x, a);
    if (a0 == 0.0) break;
    auto [mu, dt] = next_firing(clocks, a);
    if (t + dt >= T) {
      path.ssa_steps += a0 * (T - t);
      break;
    }
    path.ssa_steps += a0 * dt;
    net.apply(x, mu, 1);
    advance_clocks(clocks, a, dt, mu, rng);
    t += dt;
    ++path.firings;
    path.push(t, x, StepKind::Exact);
  }
  path.t_end = T;
  return path;
}

PathRecord ssa_simulate(const ReactionNetwork& net, std::span<const std::int64_t> x0, double t0, double T,
                        Rng& rng, bool record) {
  const std::size_t J = net.reactions();
  PathRecord path;
  path.recording = record;
  path.start(t0, x0, net.species(), J);
  State x(x0.begin(), x0.end());
  std::vector<double> a(J);
  double t = t0;
  while (t < T) {
    const double a0 = net.propensities(x, a);
    if (a0 == 0.0) break;
    const double dt = -std::log(rng.uniform()) / a0;
    if (t + dt >= T) {
      path.ssa_steps += a0 * (T - t);
      break;
    }
    const double target = rng.uniform() * a0;
    std::size_t mu = 0;
    double acc = a[0];
    while (acc < target && mu + 1 < J) acc += a[++mu];
    while (a[mu] == 0.0 && mu > 0) --mu;  // guard against rounding past the last active channel
    path.ssa_steps += a0 * dt;
    net.apply(x, mu, 1);
    t += dt;
    ++path.firings;
    path.push(t, x, StepKind::Exact);
  }
  path.t_end = T;
  return path;
}

}  // namespace srn
