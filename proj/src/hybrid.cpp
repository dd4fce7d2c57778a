#include "srn/hybrid.hpp"

#include <algorithm>
#include <cmath>

#include "srn/chernoff.hpp"

namespace srn {

Mesh uniform_mesh(double T, std::size_t cells) {
  Mesh m(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) m[k] = T * static_cast<double>(k) / static_cast<double>(cells);
  m.back() = T;
  return m;
}

Mesh refine_mesh(const Mesh& mesh, std::size_t factor) {
  Mesh out;
  out.reserve((mesh.size() - 1) * factor + 1);
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double h = mesh[k + 1] - mesh[k];
    for (std::size_t r = 0; r < factor; ++r)
      out.push_back(mesh[k] + h * static_cast<double>(r) / static_cast<double>(factor));
  }
  out.push_back(mesh.back());
  return out;
}

double next_grid_point(const Mesh& mesh, double t) {
  auto it = std::upper_bound(mesh.begin(), mesh.end(), t);
  return it == mesh.end() ? mesh.back() : *it;
}

Decision switching_rule(const ReactionNetwork& net, std::span<const std::int64_t> x, std::span<const double> a,
                        double a0, double t, double next_grid, double delta, const MachineConstants& machine) {
  if (machine.k1 / a0 >= next_grid - t) return {Method::Mnrm, StepKind::MnrmK1, 1.0 / a0};
  const double tau = chernoff_tau(net, x, a, delta);
  if (tau < k2(machine, a, tau) / a0) return {Method::Mnrm, StepKind::MnrmK2, 1.0 / a0};
  return {Method::TauLeap, StepKind::TauLeap, tau};
}

bool tau_leap_step(const ReactionNetwork& net, std::span<const double> a, double dt, State& x,
                   PathRecord& path, const MachineConstants& machine, Rng& rng) {
  double cost = machine.c3;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double mean = a[j] * dt;
    cost += machine.cp(mean);
    if (path.recording) path.tl_rates.push_back(mean);
    const std::int64_t k = poisson(rng, mean);
    if (k != 0) net.apply(x, j, k);
  }
  path.cost += cost;
  ++path.counts.tl;
  return in_lattice(x);
}

void continue_hybrid(const ReactionNetwork& net, const Mesh& mesh, const HybridConfig& cfg,
                     const MachineConstants& machine, double t, State& x, PathRecord& path, Rng& rng) {
  const double T = mesh.back();
  const std::size_t J = net.reactions();
  std::vector<double> a(J);
  MnrmClocks clocks;
  while (t < T) {
    const double a0 = net.propensities(x, a);
    if (a0 == 0.0) break;  // absorbing
    const double grid = next_grid_point(mesh, t);
    const Decision dec = switching_rule(net, x, a, a0, t, grid, cfg.delta, machine);
    if (dec.method == Method::TauLeap) {
      const double H = std::min({grid, t + dec.tau, T});
      path.ssa_steps += a0 * (H - t);
      if (!tau_leap_step(net, a, H - t, x, path, machine, rng)) {
        path.exited = true;
        return;
      }
      t = H;
      path.push(t, x, StepKind::TauLeap);
      continue;
    }
    if (!clocks.ready()) clocks.reset(J, rng);
    auto [mu, dt] = next_firing(clocks, a);
    if (dec.kind == StepKind::MnrmK1) {
      ++path.counts.k1;
      path.cost += machine.c1;
    } else {
      ++path.counts.k2;
      path.cost += machine.c2;
    }
    if (t + dt >= T) {
      advance_clocks(clocks, a, T - t, J, rng);
      path.ssa_steps += a0 * (T - t);
      t = T;
      path.push(t, x, dec.kind);
      break;
    }
    path.ssa_steps += a0 * dt;
    net.apply(x, mu, 1);
    advance_clocks(clocks, a, dt, mu, rng);
    t += dt;
    ++path.firings;
    path.push(t, x, dec.kind);
  }
  path.t_end = T;
}

PathRecord hybrid_path(const ReactionNetwork& net, std::span<const std::int64_t> x0, const Mesh& mesh,
                       const HybridConfig& cfg, const MachineConstants& machine, Rng& rng) {
  PathRecord path;
  path.recording = cfg.record;
  path.start(mesh.front(), x0, net.species(), net.reactions());
  State x(x0.begin(), x0.end());
  continue_hybrid(net, mesh, cfg, machine, mesh.front(), x, path, rng);
  return path;
}

}  // namespace srn
