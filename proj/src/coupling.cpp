#include "srn/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srn/chernoff.hpp"

namespace srn {

std::pair<std::int64_t, std::int64_t> couple_poisson(double l1, double l2, Rng& rng) {
  const double common = std::min(l1, l2);
  const std::int64_t shared = poisson(rng, common);
  const std::int64_t q1 = l1 > common ? poisson(rng, l1 - common) : 0;
  const std::int64_t q2 = l2 > common ? poisson(rng, l2 - common) : 0;
  return {shared + q1, shared + q2};
}

void split_rates(std::span<const double> coarse, std::span<const double> fine, std::span<double> S) {
  const std::size_t J = coarse.size();
  for (std::size_t j = 0; j < J; ++j) {
    const double m = std::min(coarse[j], fine[j]);
    S[j] = m;
    S[J + j] = coarse[j] - m;
    S[2 * J + j] = fine[j] - m;
  }
}

Horizon next_horizon(const ReactionNetwork& net, std::span<const std::int64_t> x, double t, double next_grid,
                     double T, double delta, const MachineConstants& machine, std::span<double> a) {
  const double a0 = net.propensities(x, a);
  if (a0 == 0.0) return {T, Method::Mnrm, StepKind::MnrmK1, true};
  const Decision dec = switching_rule(net, x, a, a0, t, next_grid, delta, machine);
  if (dec.method == Method::TauLeap) return {std::min({next_grid, t + dec.tau, T}), Method::TauLeap, dec.kind, false};
  return {T, Method::Mnrm, dec.kind, false};
}

CoupledFiring coupled_mnrm_step(const ReactionNetwork& net, double& t, double H, State& x_coarse, State& x_fine,
                                MnrmClocks& clocks, std::span<const double> S, Rng& rng) {
  const std::size_t J = net.reactions();
  auto [mu, dt] = next_firing(clocks, S);
  if (t + dt > H) {
    advance_clocks(clocks, S, H - t, S.size(), rng);
    t = H;
    return {};
  }
  advance_clocks(clocks, S, dt, mu, rng);
  t += dt;
  const auto group = static_cast<ChannelGroup>(mu / J);
  const std::size_t j = mu % J;
  if (group != ChannelGroup::FineOnly) net.apply(x_coarse, j, 1);
  if (group != ChannelGroup::CoarseOnly) net.apply(x_fine, j, 1);
  return {group, j};
}

namespace {

struct Leg {
  const Mesh* mesh;
  double delta;
  PathRecord* rec;
  State x;
  std::vector<double> a;
  Horizon h{};
  double step_start = 0.0;

  bool exact() const { return h.method == Method::Mnrm && !h.absorbing; }
  bool tau_leap() const { return h.method == Method::TauLeap; }

  void decide(const ReactionNetwork& net, double t, const MachineConstants& machine) {
    const double T = mesh->back();
    h = next_horizon(net, x, t, next_grid_point(*mesh, t), T, delta, machine, a);
    step_start = t;
    if (h.absorbing) return;
    switch (h.kind) {
      case StepKind::TauLeap:
        ++rec->counts.tl;
        rec->cost += machine.c3;
        break;
      case StepKind::MnrmK1:
        ++rec->counts.k1;
        rec->cost += machine.c1;
        break;
      default:
        ++rec->counts.k2;
        rec->cost += machine.c2;
        break;
    }
  }

  // Charges the Poisson work of a finished tau-leap step.
  void close_tau_leap(double t, const MachineConstants& machine) {
    for (double aj : a) {
      const double mean = aj * (t - step_start);
      rec->cost += machine.cp(mean);
      if (rec->recording) rec->tl_rates.push_back(mean);
    }
  }

  void accrue(double dt) {
    double a0 = 0.0;
    for (double aj : a) a0 += aj;
    rec->ssa_steps += a0 * dt;
  }
};

// Finishes the survivor's pending step on its own, then continues it as a single-level path.
void continue_survivor(const ReactionNetwork& net, Leg& leg, double t, const MachineConstants& machine, Rng& rng) {
  const double T = leg.mesh->back();
  if (leg.tau_leap() && leg.h.H > t) {
    const double rest = leg.h.H - t;
    for (std::size_t j = 0; j < leg.a.size(); ++j)
      if (const auto k = poisson(rng, leg.a[j] * rest)) net.apply(leg.x, j, k);
    leg.accrue(rest);
    t = leg.h.H;
    leg.close_tau_leap(t, machine);
    if (!in_lattice(leg.x)) {
      leg.rec->exited = true;
      return;
    }
    leg.rec->push(t, leg.x, StepKind::TauLeap);
  } else if (leg.exact() && leg.h.H > t && t < T) {
    MnrmClocks clocks;
    clocks.reset(leg.a.size(), rng);
    net.propensities(leg.x, leg.a);
    auto [mu, dt] = next_firing(clocks, leg.a);
    if (t + dt >= T) {
      leg.accrue(T - t);
      t = T;
    } else {
      leg.accrue(dt);
      net.apply(leg.x, mu, 1);
      ++leg.rec->firings;
      t += dt;
    }
    leg.rec->push(t, leg.x, leg.h.kind);
  }
  HybridConfig cfg{leg.delta, leg.rec->recording};
  continue_hybrid(net, *leg.mesh, cfg, machine, t, leg.x, *leg.rec, rng);
}

}  // namespace

CoupledPathRecord coupled_hybrid_path(const ReactionNetwork& net, std::span<const std::int64_t> x0,
                                      const Mesh& mesh_coarse, const Mesh& mesh_fine, const CoupledConfig& cfg,
                                      const MachineConstants& machine, Rng& rng) {
  const std::size_t J = net.reactions(), d = net.species();
  const double T = mesh_fine.back();
  CoupledPathRecord out;
  out.coarse.recording = out.fine.recording = cfg.record;
  out.coarse.start(0.0, x0, d, J);
  out.fine.start(0.0, x0, d, J);

  Leg coarse{&mesh_coarse, cfg.delta_coarse, &out.coarse, State(x0.begin(), x0.end()), std::vector<double>(J)};
  Leg fine{&mesh_fine, cfg.delta_fine, &out.fine, State(x0.begin(), x0.end()), std::vector<double>(J)};

  std::vector<double> S(3 * J);
  MnrmClocks clocks;
  bool clocks_live = false;
  double t = 0.0;
  coarse.decide(net, t, machine);
  fine.decide(net, t, machine);

  while (t < T) {
    const double H = std::min(coarse.h.H, fine.h.H);
    if (!coarse.exact() && !fine.exact()) {
      // B1: both levels leap (an absorbed level has zero rates).
      clocks_live = false;
      ++out.b1_blocks;
      split_rates(coarse.a, fine.a, S);
      const double dt = H - t;
      const std::uint64_t before = poisson_call_counter();
      for (std::size_t j = 0; j < J; ++j) {
        const std::int64_t common = poisson(rng, S[j] * dt);
        const std::int64_t only_c = poisson(rng, S[J + j] * dt);
        const std::int64_t only_f = poisson(rng, S[2 * J + j] * dt);
        if (common + only_c) net.apply(coarse.x, j, common + only_c);
        if (common + only_f) net.apply(fine.x, j, common + only_f);
      }
      out.b1_poisson_calls += poisson_call_counter() - before;
      coarse.accrue(dt);
      fine.accrue(dt);
      t = H;
    } else {
      // B2-B4: exact levels refresh their rates after every firing; leaping levels keep
      // theirs frozen, so their counts arise from exponential arrivals.
      ++out.mixed_blocks;
      if (!clocks_live) {
        clocks.reset(3 * J, rng);
        clocks_live = true;
      }
      for (;;) {
        if (coarse.exact()) net.propensities(coarse.x, coarse.a);
        if (fine.exact()) net.propensities(fine.x, fine.a);
        split_rates(coarse.a, fine.a, S);
        const double t0 = t;
        const CoupledFiring f = coupled_mnrm_step(net, t, H, coarse.x, fine.x, clocks, S, rng);
        coarse.accrue(t - t0);
        fine.accrue(t - t0);
        if (f.group != ChannelGroup::FineOnly && f.group != ChannelGroup::None) {
          ++out.coarse.firings;
          if (coarse.exact()) coarse.h.H = t;
        }
        if (f.group != ChannelGroup::CoarseOnly && f.group != ChannelGroup::None) {
          ++out.fine.firings;
          if (fine.exact()) fine.h.H = t;
        }
        if (t >= H || coarse.h.H == t || fine.h.H == t) break;
      }
    }

    // Levels whose horizon is reached record their step and check the lattice.
    bool exited[2] = {false, false};
    Leg* legs[2] = {&coarse, &fine};
    for (int k = 0; k < 2; ++k) {
      Leg& leg = *legs[k];
      if (leg.h.H != t || leg.h.absorbing) continue;
      if (leg.tau_leap()) {
        leg.close_tau_leap(t, machine);
        if (!in_lattice(leg.x)) {
          leg.rec->exited = true;
          exited[k] = true;
          continue;
        }
      }
      leg.rec->push(t, leg.x, leg.h.kind);
    }
    if (exited[0] && exited[1]) return out;
    if (exited[0] || exited[1]) {
      continue_survivor(net, exited[0] ? fine : coarse, t, machine, rng);
      return out;
    }
    if (t >= T) break;
    if (coarse.h.H == t) coarse.decide(net, t, machine);
    if (fine.h.H == t) fine.decide(net, t, machine);
  }
  out.coarse.t_end = out.fine.t_end = T;
  return out;
}

}  // namespace srn
