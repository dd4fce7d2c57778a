#include "srn/sampler.hpp"

#include <omp.h>

#include "srn/coupling.hpp"
#include "srn/duals.hpp"

namespace srn {

PairSample sample_pair(const Model& model, const SampleRequest& req, const MachineConstants& machine,
                       std::uint64_t index) {
  Rng rng(req.seed, stream_id(req.purpose, req.level, req.first_index + index));
  const auto& grad = model.g.gradient();
  PairSample s;
  if (!req.coarse) {
    const PathRecord p = hybrid_path(model.net, model.x0, req.fine.mesh, {req.fine.delta, req.duals}, machine, rng);
    s.fine_in = !p.exited;
    s.g_fine = s.fine_in ? model.g(p.final_state()) : 0.0;
    s.cost = p.cost;
    s.ssa_steps = p.ssa_steps;
    s.fine_counts = p.counts;
    if (req.duals && s.fine_in) {
      const auto acc = dual_terms(model.net, p, grad, req.threshold);
      s.weak_error = acc.weak_error;
      s.s_e = acc.s_e;
      s.s_v = acc.s_v;
    }
    return s;
  }
  const CoupledConfig cfg{req.coarse->delta, req.fine.delta, req.duals};
  const CoupledPathRecord p =
      coupled_hybrid_path(model.net, model.x0, req.coarse->mesh, req.fine.mesh, cfg, machine, rng);
  s.fine_in = !p.fine.exited;
  s.coarse_in = !p.coarse.exited;
  s.g_fine = s.fine_in ? model.g(p.fine.final_state()) : 0.0;
  s.g_coarse = s.coarse_in ? model.g(p.coarse.final_state()) : 0.0;
  s.cost = p.cost();
  s.ssa_steps = p.fine.ssa_steps;
  s.fine_counts = p.fine.counts;
  s.coarse_counts = p.coarse.counts;
  if (req.duals) {
    if (s.fine_in) s.weak_error = dual_terms(model.net, p.fine, grad, req.threshold).weak_error;
    if (s.coarse_in) {
      const auto acc = dual_terms(model.net, p.coarse, grad, req.threshold);
      s.s_e = acc.s_e;
      s.s_v = acc.s_v;
    }
  }
  return s;
}

std::vector<PairSample> sample_batch(const Model& model, const SampleRequest& req, const MachineConstants& machine,
                                     Execution mode) {
  std::vector<PairSample> out(req.count);
  const auto n = static_cast<std::int64_t>(req.count);
  if (mode == Execution::Serial) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = sample_pair(model, req, machine, static_cast<std::uint64_t>(i));
    return out;
  }
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) out[i] = sample_pair(model, req, machine, static_cast<std::uint64_t>(i));
  return out;
}

void set_worker_count(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

}  // namespace srn
