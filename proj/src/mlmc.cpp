#include "srn/mlmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "srn/errors.hpp"
#include "srn/stats.hpp"

namespace srn {

double statistical_budget(double tol, double weak_error, double confidence) {
  const double room = tol - tol * tol - std::abs(weak_error);
  if (room <= 0.0) return 0.0;
  return (room / confidence) * (room / confidence);
}

std::vector<double> kkt_allocate(const std::vector<double>& psi, const std::vector<double>& V, double tol,
                                 double weak_error, double confidence) {
  if (psi.size() != V.size() || psi.empty()) throw std::invalid_argument("kkt_allocate: size mismatch");
  const double rhs = statistical_budget(tol, weak_error, confidence);
  if (rhs <= 0.0) {
    std::ostringstream os;
    os << "weak error " << weak_error << " leaves no statistical budget at TOL " << tol;
    throw InfeasibleTolerance(os.str());
  }
  const std::size_t n = psi.size();
  std::vector<double> M(n, 1.0);
  std::vector<bool> pinned(n, false);
  for (std::size_t l = 0; l < n; ++l) {
    if (psi[l] <= 0.0 || V[l] < 0.0) throw std::invalid_argument("kkt_allocate: need psi > 0 and V >= 0");
    pinned[l] = V[l] == 0.0;
  }
  // Water filling: free levels get M = q sqrt(V/psi); levels that would drop below one are
  // pinned at one, which only lowers q for the rest.
  for (;;) {
    double a = 0.0, b = 0.0;
    bool any_free = false;
    for (std::size_t l = 0; l < n; ++l) {
      if (pinned[l]) {
        b += V[l];
      } else {
        a += std::sqrt(psi[l] * V[l]);
        any_free = true;
      }
    }
    if (!any_free) break;
    const double room = rhs - b;
    if (room <= 0.0) throw InfeasibleTolerance("kkt_allocate: pinned levels exhaust the variance budget");
    const double q = a / room;
    bool changed = false;
    for (std::size_t l = 0; l < n; ++l) {
      if (pinned[l]) continue;
      M[l] = q * std::sqrt(V[l] / psi[l]);
      if (M[l] < 1.0) {
        pinned[l] = true;
        M[l] = 1.0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return M;
}

std::vector<std::size_t> integer_allocation(const std::vector<double>& psi, const std::vector<double>& V,
                                            double rhs, const std::vector<double>& continuous) {
  const std::size_t n = psi.size();
  std::vector<std::size_t> M(n);
  double used = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    M[l] = static_cast<std::size_t>(std::max(1.0, std::ceil(continuous[l] - 1e-9)));
    used += V[l] / static_cast<double>(M[l]);
  }
  // Most expensive levels give back samples first. Slack only shrinks, so a level that cannot
  // lose a sample now never can, and one pass leaves every single-sample reduction infeasible.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return psi[i] > psi[j]; });
  for (std::size_t l : order) {
    if (M[l] <= 1 || V[l] <= 0.0) {
      if (V[l] <= 0.0) {
        used -= V[l] / static_cast<double>(M[l]);
        M[l] = 1;
      }
      continue;
    }
    const double others = used - V[l] / static_cast<double>(M[l]);
    const double room = rhs - others;
    if (room <= 0.0) continue;
    auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(V[l] / room)));
    while (m > 1 && others + V[l] / static_cast<double>(m - 1) <= rhs) --m;
    while (others + V[l] / static_cast<double>(m) > rhs) ++m;
    if (m < M[l]) {
      M[l] = m;
      used = others + V[l] / static_cast<double>(m);
    }
  }
  return M;
}

bool refine_delta_check(double vhat, double var_g, double delta, double n_tl) {
  if (n_tl <= 0.0) return true;
  const double dn = delta * n_tl;
  return vhat * (1.0 - dn) * (1.0 - dn) > 2.0 * std::max(0.0, var_g) * dn && dn < 0.1;
}

double last_level_delta(double mean_g, double n_tl, double tol, double c, double current) {
  const double g = std::abs(mean_g);
  if (n_tl <= 0.0 || g == 0.0) return current;
  const double target = tol * tol / (g * n_tl);
  double delta = std::pow(c, std::floor(std::log(target) / std::log(c)));
  if (g * delta * n_tl >= tol * tol) delta /= c;
  while (g * delta * n_tl >= tol * tol) delta /= c;
  return std::min(delta, current);
}

namespace {

double spectral_radius(const std::vector<double>& A, std::size_t d) {
  std::vector<double> v(d, 1.0), w(d);
  double rho = 0.0;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += A[i * d + k] * v[k];
      w[i] = s;
    }
    double norm = 0.0;
    for (double x : w) norm = std::max(norm, std::abs(x));
    if (norm == 0.0) return 0.0;
    const double previous = rho;
    rho = norm;
    for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / norm;
    if (it > 10 && std::abs(rho - previous) <= 1e-10 * rho) break;
  }
  return rho;
}

}  // namespace

Mesh level0_mesh(const Model& model) {
  const std::size_t d = model.net.species();
  std::vector<double> x0(model.x0.begin(), model.x0.end());
  const auto traj = mean_field(model.net, x0, model.T, model.T / 4096.0);
  double dt = model.T;
  for (const auto& p : traj) {
    const double rho = spectral_radius(drift_jacobian(model.net, p.x), d);
    if (rho > 0.0) dt = std::min(dt, 2.0 / rho);
  }
  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(model.T / dt - 1e-9)));
  return uniform_mesh(model.T, cells);
}

LevelStats summarize(std::size_t level, double delta, const std::vector<PairSample>& samples) {
  LevelStats s;
  s.level = level;
  s.delta = delta;
  s.samples = samples.size();
  Moments g, gc, diff, cost, weak, se;
  double sv = 0.0, sv2 = 0.0, in_fine = 0.0;
  std::size_t dual_paths = 0;
  for (const auto& p : samples) {
    g.add(p.g_fine);
    gc.add(p.g_coarse);
    diff.add(p.difference());
    cost.add(p.cost);
    s.n_tl += static_cast<double>(p.fine_counts.tl);
    s.n_k1 += static_cast<double>(p.fine_counts.k1);
    s.n_k2 += static_cast<double>(p.fine_counts.k2);
    s.ssa_steps += p.ssa_steps;
    if (p.fine_in) {
      in_fine += 1.0;
      weak.add(p.weak_error);
    }
    const bool dual_source = level == 0 ? p.fine_in : p.coarse_in;
    if (dual_source) {
      ++dual_paths;
      se.add(p.s_e);
      sv += p.s_v;
      sv2 += p.s_v * p.s_v;
    }
  }
  const double n = static_cast<double>(samples.size());
  if (n == 0.0) return s;
  s.psi = cost.mean;
  s.mean_g = g.mean;
  s.var_g = g.variance();
  s.mean_diff = diff.mean;
  s.var_diff = diff.variance();
  s.var_g_coarse = gc.variance();
  s.weak_error = weak.mean;
  s.n_tl /= n;
  s.n_k1 /= n;
  s.n_k2 /= n;
  s.ssa_steps /= n;
  s.exit_fraction = 1.0 - in_fine / n;

  double cv = 0.0;
  if (dual_paths >= 2) {
    const double m = static_cast<double>(dual_paths);
    const double sv_mean = sv / m;
    const double sv_var = std::max(0.0, (sv2 - m * sv_mean * sv_mean) / (m - 1.0));
    s.vhat = se.variance() + sv_mean;
    if (s.vhat > 0.0) cv = std::max(cv, std::sqrt(se.variance_of_variance() + sv_var / m) / s.vhat);
  }
  if (g.mean != 0.0) cv = std::max(cv, g.std_error() / std::abs(g.mean));
  if (weak.n > 1.0 && weak.mean != 0.0) cv = std::max(cv, weak.std_error() / std::abs(weak.mean));
  s.cv = cv;
  return s;
}

LevelStats level_stats(const Model& model, const MachineConstants& machine, const MlmcConfig& cfg,
                       std::size_t level, const LevelSpec& fine, const std::optional<LevelSpec>& coarse,
                       StreamCursor& streams, std::uint64_t purpose) {
  SampleRequest req;
  req.level = level;
  req.fine = fine;
  req.coarse = coarse;
  req.seed = cfg.seed;
  req.purpose = purpose;
  req.threshold = cfg.threshold;
  std::vector<PairSample> all;
  std::size_t batch = std::max<std::size_t>(2, cfg.initial_batch);
  for (;;) {
    req.count = batch;
    req.first_index = streams.take(level, batch);
    auto more = sample_batch(model, req, machine, cfg.execution);
    all.insert(all.end(), more.begin(), more.end());
    LevelStats s = summarize(level, fine.delta, all);
    if (s.exit_fraction > cfg.max_exit_fraction) {
      std::ostringstream os;
      os << "level " << level << ": " << s.exit_fraction * 100.0
         << "% of paths leave the lattice; decrease delta0 or refine the level-0 mesh";
      throw CalibrationError(os.str());
    }
    if (s.cv <= cfg.cv_target || all.size() >= cfg.max_batch_samples) return s;
    batch = std::min(all.size(), cfg.max_batch_samples - all.size());
  }
}

namespace {

struct Candidate {
  bool feasible = false;
  double work = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> M;
  double theta = 0.0;
  double stat_error = 0.0;
};

double plan_variance(const PlannedLevel& lvl, std::size_t l) { return l == 0 ? lvl.stats.var_g : lvl.stats.vhat; }

Candidate allocate(const std::vector<PlannedLevel>& levels, double scale, const MlmcConfig& cfg) {
  Candidate c;
  const double weak = std::abs(levels.back().stats.weak_error) / scale;
  const double theta = (cfg.tol - cfg.tol * cfg.tol - weak) / cfg.tol;
  c.theta = theta;
  if (theta < cfg.min_stat_share) return c;
  std::vector<double> psi, V;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    psi.push_back(std::max(levels[l].psi, 1e-15));
    V.push_back(std::max(0.0, plan_variance(levels[l], l)) / (scale * scale));
  }
  const auto cont = kkt_allocate(psi, V, cfg.tol, weak, cfg.confidence);
  const double rhs = statistical_budget(cfg.tol, weak, cfg.confidence);
  c.M = integer_allocation(psi, V, rhs, cont);
  c.feasible = true;
  c.work = 0.0;
  double var = 0.0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    c.work += psi[l] * static_cast<double>(c.M[l]);
    var += V[l] / static_cast<double>(c.M[l]);
  }
  c.stat_error = cfg.confidence * std::sqrt(var);
  return c;
}

void note(const ProgressFn& progress, const std::string& text) {
  if (progress) progress(text);
}

PlannedLevel make_level(const LevelSpec& spec, const LevelStats& stats) {
  PlannedLevel p;
  p.mesh = spec.mesh;
  p.delta = spec.delta;
  p.psi = stats.psi;
  p.stats = stats;
  return p;
}

// Statistics for level `level` on `spec`, dividing delta by c until the variance-consistency
// check passes.
PlannedLevel build_level(const Model& model, const MachineConstants& machine, const MlmcConfig& cfg,
                         std::size_t level, LevelSpec spec, const std::vector<PlannedLevel>& coarser,
                         StreamCursor& streams, const ProgressFn& progress,
                         std::uint64_t purpose = kCalibrationStreams) {
  for (;;) {
    std::optional<LevelSpec> coarse;
    if (level > 0) coarse = LevelSpec{coarser[level - 1].mesh, coarser[level - 1].delta};
    const LevelStats s = level_stats(model, machine, cfg, level, spec, coarse, streams, purpose);
    std::ostringstream os;
    os << "level " << level << ": cells=" << spec.mesh.size() - 1 << " delta=" << spec.delta
       << " M=" << s.samples << " psi=" << s.psi << " Vhat=" << s.vhat << " E_I=" << s.weak_error
       << " N_TL=" << s.n_tl;
    note(progress, os.str());
    if (refine_delta_check(s.vhat, s.var_g, spec.delta, s.n_tl)) return make_level(spec, s);
    spec.delta /= cfg.delta_refine;
    if (spec.delta < 1e-16) {
      std::ostringstream err;
      err << "level " << level << ": delta fell below 1e-16 without passing the variance check";
      throw CalibrationError(err.str());
    }
  }
}

void finalize_last_level(const Model& model, const MachineConstants& machine, const MlmcConfig& cfg,
                         std::vector<PlannedLevel>& levels, StreamCursor& streams, const ProgressFn& progress,
                         std::uint64_t purpose = kCalibrationStreams) {
  const std::size_t L = levels.size() - 1;
  PlannedLevel& last = levels.back();
  if (last.stats.n_tl <= 0.0) return;
  const double tol2 = cfg.tol * cfg.tol;
  // Relative units: |mean g| / scale = 1.
  double delta = last_level_delta(1.0, last.stats.n_tl, cfg.tol, cfg.delta_refine, last.delta);
  if (delta >= last.delta && last.delta * last.stats.n_tl < tol2) return;
  delta = std::min(delta, last.delta / cfg.delta_refine);
  for (;;) {
    if (delta < 1e-16) throw CalibrationError("last level: delta fell below 1e-16");
    std::optional<LevelSpec> coarse;
    if (L > 0) coarse = LevelSpec{levels[L - 1].mesh, levels[L - 1].delta};
    LevelSpec spec{last.mesh, delta};
    const LevelStats s = level_stats(model, machine, cfg, L, spec, coarse, streams, purpose);
    last = make_level(spec, s);
    std::ostringstream os;
    os << "last level " << L << ": delta=" << delta << " N_TL=" << s.n_tl;
    note(progress, os.str());
    if (delta * s.n_tl < tol2) return;
    delta /= cfg.delta_refine;
  }
}

void fill_plan(LevelPlan& plan, const Candidate& c, const MlmcConfig& cfg, const MachineConstants& machine) {
  plan.tol = cfg.tol;
  plan.confidence = cfg.confidence;
  plan.refine_factor = cfg.refine_factor;
  plan.threshold = cfg.threshold;
  plan.seed = cfg.seed;
  plan.theta = c.theta;
  plan.work = c.work;
  plan.stat_error = c.stat_error;
  const auto& last = plan.levels.back();
  plan.weak_error = std::abs(last.stats.weak_error) / plan.scale;
  plan.exit_bound = last.delta * last.stats.n_tl;
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    plan.levels[l].M = c.M[l];
    plan.levels[l].V = std::max(0.0, plan_variance(plan.levels[l], l));
  }
  const double var_g = last.stats.var_g / (plan.scale * plan.scale);
  const double m_ssa = std::max(1.0, cfg.confidence * cfg.confidence * var_g / (cfg.tol * cfg.tol));
  plan.work_ssa = machine.c_star * m_ssa * last.stats.ssa_steps;
}

double scale_of(const std::vector<PlannedLevel>& levels) {
  const double s = std::abs(levels.back().stats.mean_g);
  if (s == 0.0) throw CalibrationError("the observable has zero mean; relative tolerances are undefined");
  return s;
}

}  // namespace

LevelPlan calibrate(const Model& model, const MachineConstants& machine, const MlmcConfig& cfg,
                    const ProgressFn& progress) {
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw std::invalid_argument("TOL must lie in (0, 1)");
  if (cfg.refine_factor < 2) throw std::invalid_argument("refinement factor must be at least 2");
  StreamCursor streams;
  const Mesh mesh0 = cfg.level0_mesh ? *cfg.level0_mesh : level0_mesh(model);

  std::vector<PlannedLevel> levels;
  levels.push_back(build_level(model, machine, cfg, 0, LevelSpec{mesh0, cfg.delta0}, levels, streams, progress));

  std::vector<double> work_by_depth;
  std::vector<Candidate> candidates;
  std::size_t best = 0;
  bool have_best = false;
  bool extra_used = false;
  for (;;) {
    const std::size_t l = levels.size() - 1;
    const double scale = scale_of(levels);
    Candidate c = allocate(levels, scale, cfg);
    work_by_depth.push_back(c.work);
    candidates.push_back(c);
    {
      std::ostringstream os;
      os << "depth " << l << ": theta=" << c.theta << " W=" << c.work;
      note(progress, os.str());
    }
    bool deepen;
    if (!c.feasible) {
      deepen = true;
    } else if (!have_best) {
      deepen = true;
    } else if (c.work < candidates[best].work) {
      deepen = true;
    } else {
      // First increase. A nearly flat step may be noise, so look one level further once.
      deepen = !extra_used && c.work < 1.05 * candidates[best].work;
      extra_used = extra_used || deepen;
    }
    if (c.feasible && (!have_best || c.work < candidates[best].work)) {
      best = l;
      have_best = true;
    }
    // An exact level has no tau-leap bias left to remove.
    if (levels.back().stats.n_tl <= 0.0 && c.feasible) deepen = false;
    if (!deepen) break;
    if (levels.size() >= cfg.max_levels) {
      std::ostringstream os;
      os << "no feasible hierarchy within " << cfg.max_levels << " levels (last theta " << c.theta << ")";
      if (have_best) break;
      throw CalibrationError(os.str());
    }
    LevelSpec next{refine_mesh(levels.back().mesh, cfg.refine_factor), levels.back().delta};
    levels.push_back(build_level(model, machine, cfg, levels.size(), next, levels, streams, progress));
  }

  levels.resize(best + 1);
  finalize_last_level(model, machine, cfg, levels, streams, progress);
  LevelPlan plan;
  plan.levels = std::move(levels);
  plan.scale = scale_of(plan.levels);
  Candidate c = allocate(plan.levels, plan.scale, cfg);
  if (!c.feasible) throw CalibrationError("the hierarchy became infeasible after fixing the last delta");
  work_by_depth[best] = c.work;
  plan.work_by_depth = std::move(work_by_depth);
  fill_plan(plan, c, cfg, machine);
  plan.model_hash = model_hash(model);
  return plan;
}

namespace {

struct LevelAccumulator {
  Moments diff, g, cost, weak, se;
  double sv = 0.0;
  double in_fine = 0.0;
  double tl = 0.0, k1 = 0.0, k2 = 0.0;
  std::size_t n = 0;

  void add(std::size_t level, const PairSample& p) {
    ++n;
    diff.add(p.difference());
    g.add(p.g_fine);
    cost.add(p.cost);
    tl += static_cast<double>(p.fine_counts.tl);
    k1 += static_cast<double>(p.fine_counts.k1);
    k2 += static_cast<double>(p.fine_counts.k2);
    if (p.fine_in) {
      in_fine += 1.0;
      weak.add(p.weak_error);
    }
    if (level == 0 ? p.fine_in : p.coarse_in) {
      se.add(p.s_e);
      sv += p.s_v;
    }
  }
  double mean_tl() const { return n ? tl / static_cast<double>(n) : 0.0; }
  double vhat() const { return se.n >= 2.0 ? se.variance() + sv / se.n : -1.0; }
};

}  // namespace

EstimateReport estimate(const Model& model, const LevelPlan& plan, const MachineConstants& machine,
                        const MlmcConfig& cfg, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  if (plan.levels.empty()) throw std::invalid_argument("estimate: empty plan");
  if (plan.model_hash.size() && plan.model_hash != model_hash(model))
    throw std::invalid_argument("estimate: the plan was calibrated for a different model");
  MlmcConfig run = cfg;
  run.tol = plan.tol;
  run.confidence = plan.confidence;
  run.threshold = plan.threshold;

  std::vector<PlannedLevel> levels = plan.levels;
  std::vector<LevelAccumulator> acc(levels.size());
  std::vector<std::size_t> target;
  for (const auto& l : levels) target.push_back(std::max<std::size_t>(1, l.M));
  StreamCursor streams, extension_streams;
  EstimateReport report;
  const double scale = plan.scale;

  std::vector<double> psi, V;
  double weak = 0.0;
  auto refresh = [&] {
    psi.assign(levels.size(), 0.0);
    V.assign(levels.size(), 0.0);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      psi[l] = acc[l].n ? std::max(acc[l].cost.mean, 1e-15) : std::max(levels[l].psi, 1e-15);
      double v = levels[l].V;
      if (l == 0 && acc[l].n >= 2) v = acc[l].g.variance();
      if (l > 0 && acc[l].vhat() >= 0.0) v = acc[l].vhat();
      V[l] = std::max(0.0, v) / (scale * scale);
    }
    const auto& last = acc.back();
    weak = std::abs(last.weak.n > 0.0 ? last.weak.mean : levels.back().stats.weak_error) / scale;
  };

  bool first = true;
  bool settle = false;
  for (std::size_t round = 0; round < 30; ++round) {
    report.rounds = round + 1;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const std::size_t want = first ? (target[l] + 1) / 2 : target[l];
      if (acc[l].n >= want) continue;
      SampleRequest req;
      req.level = l;
      req.fine = LevelSpec{levels[l].mesh, levels[l].delta};
      if (l > 0) req.coarse = LevelSpec{levels[l - 1].mesh, levels[l - 1].delta};
      req.seed = run.seed;
      req.purpose = kEstimationStreams;
      req.threshold = run.threshold;
      req.count = want - acc[l].n;
      req.first_index = streams.take(l, req.count);
      for (const auto& p : sample_batch(model, req, machine, run.execution)) acc[l].add(l, p);
    }
    if (settle) break;
    refresh();
    if ((run.tol - run.tol * run.tol - weak) / run.tol < run.min_stat_share) {
      if (levels.size() >= run.max_levels) throw InfeasibleTolerance("estimate: the weak error exceeds the budget");
      note(progress, "weak error above budget; adding a level");
      LevelSpec next{refine_mesh(levels.back().mesh, plan.refine_factor), levels.back().delta};
      levels.push_back(build_level(model, machine, run, levels.size(), next, levels, extension_streams, progress,
                                   kExtensionStreams));
      finalize_last_level(model, machine, run, levels, extension_streams, progress, kExtensionStreams);
      levels.back().V = std::max(0.0, levels.back().stats.vhat);
      acc.emplace_back();
      target.push_back(1);
      report.extended = true;
      refresh();
    }
    const auto cont = kkt_allocate(psi, V, run.tol, weak, run.confidence);
    const auto next = integer_allocation(psi, V, statistical_budget(run.tol, weak, run.confidence), cont);
    double w_old = 0.0, w_new = 0.0;
    bool done = true;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      w_old += psi[l] * static_cast<double>(target[l]);
      w_new += psi[l] * static_cast<double>(next[l]);
      done = done && acc[l].n >= next[l];
    }
    {
      std::ostringstream os;
      os << "round " << round << ": W=" << w_new << " (was " << w_old << ")";
      note(progress, os.str());
    }
    if (done) break;
    if (!first && std::abs(w_new - w_old) < 0.05 * w_old) settle = true;
    for (std::size_t l = 0; l < levels.size(); ++l) target[l] = settle ? std::max(target[l], next[l]) : next[l];
    first = false;
  }

  refresh();
  double estimate = 0.0, var = 0.0, work = 0.0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& a = acc[l];
    estimate += a.diff.mean;
    var += V[l] / static_cast<double>(std::max<std::size_t>(1, a.n));
    work += a.cost.mean * static_cast<double>(a.n);
    LevelOutcome o;
    o.level = l;
    o.M = a.n;
    o.mean_diff = a.diff.mean;
    o.var_diff = a.diff.variance();
    o.psi = a.cost.mean;
    o.vhat = V[l] * scale * scale;
    const double n = static_cast<double>(std::max<std::size_t>(1, a.n));
    o.n_tl = a.tl / n;
    o.n_k1 = a.k1 / n;
    o.n_k2 = a.k2 / n;
    o.exit_fraction = 1.0 - a.in_fine / n;
    report.levels.push_back(o);
  }
  report.estimate = estimate;
  report.tol = run.tol;
  report.scale = scale;
  report.weak_error = weak;
  report.exit_bound = levels.back().delta * acc.back().mean_tl();
  report.stat_half_width = run.confidence * std::sqrt(var);
  report.modeled_work = work;
  report.seed = run.seed;
  report.model_hash = model_hash(model);
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace srn
