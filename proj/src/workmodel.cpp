#include "srn/workmodel.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <thread>

#include "srn/chernoff.hpp"
#include "srn/errors.hpp"
#include "srn/exact.hpp"
#include "srn/random.hpp"

namespace srn {

double poisson_cost(const MachineConstants& m, double lambda) { return m.cp(lambda); }

double k2(const MachineConstants& m, std::span<const double> a, double tau) {
  double tl = m.c3;
  for (double aj : a) tl += m.cp(std::isfinite(tau) ? aj * tau : (aj > 0.0 ? tau : 0.0));
  return tl / (m.c1 + m.c3);
}

double k2(const ReactionNetwork& net, std::span<const std::int64_t> x, double delta, const MachineConstants& m) {
  std::vector<double> a(net.reactions());
  net.propensities(x, a);
  return k2(m, a, chernoff_tau(net, x, a, delta));
}

double path_cost(const MachineConstants& m, std::int64_t n_k1, std::int64_t n_k2, std::int64_t n_tl,
                 std::span<const double> poisson_means) {
  double c = m.c1 * n_k1 + m.c2 * n_k2 + m.c3 * n_tl;
  for (double l : poisson_means) c += m.cp(l);
  return c;
}

namespace {

// Least-squares coefficients of y ~ sum_k c_k f_k(x) via the normal equations.
template <std::size_t K>
std::array<double, K> least_squares(const std::vector<std::array<double, K>>& rows, const std::vector<double>& y) {
  std::array<double, K> c{};
  if (rows.size() < K) {
    if (!rows.empty()) c[0] = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    return c;
  }
  std::array<std::array<double, K + 1>, K> A{};
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < K; ++j) A[i][j] += rows[r][i] * rows[r][j];
      A[i][K] += rows[r][i] * y[r];
    }
  for (std::size_t i = 0; i < K; ++i) {
    std::size_t piv = i;
    for (std::size_t r = i + 1; r < K; ++r)
      if (std::abs(A[r][i]) > std::abs(A[piv][i])) piv = r;
    std::swap(A[i], A[piv]);
    if (A[i][i] == 0.0) return c;
    for (std::size_t r = 0; r < K; ++r) {
      if (r == i) continue;
      const double f = A[r][i] / A[i][i];
      for (std::size_t k = i; k <= K; ++k) A[r][k] -= f * A[i][k];
    }
  }
  for (std::size_t i = 0; i < K; ++i) c[i] = A[i][K] / A[i][i];
  return c;
}

}  // namespace

PoissonCostCurve fit_poisson_cost(std::vector<std::pair<double, double>> grid) {
  std::sort(grid.begin(), grid.end());
  PoissonCostCurve curve;
  curve.grid = grid;
  std::vector<double> zero, y_inv, y_ptrs;
  std::vector<std::array<double, 3>> inversion;
  std::vector<std::array<double, 2>> ptrs;
  for (auto [l, y] : grid) {
    if (!(l > 0.0)) {
      zero.push_back(y);
    } else if (l < kPoissonInversionLimit) {
      inversion.push_back({1.0, -std::expm1(-l), l});
      y_inv.push_back(y);
    } else {
      ptrs.push_back({1.0, 1.0 / std::sqrt(l)});
      y_ptrs.push_back(y);
    }
  }
  if (!zero.empty()) curve.zero_cost = std::accumulate(zero.begin(), zero.end(), 0.0) / static_cast<double>(zero.size());
  const auto ci = least_squares(inversion, y_inv);
  curve.inv_base = ci[0];
  curve.inv_branch = ci[1];
  curve.inv_slope = ci[2];
  const auto cp = least_squares(ptrs, y_ptrs);
  curve.ptrs_base = cp[0];
  curve.ptrs_coef = cp[1];

  const double n = static_cast<double>(grid.size());
  double mean_y = 0.0;
  for (auto [l, y] : grid) mean_y += y / n;
  double sst = 0.0, sse = 0.0;
  for (auto [l, y] : grid) {
    sst += (y - mean_y) * (y - mean_y);
    sse += (y - curve(l)) * (y - curve(l));
  }
  curve.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  return curve;
}

std::string host_fingerprint() {
  char host[256] = {0};
  gethostname(host, sizeof host - 1);
  std::string cpu;
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);)
    if (line.rfind("model name", 0) == 0) {
      cpu = line.substr(line.find(':') + 1);
      break;
    }
  std::string s = std::string(host) + "|" + cpu + "|" + std::to_string(std::thread::hardware_concurrency()) +
                  "|" + __VERSION__;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

volatile double g_sink = 0.0;

// Median over batches of the per-operation time; `body(n)` performs n operations and
// returns how many it actually did.
template <class Body>
double time_per_op(std::size_t ops, Body&& body) {
  constexpr int kBatches = 7;
  const std::size_t per_batch = std::max<std::size_t>(ops / kBatches, 1000);
  body(per_batch / 10);  // warm-up
  std::vector<double> samples;
  for (int b = 0; b < kBatches; ++b) {
    const auto t0 = Clock::now();
    const std::size_t done = body(per_batch);
    const auto t1 = Clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(std::max<std::size_t>(done, 1)));
  }
  std::nth_element(samples.begin(), samples.begin() + kBatches / 2, samples.end());
  return samples[kBatches / 2];
}

std::string now_iso() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

MachineConstants calibrate_machine(const Model& model, std::size_t repetitions) {
  const auto& net = model.net;
  const std::size_t J = net.reactions(), d = net.species();
  MachineConstants m;
  Rng rng(0x5eedULL, 1);

  // States visited by exact paths, used for the Chernoff timings.
  std::vector<State> states;
  {
    Rng r(0x5eedULL, 2);
    for (int p = 0; p < 4 && states.size() < 4096; ++p) {
      auto path = mnrm_simulate(net, model.x0, 0.0, model.T, r, true);
      const std::size_t n = path.points();
      const std::size_t stride = std::max<std::size_t>(n / 1024, 1);
      for (std::size_t k = 0; k < n; k += stride) states.emplace_back(path.state(k).begin(), path.state(k).end());
    }
    std::vector<double> a(J);
    std::erase_if(states, [&](const State& x) { return net.propensities(x, a) == 0.0; });
    if (states.empty()) throw CalibrationError("model has no state with positive total propensity");
  }

  // Exact stepping loop; with_chernoff adds the step-size computation of the K2 branch.
  auto exact_steps = [&](bool with_chernoff) {
    return [&, with_chernoff](std::size_t n) {
      State x = model.x0;
      std::vector<double> a(J);
      MnrmClocks clocks;
      clocks.reset(J, rng);
      double t = 0.0, acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double a0 = net.propensities(x, a);
        if (a0 == 0.0 || t >= model.T) {
          x = model.x0;
          t = 0.0;
          continue;
        }
        if (with_chernoff) acc += chernoff_tau(net, x, a, 1e-2);
        else acc += (1.0 / a0 < model.T - t) ? 1.0 : 0.0;
        auto [mu, dt] = next_firing(clocks, a);
        net.apply(x, mu, 1);
        advance_clocks(clocks, a, dt, mu, rng);
        t += dt;
      }
      g_sink = g_sink + acc;
      return n;
    };
  };
  m.c1 = time_per_op(repetitions, exact_steps(false));
  m.c2 = time_per_op(repetitions, exact_steps(true));
  m.c3 = time_per_op(repetitions, [&](std::size_t n) {
    std::vector<double> a(J);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& x = states[k % states.size()];
      net.propensities(x, a);
      acc += chernoff_tau(net, x, a, 1e-2);
    }
    g_sink = g_sink + acc;
    return n;
  });
  m.c_star = time_per_op(repetitions, [&](std::size_t n) {
    std::size_t steps = 0;
    while (steps < n) {
      auto path = ssa_simulate(net, model.x0, 0.0, model.T, rng, false);
      steps += static_cast<std::size_t>(std::max<std::int64_t>(path.firings, 1));
    }
    return steps;
  });
  m.k1 = m.c3 / m.c1;

  std::vector<std::pair<double, double>> grid;
  for (double lambda : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 25.0, 50.0, 100.0, 1e3, 1e4, 1e5}) {
    const double c = time_per_op(repetitions / 4, [&](std::size_t n) {
      std::int64_t acc = 0;
      for (std::size_t k = 0; k < n; ++k) acc += poisson(rng, lambda);
      g_sink = g_sink + static_cast<double>(acc);
      return n;
    });
    grid.emplace_back(lambda, c);
  }
  m.cp = fit_poisson_cost(std::move(grid));
  (void)d;

  m.fingerprint = host_fingerprint();
  m.timestamp = now_iso();
  m.model_hash = model_hash(model);
  return m;
}

void save_profile(const MachineConstants& m, const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["units"] = "seconds";
  j["fingerprint"] = m.fingerprint;
  j["timestamp"] = m.timestamp;
  j["model_hash"] = m.model_hash;
  j["C1"] = m.c1;
  j["C2"] = m.c2;
  j["C3"] = m.c3;
  j["C_star"] = m.c_star;
  j["K1"] = m.k1;
  j["C_P"] = {{"form", "lambda = 0: zero; lambda < limit: inv_base + inv_branch*(1-exp(-lambda)) + inv_slope*lambda; "
                        "otherwise ptrs_base + ptrs_coef/sqrt(lambda)"},
              {"inversion_limit", kPoissonInversionLimit},
              {"zero", m.cp.zero_cost},
              {"inv_base", m.cp.inv_base},
              {"inv_branch", m.cp.inv_branch},
              {"inv_slope", m.cp.inv_slope},
              {"ptrs_base", m.cp.ptrs_base},
              {"ptrs_coef", m.cp.ptrs_coef},
              {"r_squared", m.cp.r_squared}};
  nlohmann::json grid = nlohmann::json::array();
  for (auto [l, c] : m.cp.grid) grid.push_back({{"lambda", l}, {"seconds", c}, {"residual", c - m.cp(l)}});
  j["C_P"]["grid"] = grid;
  std::ofstream out(path);
  if (!out) throw CalibrationError("cannot write machine profile '" + path + "'");
  out << j.dump(2) << "\n";
}

MachineConstants load_profile(const std::string& path, const std::string& expected_model_hash) {
  std::ifstream in(path);
  if (!in)
    throw CalibrationError("machine profile '" + path + "' not found; run `calibrate-machine` first");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CalibrationError("machine profile '" + path + "' is not valid JSON: " + e.what());
  }
  MachineConstants m;
  m.fingerprint = j.at("fingerprint");
  m.timestamp = j.at("timestamp");
  m.model_hash = j.at("model_hash");
  if (m.fingerprint != host_fingerprint())
    throw CalibrationError("machine profile '" + path + "' was measured on another host; rerun `calibrate-machine`");
  if (!expected_model_hash.empty() && m.model_hash != expected_model_hash)
    throw CalibrationError("machine profile '" + path + "' was measured for another model; rerun `calibrate-machine`");
  m.c1 = j.at("C1");
  m.c2 = j.at("C2");
  m.c3 = j.at("C3");
  m.c_star = j.at("C_star");
  m.k1 = j.at("K1");
  const auto& cp = j.at("C_P");
  m.cp.zero_cost = cp.at("zero");
  m.cp.inv_base = cp.at("inv_base");
  m.cp.inv_branch = cp.at("inv_branch");
  m.cp.inv_slope = cp.at("inv_slope");
  m.cp.ptrs_base = cp.at("ptrs_base");
  m.cp.ptrs_coef = cp.at("ptrs_coef");
  m.cp.r_squared = cp.at("r_squared");
  for (const auto& g : cp.at("grid")) m.cp.grid.emplace_back(g.at("lambda"), g.at("seconds"));
  return m;
}

MachineConstants reference_constants() {
  MachineConstants m;
  m.c1 = 4e-8;
  m.c2 = 3e-7;
  m.c3 = 2.5e-7;
  m.c_star = 4e-8;
  m.k1 = m.c3 / m.c1;
  m.cp.zero_cost = 2e-9;
  m.cp.inv_base = 1e-8;
  m.cp.inv_slope = 3e-9;
  m.cp.ptrs_base = 4e-8;
  m.cp.ptrs_coef = 0.0;
  m.cp.r_squared = 1.0;
  m.fingerprint = "reference";
  m.timestamp = "n/a";
  return m;
}

}  // namespace srn
