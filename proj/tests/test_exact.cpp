#include <doctest.h>

#include <cmath>

#include "srn/exact.hpp"
#include "srn/model.hpp"
#include "srn/oracle.hpp"
#include "srn/stats.hpp"

using namespace srn;

TEST_CASE("absorbing start gives a constant path") {
  const auto m = decay_model();
  Rng rng(1, 0);
  for (auto* sim : {&mnrm_simulate, &ssa_simulate}) {
    const auto p = (*sim)(m.net, State{0}, 0.0, 0.5, rng, true);
    CHECK(p.firings == 0);
    CHECK(p.final_state()[0] == 0);
    CHECK(p.t_end == 0.5);
    CHECK_FALSE(p.exited);
  }
}

TEST_CASE("next_firing skips zero rates and breaks ties by index") {
  MnrmClocks c;
  c.R = {0, 0, 0};
  c.P = {1.0, 1.0, 0.5};
  std::vector<double> S{1.0, 1.0, 0.0};
  auto [mu, dt] = next_firing(c, S);
  CHECK(mu == 0);
  CHECK(dt == 1.0);
  std::vector<double> none{0.0, 0.0, 0.0};
  CHECK(next_firing(c, none).first == 3);
  CHECK(std::isinf(next_firing(c, none).second));
}

TEST_CASE("MNRM decay mean matches the analytic mean") {
  const auto m = decay_model(1000, 1.0, 0.5);
  Moments x;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    Rng rng(7, i);
    x.add(static_cast<double>(mnrm_simulate(m.net, m.x0, 0.0, 0.5, rng, false).final_state()[0]));
  }
  const double exact = oracle::decay_exact_mean(1000, 1.0, 0.5);
  CHECK(std::abs(x.mean - exact) < 3.0 * x.std_error());
  CHECK(x.variance() == doctest::Approx(oracle::decay_exact_variance(1000, 1.0, 0.5)).epsilon(0.03));
}

TEST_CASE("SSA decay mean matches the analytic mean") {
  const auto m = decay_model(1000, 1.0, 0.5);
  Moments x;
  for (std::uint64_t i = 0; i < 50000; ++i) {
    Rng rng(8, i);
    x.add(static_cast<double>(ssa_simulate(m.net, m.x0, 0.0, 0.5, rng, false).final_state()[0]));
  }
  CHECK(std::abs(x.mean - oracle::decay_exact_mean(1000, 1.0, 0.5)) < 3.0 * x.std_error());
}

TEST_CASE("recorded paths are consistent") {
  const auto m = gene_model();
  Rng rng(3, 3);
  const auto p = mnrm_simulate(m.net, m.x0, 0.0, m.T, rng, true);
  CHECK(p.points() == p.steps() + 1);
  CHECK(p.times.front() == 0.0);
  CHECK(p.t_end == m.T);
  for (std::size_t k = 0; k + 1 < p.points(); ++k) CHECK(p.times[k] <= p.times[k + 1]);
  for (std::size_t k = 0; k < p.points(); ++k) CHECK(in_lattice(p.state(k)));
  CHECK(p.firings > 0);
  CHECK(p.ssa_steps > 0.0);

  Rng again(3, 3);
  const auto q = mnrm_simulate(m.net, m.x0, 0.0, m.T, again, false);
  CHECK(std::equal(q.final_state().begin(), q.final_state().end(), p.final_state().begin()));
  CHECK(q.firings == p.firings);
}
