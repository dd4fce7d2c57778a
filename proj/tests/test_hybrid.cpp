#include <doctest.h>

#include <cmath>

#include "srn/hybrid.hpp"
#include "srn/model.hpp"
#include "srn/oracle.hpp"
#include "srn/stats.hpp"
#include "srn/workmodel.hpp"

using namespace srn;

TEST_CASE("meshes") {
  const Mesh m = uniform_mesh(0.5, 4);
  CHECK(m.size() == 5);
  CHECK(m.front() == 0.0);
  CHECK(m.back() == 0.5);
  const Mesh f = refine_mesh(m, 2);
  CHECK(f.size() == 9);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(f[2 * i] == m[i]);
  CHECK(next_grid_point(m, 0.0) == 0.125);
  CHECK(next_grid_point(m, 0.125) == 0.25);
  CHECK(next_grid_point(m, 0.2) == 0.25);
  CHECK(next_grid_point(m, 0.5) == 0.5);
}

TEST_CASE("switching rule branches") {
  const auto machine = reference_constants();
  const auto decay = decay_model();
  std::vector<double> a(1);

  SUBCASE("few expected exact steps before the grid point: K1 branch") {
    const State x{2};
    const double a0 = decay.net.propensities(x, a);
    REQUIRE(machine.k1 / a0 >= 0.1);
    const auto d = switching_rule(decay.net, x, a, a0, 0.0, 0.1, 1e-2, machine);
    CHECK(d.method == Method::Mnrm);
    CHECK(d.kind == StepKind::MnrmK1);
  }
  SUBCASE("pure birth: infinite Chernoff step, tau-leap") {
    const auto birth = parse_model("T = 1\nspecies X = 0\nreaction r: 0 -> X @ 1000\nobservable = X\n");
    const State x{0};
    const double a0 = birth.net.propensities(x, a);
    const auto d = switching_rule(birth.net, x, a, a0, 0.0, 1.0, 1e-2, machine);
    CHECK(d.method == Method::TauLeap);
    CHECK(std::isinf(d.tau));
  }
  SUBCASE("large population: tau-leap") {
    const State x{100000};
    const double a0 = decay.net.propensities(x, a);
    const auto d = switching_rule(decay.net, x, a, a0, 0.0, 0.0625, 1e-2, machine);
    CHECK(d.method == Method::TauLeap);
  }
  SUBCASE("near the boundary with a small delta: K2 branch") {
    const State x{40};
    const double a0 = decay.net.propensities(x, a);
    const auto d = switching_rule(decay.net, x, a, a0, 0.0, 10.0, 1e-200, machine);
    CHECK(d.kind == StepKind::MnrmK2);
  }
}

TEST_CASE("absorbing start") {
  const auto m = decay_model();
  Rng rng(1, 1);
  const auto p = hybrid_path(m.net, State{0}, uniform_mesh(0.5, 8), {}, reference_constants(), rng);
  CHECK_FALSE(p.exited);
  CHECK(p.counts.total() == 0);
  CHECK(p.final_state()[0] == 0);
}

TEST_CASE("tiny delta removes tau-leap steps") {
  const auto m = decay_model(100, 1.0, 0.5);
  Moments tl;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    Rng rng(2, i);
    HybridConfig cfg;
    cfg.delta = 1e-12;
    cfg.record = false;
    tl.add(static_cast<double>(hybrid_path(m.net, m.x0, uniform_mesh(0.5, 16), cfg, reference_constants(), rng).counts.tl));
  }
  CHECK(tl.mean < 0.05);
}

TEST_CASE("decay at delta 1e-2 is tau-leap dominated") {
  const auto m = decay_model();
  const auto machine = calibrate_machine(m, 20000);
  Moments tl, exact;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(3, i);
    const auto p = hybrid_path(m.net, m.x0, uniform_mesh(0.5, 8), {}, machine, rng);
    tl.add(static_cast<double>(p.counts.tl));
    exact.add(static_cast<double>(p.counts.k1 + p.counts.k2));
  }
  CHECK(tl.mean == doctest::Approx(8.0).epsilon(0.05));
  CHECK(tl.mean / (tl.mean + exact.mean) > 0.9);
}

TEST_CASE("hybrid path invariants") {
  const auto m = gene_model();
  const Mesh mesh = uniform_mesh(1.0, 16);
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(4, i);
    const auto p = hybrid_path(m.net, m.x0, mesh, {}, reference_constants(), rng);
    if (p.exited) continue;
    CHECK(p.t_end == doctest::Approx(1.0));
    CHECK(p.steps() == static_cast<std::size_t>(p.counts.total()));
    CHECK(p.tl_rates.size() == static_cast<std::size_t>(p.counts.tl) * m.net.reactions());
    for (std::size_t k = 0; k + 1 < p.points(); ++k) {
      CHECK(p.times[k] < p.times[k + 1]);
      // Tau-leap steps never cross a grid point.
      if (p.kinds[k] == StepKind::TauLeap) CHECK(next_grid_point(mesh, p.times[k]) >= p.times[k + 1] - 1e-12);
    }
    CHECK(p.cost > 0.0);
  }
}

TEST_CASE("hybrid mean is close to the exact mean for small steps") {
  const auto m = decay_model(1000, 1.0, 0.5);
  Moments x;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    Rng rng(5, i);
    HybridConfig cfg;
    cfg.record = false;
    x.add(static_cast<double>(hybrid_path(m.net, m.x0, uniform_mesh(0.5, 256), cfg, reference_constants(), rng).final_state()[0]));
  }
  // Tau-leap bias is about dt/4 relative at this step size.
  const double exact = oracle::decay_exact_mean(1000, 1.0, 0.5);
  CHECK(std::abs(x.mean - exact) < 3.0 * x.std_error() + exact * 0.5 / 256 / 4 * 1.5);
}
