#include <doctest.h>

#include <cmath>

#include "srn/coupling.hpp"
#include "srn/model.hpp"
#include "srn/stats.hpp"
#include "srn/workmodel.hpp"

using namespace srn;

TEST_CASE("couple_poisson edge cases") {
  Rng rng(1, 0);
  for (int i = 0; i < 1000; ++i) {
    auto [p1, p2] = couple_poisson(3.7, 3.7, rng);
    CHECK(p1 == p2);
    auto [q1, q2] = couple_poisson(2.5, 0.0, rng);
    CHECK(q2 == 0);
    CHECK(q1 >= 0);
  }
}

TEST_CASE("couple_poisson marginals and difference variance") {
  const std::pair<double, double> cases[] = {{1.0, 1.5}, {20.0, 12.0}, {0.3, 50.0}, {100.0, 101.0}};
  for (auto [l1, l2] : cases) {
    Rng rng(2, static_cast<std::uint64_t>(l1 * 1000 + l2));
    Moments a, b, diff;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      auto [p1, p2] = couple_poisson(l1, l2, rng);
      a.add(static_cast<double>(p1));
      b.add(static_cast<double>(p2));
      diff.add(static_cast<double>(p1 - p2));
    }
    CAPTURE(l1);
    CAPTURE(l2);
    CHECK(std::abs(a.mean - l1) < 4.0 * std::sqrt(l1 / n));
    CHECK(std::abs(b.mean - l2) < 4.0 * std::sqrt(l2 / n));
    CHECK(a.variance() == doctest::Approx(l1).epsilon(0.03));
    CHECK(b.variance() == doctest::Approx(l2).epsilon(0.03));
    CHECK(diff.variance() == doctest::Approx(std::abs(l1 - l2)).epsilon(0.03));
  }
}

TEST_CASE("split_rates example") {
  const double coarse[] = {3, 0}, fine[] = {1, 2};
  double S[6];
  split_rates(coarse, fine, S);
  CHECK(S[0] == 1);
  CHECK(S[1] == 0);
  CHECK(S[2] == 2);
  CHECK(S[3] == 0);
  CHECK(S[4] == 0);
  CHECK(S[5] == 2);
}

TEST_CASE("coupled exact steps with equal rates move both levels together") {
  const auto m = gene_model();
  const std::size_t J = m.net.reactions();
  State xc = m.x0, xf = m.x0;
  Rng rng(3, 0);
  MnrmClocks clocks;
  clocks.reset(3 * J, rng);
  std::vector<double> a(J), S(3 * J);
  double t = 0.0;
  for (int k = 0; k < 2000 && t < 1.0; ++k) {
    m.net.propensities(xc, a);
    split_rates(a, a, S);
    const auto f = coupled_mnrm_step(m.net, t, 1.0, xc, xf, clocks, S, rng);
    CHECK((f.group == ChannelGroup::Common || f.group == ChannelGroup::None));
    REQUIRE(xc == xf);
  }
}

TEST_CASE("vanishing delta gives identical legs") {
  // At x0 = 20 the Chernoff step never pays off, so both legs run exact steps throughout.
  const auto m = decay_model(20, 1.0, 0.5);
  const Mesh coarse = uniform_mesh(0.5, 4), fine = refine_mesh(coarse, 2);
  CoupledConfig cfg;
  cfg.delta_coarse = cfg.delta_fine = 1e-14;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(4, i);
    const auto p = coupled_hybrid_path(m.net, m.x0, coarse, fine, cfg, reference_constants(), rng);
    CHECK(p.coarse.counts.tl == 0);
    CHECK(p.fine.counts.tl == 0);
    CHECK(p.coarse.final_state()[0] == p.fine.final_state()[0]);
  }
}

TEST_CASE("tau-leap blocks draw three Poisson variates per channel") {
  const auto m = gene_model();
  const Mesh coarse = uniform_mesh(1.0, 8), fine = refine_mesh(coarse, 2);
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(5, i);
    const auto p = coupled_hybrid_path(m.net, m.x0, coarse, fine, {}, reference_constants(), rng);
    CHECK(p.b1_poisson_calls == 3 * m.net.reactions() * static_cast<std::uint64_t>(p.b1_blocks));
  }
}

namespace {

struct Law {
  Moments coarse, fine, single_coarse, single_fine;
};

Law compare_marginals(const Model& m, const Mesh& coarse, const Mesh& fine, double delta, int n,
                      std::uint64_t seed) {
  Law law;
  CoupledConfig cfg{delta, delta, false};
  HybridConfig hc{delta, false};
  const auto machine = reference_constants();
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const auto p = coupled_hybrid_path(m.net, m.x0, coarse, fine, cfg, machine, rng);
    if (!p.coarse.exited) law.coarse.add(m.g(p.coarse.final_state()));
    if (!p.fine.exited) law.fine.add(m.g(p.fine.final_state()));
    Rng r1(seed + 1, static_cast<std::uint64_t>(i)), r2(seed + 2, static_cast<std::uint64_t>(i));
    const auto sc = hybrid_path(m.net, m.x0, coarse, hc, machine, r1);
    const auto sf = hybrid_path(m.net, m.x0, fine, hc, machine, r2);
    if (!sc.exited) law.single_coarse.add(m.g(sc.final_state()));
    if (!sf.exited) law.single_fine.add(m.g(sf.final_state()));
  }
  return law;
}

void check_same(const Moments& a, const Moments& b) {
  const double se = std::sqrt(a.variance() / a.n + b.variance() / b.n);
  CHECK(std::abs(a.mean - b.mean) < 4.0 * se);
  const double var_se = std::sqrt(a.variance_of_variance() + b.variance_of_variance());
  CHECK(std::abs(a.variance() - b.variance()) < 4.0 * var_se);
}

}  // namespace

TEST_CASE("each coupled leg has the single-level law: decay") {
  const auto m = decay_model(1000, 1.0, 0.5);
  const Mesh coarse = uniform_mesh(0.5, 4), fine = refine_mesh(coarse, 2);
  const Law law = compare_marginals(m, coarse, fine, 1e-2, 20000, 60);
  check_same(law.coarse, law.single_coarse);
  check_same(law.fine, law.single_fine);
}

TEST_CASE("each coupled leg has the single-level law: mixed methods") {
  // Small populations make both levels switch between exact and tau-leap steps.
  const auto m = decay_model(40, 1.0, 1.0);
  const Mesh coarse = uniform_mesh(1.0, 2), fine = refine_mesh(coarse, 2);
  const Law law = compare_marginals(m, coarse, fine, 0.1, 20000, 70);
  check_same(law.coarse, law.single_coarse);
  check_same(law.fine, law.single_fine);
}

TEST_CASE("each coupled leg has the single-level law: gene" * doctest::test_suite("extended")) {
  const auto m = gene_model();
  const Mesh coarse = uniform_mesh(1.0, 8), fine = refine_mesh(coarse, 2);
  const Law law = compare_marginals(m, coarse, fine, 1e-2, 5000, 80);
  check_same(law.coarse, law.single_coarse);
  check_same(law.fine, law.single_fine);
}
