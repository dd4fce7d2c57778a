#include <doctest.h>

#include <cmath>

#include "srn/chernoff.hpp"
#include "srn/model.hpp"
#include "srn/random.hpp"

using namespace srn;

namespace {

// Dense grid maximizer of (log delta + s x) / (x (e^s - 1)) for the decay model.
double decay_grid_tau(double x, double delta) {
  const double s1 = -std::log(delta) / x;
  double best = 0.0;
  for (double s = s1 + 1e-6; s <= s1 + 20.0; s += 1e-6) best = std::max(best, (std::log(delta) + s * x) / (x * std::expm1(s)));
  return best;
}

}  // namespace

TEST_CASE("decay tau matches grid search") {
  const auto m = decay_model();
  const State x{100};
  const double tau = chernoff_tau(m.net, x, 0.05);
  CHECK(tau == doctest::Approx(decay_grid_tau(100, 0.05)).epsilon(1e-6));
}

TEST_CASE("pure birth gives infinity and boundary gives zero") {
  const auto birth = parse_model("T = 1\nspecies X = 0\nreaction r: 0 -> X @ 5\nobservable = X\n");
  CHECK(std::isinf(chernoff_tau(birth.net, State{3}, 1e-2)));
  const auto m = decay_model();
  CHECK(chernoff_tau(m.net, State{0}, 1e-2) == 0.0);
}

TEST_CASE("gene states: finite positive steps, monotone in delta") {
  const auto m = gene_model();
  for (const State& x : {State{1, 2, 0}, State{20, 500, 100}, State{3, 1500, 10000}, State{1, 0, 0}}) {
    const double loose = chernoff_tau(m.net, x, 1e-2);
    const double tight = chernoff_tau(m.net, x, 1e-3);
    CHECK(tight <= loose);
    CHECK(tight >= 0.0);
  }
}

TEST_CASE("monotone in delta over random decay states") {
  const auto m = decay_model();
  Rng rng(5, 0);
  for (int k = 0; k < 200; ++k) {
    const State x{1 + static_cast<std::int64_t>(rng.uniform() * 1e5)};
    double prev = 0.0;
    for (double d : {1e-8, 1e-6, 1e-4, 1e-2, 1e-1}) {
      const double t = chernoff_tau(m.net, x, d);
      CHECK(t >= prev);
      prev = t;
    }
  }
}

TEST_CASE("returned tau maximizes the per-species bound") {
  const auto m = gene_model();
  // With few mRNA molecules the birth rate dominates and no step length can empty R.
  for (const State& x : {State{10, 300, 50}, State{1000, 300, 50}, State{1000, 5000, 50}}) {
    std::vector<double> a(m.net.reactions());
    m.net.propensities(x, a);
    // The budget is split over the d = 3 species; D can only grow, so only R and P can bind.
    const double tau = chernoff_tau(m.net, x, a, 1e-3);
    const double delta_i = 1e-3 / 3.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : {0u, 1u}) {
      double bi = 0.0;
      const double s1 = -std::log(delta_i) / static_cast<double>(x[i]);
      for (double s = s1 * 1.0001; s < s1 + 5.0; s += 1e-4) {
        // A negative value means D(s) < 0 with a positive numerator: every step length is safe.
        const double v = chernoff_tau_at(m.net, i, x, a, delta_i, s);
        bi = v < 0.0 ? std::numeric_limits<double>::infinity() : std::max(bi, v);
      }
      best = std::min(best, bi);
    }
    CAPTURE(x[0]);
    if (std::isinf(best)) {
      CHECK(std::isinf(tau));
    } else {
      CHECK(tau == doctest::Approx(best).epsilon(1e-4));
    }
  }
}

TEST_CASE("one-step exit frequency stays below delta" * doctest::test_suite("extended")) {
  const auto m = decay_model();
  Rng rng(11, 0);
  for (std::int64_t x0 : {5, 20, 100}) {
    const State x{x0};
    const double delta = 1e-2;
    const double tau = chernoff_tau(m.net, x, delta);
    int exits = 0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) exits += poisson(rng, static_cast<double>(x0) * tau) > x0;
    CHECK(exits / double(n) <= delta + 3 * std::sqrt(delta / n));
  }
}
