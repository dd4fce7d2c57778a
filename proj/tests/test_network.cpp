#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "srn/errors.hpp"
#include "srn/model.hpp"
#include "srn/network.hpp"

using namespace srn;

namespace {

std::vector<double> props(const ReactionNetwork& net, const State& x) {
  std::vector<double> a(net.reactions());
  net.propensities(x, a);
  return a;
}

// Classical RK4 on the mean-field ODE, independent of the production Euler integrator.
std::vector<double> rk4(const ReactionNetwork& net, std::vector<double> x, double T, double h) {
  const std::size_t d = net.species(), J = net.reactions();
  std::vector<double> a(J);
  auto f = [&](const std::vector<double>& y) {
    std::vector<double> dy(d, 0.0);
    net.propensities_real(y, a);
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t i = 0; i < d; ++i) dy[i] += net.nu(j)[i] * a[j];
    return dy;
  };
  const auto steps = static_cast<std::size_t>(std::llround(T / h));
  for (std::size_t s = 0; s < steps; ++s) {
    auto k1 = f(x);
    std::vector<double> y(d);
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + h / 2 * k1[i];
    auto k2 = f(y);
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + h / 2 * k2[i];
    auto k3 = f(y);
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + h * k3[i];
    auto k4 = f(y);
    for (std::size_t i = 0; i < d; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return x;
}

}  // namespace

TEST_CASE("decay propensities") {
  const auto m = decay_model();
  CHECK(props(m.net, {10}) == std::vector<double>{10.0});
  CHECK(props(m.net, {0}) == std::vector<double>{0.0});
}

TEST_CASE("gene propensities at (1,2,0)") {
  const auto m = gene_model();
  const auto a = props(m.net, {1, 2, 0});
  REQUIRE(a.size() == 5);
  CHECK(a[0] == doctest::Approx(25));
  CHECK(a[1] == doctest::Approx(1000));
  CHECK(a[2] == doctest::Approx(0.002));
  CHECK(a[3] == doctest::Approx(0.1));
  CHECK(a[4] == doctest::Approx(2));
  // Dimerization needs two proteins.
  CHECK(props(m.net, {1, 1, 0})[2] == 0.0);
}

TEST_CASE("apply_reaction") {
  const auto decay = decay_model();
  CHECK(apply_reaction(decay.net, {5}, 0, 2) == State{3});
  CHECK(apply_reaction(decay.net, {5}, 0, 0) == State{5});
  const auto gene = gene_model();
  CHECK(apply_reaction(gene.net, {0, 4, 0}, 2, 1) == State{0, 2, 1});
  for (std::size_t j = 0; j < gene.net.reactions(); ++j)
    CHECK(apply_reaction(gene.net, {3, 7, 1}, j, 0) == State{3, 7, 1});
}

TEST_CASE("mass-action gradient matches finite differences") {
  const auto gene = gene_model();
  const State x{3, 9, 4};
  for (std::size_t j = 0; j < gene.net.reactions(); ++j) {
    std::vector<double> g(3, 0.0);
    gene.net.gradient(j, x, g);
    for (std::size_t i = 0; i < 3; ++i) {
      // Central difference of a polynomial of degree <= 2 is exact.
      State up = x, down = x;
      ++up[i];
      --down[i];
      const double fd = (gene.net.reaction_list()[j].propensity(std::span<const std::int64_t>(up)) -
                         gene.net.reaction_list()[j].propensity(std::span<const std::int64_t>(down))) /
                        2.0;
      CHECK(g[i] == doctest::Approx(fd));
    }
  }
}

TEST_CASE("negative general propensity is a model error") {
  const auto m = parse_model(
      "T = 1\nspecies X = 5\nreaction r: nu = (-1) @ 2 - X\nobservable = X\n");
  std::vector<double> a(1);
  CHECK_THROWS_AS(m.net.propensities(State{5}, a), ModelError);
  CHECK(m.net.propensities(State{1}, a) == doctest::Approx(1.0));
}

TEST_CASE("propensity clamps to zero when the firing would leave the lattice") {
  const auto m = parse_model("T = 1\nspecies X = 5\nreaction r: nu = (-1) @ 3\nobservable = X\n");
  std::vector<double> a(1);
  CHECK(m.net.propensities(State{0}, a) == 0.0);
  CHECK(m.net.propensities(State{1}, a) == 3.0);
}

TEST_CASE("mean field") {
  const auto decay = decay_model();
  const auto traj = mean_field(decay.net, {1e5}, 0.5, 1e-5);
  CHECK(traj.back().t == doctest::Approx(0.5));
  CHECK(traj.back().x[0] == doctest::Approx(1e5 * std::exp(-0.5)).epsilon(1e-4));
  const auto zero = mean_field(decay.net, {0.0}, 0.5, 1e-2);
  for (const auto& p : zero) CHECK(p.x[0] == 0.0);

  const auto gene = gene_model();
  const auto euler = mean_field(gene.net, {0, 0, 0}, 1.0, 1e-5).back().x;
  const auto ref = rk4(gene.net, {0, 0, 0}, 1.0, 1e-4);
  for (std::size_t i = 0; i < 3; ++i) CHECK(euler[i] == doctest::Approx(ref[i]).epsilon(1e-3));

  const auto boom = parse_model("T = 10\nspecies X = 10\nreaction r: 2 X -> 3 X @ 1\nobservable = X\n");
  CHECK_THROWS_AS(mean_field(boom.net, {10.0}, 10.0, 1e-3, 1e9), ModelError);
}

TEST_CASE("model file round trip and hash") {
  for (const auto& m : {decay_model(), gene_model()}) {
    const std::string text = write_model(m);
    const Model back = parse_model(text);
    CHECK(write_model(back) == text);
    CHECK(model_hash(back) == model_hash(m));
    CHECK(back.T == m.T);
    CHECK(back.x0 == m.x0);
    CHECK(back.net.reactions() == m.net.reactions());
    std::vector<double> a(m.net.reactions()), b(m.net.reactions());
    State x(m.net.species(), 7);
    m.net.propensities(x, a);
    back.net.propensities(x, b);
    CHECK(a == b);
  }
  CHECK(model_hash(decay_model(1e5, 1.0)) != model_hash(decay_model(1e5, 2.0)));
  CHECK(model_hash(decay_model()).size() == 16);
}

TEST_CASE("shipped model files agree with the built-in models") {
  const auto dir = std::filesystem::path(__FILE__).parent_path().parent_path() / "models";
  CHECK(model_hash(load_model((dir / "decay.model").string())) == model_hash(decay_model()));
  const auto gene = load_model((dir / "gene.model").string());
  std::vector<double> a(5), b(5);
  gene.net.propensities(State{1, 2, 0}, a);
  gene_model().net.propensities(State{1, 2, 0}, b);
  CHECK(a == b);
}

TEST_CASE("general polynomial propensity") {
  const auto m = parse_model(
      "T = 1\nspecies A = 3\nspecies B = 1\n"
      "reaction r: nu = (-1, 1) @ 0.5*A^2*B + 2*A - 1\nobservable = 2*A + B + 3\n");
  std::vector<double> a(1);
  m.net.propensities(State{3, 2}, a);
  CHECK(a[0] == doctest::Approx(0.5 * 9 * 2 + 6 - 1));
  CHECK(m.g(State{3, 2}) == doctest::Approx(11.0));
  CHECK(write_model(parse_model(write_model(m))) == write_model(m));
}

TEST_CASE("parse errors carry line and column") {
  auto expect_error = [](const std::string& text, int line) {
    try {
      parse_model(text);
      FAIL("no error for: " << text);
    } catch (const ParseError& e) {
      if (line > 0) CHECK(e.line == line);
      CHECK(e.column >= 1);
    }
  };
  expect_error("T = 1\nspecies X = 1\nreaction r: X -> Y @ 1\nobservable = X\n", 3);
  expect_error("T = 1\nspecies X = 1\nreaction r: X -> 0 @\nobservable = X\n", 3);
  expect_error("T = 1\nspecies X = 1\nreaction r: X -> 0 @ 1\n", -1);
  expect_error("species X = 1\nreaction r: X -> 0 @ 1\nobservable = X\n", -1);
  expect_error("T = 1\nspecies X = 1\nfoo = 3\nreaction r: X -> 0 @ 1\nobservable = X\n", 3);
  expect_error("T = 1\nspecies X = -4\nreaction r: X -> 0 @ 1\nobservable = X\n", 2);
}

TEST_CASE("lint") {
  auto has = [](const std::vector<LintMessage>& msgs, const std::string& needle) {
    for (const auto& m : msgs)
      if (m.text.find(needle) != std::string::npos) return true;
    return false;
  };
  CHECK_FALSE(has(lint_model(decay_model(), true), "no w >= 0"));
  CHECK(has(lint_model(gene_model(), true), "no w >= 0"));
  const auto unused = parse_model("T = 1\nspecies X = 1\nspecies Y = 1\nreaction r: X -> 0 @ 1\nobservable = X\n");
  CHECK(has(lint_model(unused, false), "'Y' never changes"));
  const auto negative = parse_model("T = 1\nspecies X = 1\nreaction r: nu = (1) @ X - 2\nobservable = X\n");
  bool error = false;
  for (const auto& m : lint_model(negative, false)) error = error || m.error;
  CHECK(error);
}
