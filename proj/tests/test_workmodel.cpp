#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "srn/chernoff.hpp"
#include "srn/errors.hpp"
#include "srn/model.hpp"
#include "srn/workmodel.hpp"

using namespace srn;

TEST_CASE("fit recovers an exact synthetic curve") {
  PoissonCostCurve truth;
  truth.zero_cost = 3e-9;
  truth.inv_base = 1.2e-8;
  truth.inv_branch = 5e-9;
  truth.inv_slope = 2.5e-9;
  truth.ptrs_base = 6e-8;
  truth.ptrs_coef = 8e-8;
  std::vector<std::pair<double, double>> grid;
  for (double l : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0, 1024.0}) grid.emplace_back(l, truth(l));
  const auto fit = fit_poisson_cost(grid);
  CHECK(fit.zero_cost == doctest::Approx(truth.zero_cost).epsilon(1e-6));
  CHECK(fit.inv_base == doctest::Approx(truth.inv_base).epsilon(1e-6));
  CHECK(fit.inv_branch == doctest::Approx(truth.inv_branch).epsilon(1e-6));
  CHECK(fit.inv_slope == doctest::Approx(truth.inv_slope).epsilon(1e-6));
  CHECK(fit.ptrs_base == doctest::Approx(truth.ptrs_base).epsilon(1e-6));
  CHECK(fit.ptrs_coef == doctest::Approx(truth.ptrs_coef).epsilon(1e-6));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("k2 at tau = 0 charges only zero-mean variates") {
  const auto m = reference_constants();
  const double a[] = {1.0, 5.0, 0.0};
  CHECK(k2(m, a, 0.0) == doctest::Approx((m.c3 + 3 * m.cp.zero_cost) / (m.c1 + m.c3)));
}

TEST_CASE("k2 is nondecreasing in tau for a monotone cost curve") {
  const auto m = reference_constants();
  const double a[] = {1.0, 50.0, 0.3};
  double prev = 0.0;
  for (double tau = 0.0; tau < 100.0; tau = tau * 1.3 + 1e-3) {
    const double k = k2(m, a, tau);
    CHECK(k >= prev - 1e-15);
    prev = k;
  }
}

TEST_CASE("decay k2 matches its components") {
  const auto model = decay_model();
  const auto m = reference_constants();
  const State x{5000};
  const double tau = chernoff_tau(model.net, x, 1e-2);
  const double expected = (m.c3 + m.cp(5000.0 * tau)) / (m.c1 + m.c3);
  CHECK(k2(model.net, x, 1e-2, m) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("path cost") {
  const auto m = reference_constants();
  const double means[] = {0.0, 3.0, 40.0};
  CHECK(path_cost(m, 2, 1, 3, means) ==
        doctest::Approx(2 * m.c1 + m.c2 + 3 * m.c3 + m.cp(0.0) + m.cp(3.0) + m.cp(40.0)));
}

TEST_CASE("host calibration and profile round trip") {
  const auto model = decay_model();
  const auto m = calibrate_machine(model, 20000);
  CHECK(m.c1 > 0.0);
  CHECK(m.c2 > 0.0);
  CHECK(m.c3 > 0.0);
  CHECK(m.c_star > 0.0);
  CHECK(m.k1 == doctest::Approx(m.c3 / m.c1));
  CHECK(m.cp.r_squared > 0.9);
  CHECK(m.cp.grid.size() >= 8);

  const auto dir = std::filesystem::temp_directory_path() / "srn_workmodel_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "profile.json").string();
  save_profile(m, path);
  const auto back = load_profile(path, model_hash(model));
  CHECK(back.c1 == m.c1);
  CHECK(back.c2 == m.c2);
  CHECK(back.c3 == m.c3);
  CHECK(back.c_star == m.c_star);
  CHECK(back.cp(0.0) == m.cp(0.0));
  CHECK(back.cp(3.0) == m.cp(3.0));
  CHECK(back.cp(300.0) == m.cp(300.0));
  CHECK(back.cp.grid.size() == m.cp.grid.size());

  SUBCASE("other model") { CHECK_THROWS_AS(load_profile(path, model_hash(gene_model())), CalibrationError); }
  SUBCASE("other host") {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    j["fingerprint"] = "elsewhere";
    std::ofstream(path) << j.dump();
    CHECK_THROWS_AS(load_profile(path, ""), CalibrationError);
  }
  SUBCASE("missing") { CHECK_THROWS_AS(load_profile((dir / "none.json").string(), ""), CalibrationError); }
  std::filesystem::remove_all(dir);
}
