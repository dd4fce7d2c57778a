#include <doctest.h>

#include <json.hpp>

#include "srn/artifacts.hpp"
#include "srn/mlmc.hpp"
#include "srn/model.hpp"
#include "srn/sampler.hpp"
#include "srn/workmodel.hpp"

using namespace srn;

namespace {

bool same(const PairSample& a, const PairSample& b) {
  return a.g_fine == b.g_fine && a.g_coarse == b.g_coarse && a.fine_in == b.fine_in && a.coarse_in == b.coarse_in &&
         a.cost == b.cost && a.ssa_steps == b.ssa_steps && a.fine_counts.tl == b.fine_counts.tl &&
         a.coarse_counts.tl == b.coarse_counts.tl && a.weak_error == b.weak_error && a.s_e == b.s_e &&
         a.s_v == b.s_v;
}

}  // namespace

TEST_CASE("serial and parallel batches are bit-identical") {
  const auto model = gene_model();
  SampleRequest req;
  req.level = 2;
  req.coarse = LevelSpec{uniform_mesh(1.0, 8), 1e-2};
  req.fine = LevelSpec{uniform_mesh(1.0, 16), 1e-2};
  req.seed = 42;
  req.purpose = kEstimationStreams;
  req.first_index = 17;
  req.count = 64;
  const auto machine = reference_constants();
  const auto serial = sample_batch(model, req, machine, Execution::Serial);
  for (int workers : {1, 2, 4}) {
    set_worker_count(workers);
    const auto parallel = sample_batch(model, req, machine, Execution::Parallel);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(same(serial[i], parallel[i]));
  }
  set_worker_count(0);
  // Path i of the batch is the single sample i on stream first_index + i.
  CHECK(same(serial[5], sample_pair(model, req, machine, 5)));
}

TEST_CASE("plan and report artifacts round trip") {
  const auto model = decay_model();
  MlmcConfig cfg;
  cfg.tol = 4e-2;
  const auto plan = calibrate(model, reference_constants(), cfg);
  const std::string text = plan_to_json(plan);
  const auto back = plan_from_json(text, model_hash(model));
  REQUIRE(back.levels.size() == plan.levels.size());
  CHECK(back.tol == plan.tol);
  CHECK(back.scale == plan.scale);
  CHECK(back.seed == plan.seed);
  CHECK(back.refine_factor == plan.refine_factor);
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    CHECK(back.levels[l].mesh == plan.levels[l].mesh);
    CHECK(back.levels[l].delta == plan.levels[l].delta);
    CHECK(back.levels[l].M == plan.levels[l].M);
    CHECK(back.levels[l].psi == plan.levels[l].psi);
    CHECK(back.levels[l].V == plan.levels[l].V);
  }
  CHECK(plan_to_json(back) == text);
  CHECK_THROWS_AS(plan_from_json(text, model_hash(gene_model())), std::invalid_argument);
  auto j = nlohmann::json::parse(text);
  j["schema_version"] = kSchemaVersion + 1;
  CHECK_THROWS_AS(plan_from_json(j.dump(), ""), std::invalid_argument);

  // Estimating from the reloaded plan reproduces the original run.
  const auto r1 = estimate(model, plan, reference_constants(), cfg);
  const auto r2 = estimate(model, back, reference_constants(), cfg);
  CHECK(r1.estimate == r2.estimate);
  const auto report = nlohmann::json::parse(report_to_json(r1));
  CHECK(report.at("estimate").get<double>() == r1.estimate);

  const std::string csv = plan_levels_csv(plan);
  CHECK(csv.rfind("level,dt,delta,M,psi,vhat,EI,N_TL,N_K1,N_K2,exit_fraction\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(plan.levels.size() + 1));
}
