#include "srn/artifacts.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace srn {

using nlohmann::json;

namespace {

json stats_json(const LevelStats& s) {
  return {{"samples", s.samples},         {"psi", s.psi},
          {"mean_g", s.mean_g},           {"var_g", s.var_g},
          {"mean_diff", s.mean_diff},     {"var_diff", s.var_diff},
          {"var_g_coarse", s.var_g_coarse}, {"vhat", s.vhat},
          {"weak_error", s.weak_error},   {"n_tl", s.n_tl},
          {"n_k1", s.n_k1},               {"n_k2", s.n_k2},
          {"ssa_steps", s.ssa_steps},     {"exit_fraction", s.exit_fraction},
          {"cv", s.cv}};
}

LevelStats stats_from(const json& j, std::size_t level, double delta) {
  LevelStats s;
  s.level = level;
  s.delta = delta;
  s.samples = j.at("samples").get<std::size_t>();
  s.psi = j.at("psi");
  s.mean_g = j.at("mean_g");
  s.var_g = j.at("var_g");
  s.mean_diff = j.at("mean_diff");
  s.var_diff = j.at("var_diff");
  s.var_g_coarse = j.at("var_g_coarse");
  s.vhat = j.at("vhat");
  s.weak_error = j.at("weak_error");
  s.n_tl = j.at("n_tl");
  s.n_k1 = j.at("n_k1");
  s.n_k2 = j.at("n_k2");
  s.ssa_steps = j.at("ssa_steps");
  s.exit_fraction = j.at("exit_fraction");
  s.cv = j.at("cv");
  return s;
}

double min_step(const Mesh& mesh) {
  double dt = mesh.back() - mesh.front();
  for (std::size_t i = 1; i < mesh.size(); ++i) dt = std::min(dt, mesh[i] - mesh[i - 1]);
  return dt;
}

// JSON cannot hold infinity.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string plan_to_json(const LevelPlan& plan) {
  json levels = json::array();
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    const auto& p = plan.levels[l];
    levels.push_back({{"level", l},
                      {"mesh", p.mesh},
                      {"delta", p.delta},
                      {"M", p.M},
                      {"psi", p.psi},
                      {"V", p.V},
                      {"stats", stats_json(p.stats)}});
  }
  json work = json::array();
  for (double w : plan.work_by_depth) work.push_back(finite_or_null(w));
  json j = {{"schema_version", kSchemaVersion},
            {"kind", "level_plan"},
            {"seed", plan.seed},
            {"model_hash", plan.model_hash},
            {"L", plan.L()},
            {"tol", plan.tol},
            {"confidence", plan.confidence},
            {"refine_factor", plan.refine_factor},
            {"threshold", plan.threshold},
            {"scale", plan.scale},
            {"weak_error", plan.weak_error},
            {"exit_bound", plan.exit_bound},
            {"stat_error", plan.stat_error},
            {"theta", plan.theta},
            {"work", plan.work},
            {"work_ssa", plan.work_ssa},
            {"work_by_depth", work},
            {"levels", levels}};
  return j.dump(2);
}

LevelPlan plan_from_json(const std::string& text, const std::string& expected_model_hash) {
  const json j = json::parse(text);
  if (j.value("schema_version", 0) != kSchemaVersion || j.value("kind", "") != "level_plan")
    throw std::invalid_argument("not a level plan with schema_version " + std::to_string(kSchemaVersion));
  LevelPlan plan;
  plan.model_hash = j.at("model_hash").get<std::string>();
  if (!expected_model_hash.empty() && plan.model_hash != expected_model_hash)
    throw std::invalid_argument("plan was calibrated for model " + plan.model_hash + ", not " + expected_model_hash);
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.tol = j.at("tol");
  plan.confidence = j.at("confidence");
  plan.refine_factor = j.at("refine_factor").get<std::size_t>();
  plan.threshold = j.at("threshold");
  plan.scale = j.at("scale");
  plan.weak_error = j.at("weak_error");
  plan.exit_bound = j.at("exit_bound");
  plan.stat_error = j.at("stat_error");
  plan.theta = j.at("theta");
  plan.work = j.at("work");
  plan.work_ssa = j.at("work_ssa");
  for (const auto& w : j.at("work_by_depth"))
    plan.work_by_depth.push_back(w.is_null() ? std::numeric_limits<double>::infinity() : w.get<double>());
  for (const auto& l : j.at("levels")) {
    PlannedLevel p;
    p.mesh = l.at("mesh").get<Mesh>();
    p.delta = l.at("delta");
    p.M = l.at("M").get<std::size_t>();
    p.psi = l.at("psi");
    p.V = l.at("V");
    p.stats = stats_from(l.at("stats"), plan.levels.size(), p.delta);
    plan.levels.push_back(std::move(p));
  }
  if (plan.levels.empty()) throw std::invalid_argument("plan has no levels");
  return plan;
}

std::string report_to_json(const EstimateReport& r) {
  json levels = json::array();
  for (const auto& o : r.levels)
    levels.push_back({{"level", o.level},
                      {"M", o.M},
                      {"mean_diff", o.mean_diff},
                      {"var_diff", o.var_diff},
                      {"psi", o.psi},
                      {"vhat", o.vhat},
                      {"n_tl", o.n_tl},
                      {"n_k1", o.n_k1},
                      {"n_k2", o.n_k2},
                      {"exit_fraction", o.exit_fraction}});
  const double abs_scale = std::abs(r.estimate);
  json j = {{"schema_version", kSchemaVersion},
            {"kind", "estimate_report"},
            {"seed", r.seed},
            {"model_hash", r.model_hash},
            {"estimate", r.estimate},
            {"tol", r.tol},
            {"error_budget",
             {{"relative",
               {{"exit_bound", r.exit_bound},
                {"weak_error", r.weak_error},
                {"stat_half_width", r.stat_half_width},
                {"total", r.exit_bound + r.weak_error + r.stat_half_width}}},
              {"absolute",
               {{"exit_bound", r.exit_bound * abs_scale},
                {"weak_error", r.weak_error * r.scale},
                {"stat_half_width", r.stat_half_width * r.scale}}}}},
            {"runtime_seconds", r.runtime_seconds},
            {"modeled_work_seconds", r.modeled_work},
            {"rounds", r.rounds},
            {"extended", r.extended},
            {"levels", levels}};
  return j.dump(2);
}

std::string plan_levels_csv(const LevelPlan& plan) {
  std::ostringstream os;
  os.precision(10);
  os << "level,dt,delta,M,psi,vhat,EI,N_TL,N_K1,N_K2,exit_fraction\n";
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    const auto& p = plan.levels[l];
    os << l << ',' << min_step(p.mesh) << ',' << p.delta << ',' << p.M << ',' << p.psi << ',' << p.V << ','
       << p.stats.weak_error << ',' << p.stats.n_tl << ',' << p.stats.n_k1 << ',' << p.stats.n_k2 << ','
       << p.stats.exit_fraction << '\n';
  }
  return os.str();
}

std::string report_levels_csv(const EstimateReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "level,M,mean_diff,var_diff,psi,vhat,N_TL,N_K1,N_K2,exit_fraction\n";
  for (const auto& o : r.levels)
    os << o.level << ',' << o.M << ',' << o.mean_diff << ',' << o.var_diff << ',' << o.psi << ',' << o.vhat << ','
       << o.n_tl << ',' << o.n_k1 << ',' << o.n_k2 << ',' << o.exit_fraction << '\n';
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace srn
