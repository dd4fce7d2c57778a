// Command-line driver: machine calibration, hierarchy calibration, estimation, diagnostics.
#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "srn/artifacts.hpp"
#include "srn/errors.hpp"
#include "srn/exact.hpp"
#include "srn/mlmc.hpp"
#include "srn/model.hpp"
#include "srn/sampler.hpp"
#include "srn/workmodel.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kModel = 3, kCalibration = 4, kInfeasible = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model_path;
  std::string profile_path;
  std::string plan_path;
  std::string out_path;
  std::string csv_path;
  std::string out_dir = ".";
  bool reference_constants = false;
  bool verbose = false;
  bool simplex = false;
  int workers = 0;
  std::size_t repetitions = 100000;
  std::size_t sweep = 0;
  std::size_t repeats = 0;
  std::size_t paths = 200;
  srn::MlmcConfig cfg;
};

void add_mlmc_flags(CLI::App* app, Options& o) {
  app->add_option("--tol", o.cfg.tol, "relative tolerance, in (0, 1)");
  app->add_option("--seed", o.cfg.seed, "master seed");
  app->add_option("--confidence", o.cfg.confidence, "confidence constant C_A");
  app->add_option("--refine-factor", o.cfg.refine_factor, "mesh refinement factor between levels");
  app->add_option("--delta0", o.cfg.delta0, "initial one-step exit probability bound");
  app->add_option("--cv-target", o.cfg.cv_target, "coefficient-of-variation target of calibration batches");
  app->add_option("--threshold-c", o.cfg.threshold, "Gaussian-regime threshold of the variance estimator");
  app->add_option("--max-levels", o.cfg.max_levels, "cap on the number of levels");
  app->add_option("--profile", o.profile_path, "machine profile from calibrate-machine");
  app->add_flag("--reference-constants", o.reference_constants, "use built-in machine constants instead of a profile");
  app->add_flag("-v,--verbose", o.verbose, "progress on stderr");
}

void check_tol(const Options& o) {
  if (!(o.cfg.tol > 0.0 && o.cfg.tol < 1.0)) throw UsageError("--tol must lie in (0, 1)");
  if (o.cfg.refine_factor < 2) throw UsageError("--refine-factor must be at least 2");
  if (!(o.cfg.delta0 > 0.0 && o.cfg.delta0 < 1.0)) throw UsageError("--delta0 must lie in (0, 1)");
  if (!(o.cfg.cv_target > 0.0)) throw UsageError("--cv-target must be positive");
}

srn::MachineConstants machine_for(const Options& o, const srn::Model& model) {
  if (o.reference_constants) return srn::reference_constants();
  if (o.profile_path.empty())
    throw srn::CalibrationError(
        "no machine profile given; run `srn_mlmc calibrate-machine --model FILE --out profile.json` "
        "and pass --profile profile.json (or --reference-constants)");
  return srn::load_profile(o.profile_path, srn::model_hash(model));
}

srn::ProgressFn progress(const Options& o) {
  if (!o.verbose) return {};
  return [](const std::string& s) { std::cerr << s << '\n'; };
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text << '\n';
  else srn::write_file(path, text);
}

srn::LevelPlan plan_for(const Options& o, const srn::Model& model, const srn::MachineConstants& machine) {
  if (!o.plan_path.empty()) return srn::plan_from_json(srn::read_file(o.plan_path), srn::model_hash(model));
  return srn::calibrate(model, machine, o.cfg, progress(o));
}

int run_validate(const Options& o) {
  const auto model = srn::load_model(o.model_path);
  int errors = 0;
  for (const auto& m : srn::lint_model(model, o.simplex)) {
    std::cout << (m.error ? "error: " : "warning: ") << m.text << '\n';
    errors += m.error;
  }
  std::cout << model.name << ": " << model.net.species() << " species, " << model.net.reactions()
            << " reactions, hash " << srn::model_hash(model) << '\n';
  return errors ? kModel : kOk;
}

int run_calibrate_machine(const Options& o) {
  const auto model = srn::load_model(o.model_path);
  const auto m = srn::calibrate_machine(model, o.repetitions);
  if (o.out_path.empty()) throw UsageError("--out is required");
  srn::save_profile(m, o.out_path);
  std::cout << "C1=" << m.c1 << " C2=" << m.c2 << " C3=" << m.c3 << " C*=" << m.c_star << " K1=" << m.k1
            << " C_P(0)=" << m.cp(0.0) << " C_P(inf)=" << m.cp(1e300) << " R2=" << m.cp.r_squared
            << '\n';
  return kOk;
}

int run_calibrate(const Options& o) {
  check_tol(o);
  const auto model = srn::load_model(o.model_path);
  const auto machine = machine_for(o, model);
  const auto plan = srn::calibrate(model, machine, o.cfg, progress(o));
  emit(o.out_path, srn::plan_to_json(plan));
  if (!o.csv_path.empty()) srn::write_file(o.csv_path, srn::plan_levels_csv(plan));
  return kOk;
}

int run_estimate(const Options& o) {
  if (o.plan_path.empty()) check_tol(o);
  const auto model = srn::load_model(o.model_path);
  const auto machine = machine_for(o, model);
  const auto plan = plan_for(o, model, machine);
  const auto report = srn::estimate(model, plan, machine, o.cfg, progress(o));
  emit(o.out_path, srn::report_to_json(report));
  if (!o.csv_path.empty()) srn::write_file(o.csv_path, srn::report_levels_csv(report));
  return kOk;
}

// Per-path step-type counts for the fine leg of every level of a plan.
std::string step_counts_csv(const srn::Model& model, const srn::LevelPlan& plan, const srn::MachineConstants& machine,
                            const Options& o) {
  std::ostringstream os;
  os << "level,path,N_TL,N_K1,N_K2,fine_in\n";
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    srn::SampleRequest req;
    req.level = l;
    req.fine = {plan.levels[l].mesh, plan.levels[l].delta};
    if (l > 0) req.coarse = srn::LevelSpec{plan.levels[l - 1].mesh, plan.levels[l - 1].delta};
    req.seed = o.cfg.seed;
    req.purpose = 7;
    req.count = o.paths;
    req.duals = false;
    const auto batch = srn::sample_batch(model, req, machine);
    for (std::size_t i = 0; i < batch.size(); ++i)
      os << l << ',' << i << ',' << batch[i].fine_counts.tl << ',' << batch[i].fine_counts.k1 << ','
         << batch[i].fine_counts.k2 << ',' << batch[i].fine_in << '\n';
  }
  return os.str();
}

int run_diagnose(const Options& o) {
  const auto model = srn::load_model(o.model_path);
  const auto machine = machine_for(o, model);
  std::filesystem::create_directories(o.out_dir);
  const auto dir = std::filesystem::path(o.out_dir);
  if (o.plan_path.empty()) check_tol(o);
  const auto plan = plan_for(o, model, machine);
  srn::write_file((dir / "plan_levels.csv").string(), srn::plan_levels_csv(plan));
  srn::write_file((dir / "step_counts.csv").string(), step_counts_csv(model, plan, machine, o));

  if (o.repeats > 0) {
    std::ostringstream qq;
    qq << "run,seed,estimate,relative_error_budget\n";
    for (std::size_t r = 0; r < o.repeats; ++r) {
      auto cfg = o.cfg;
      cfg.seed = o.cfg.seed + 1000003 * (r + 1);
      const auto rep = srn::estimate(model, plan, machine, cfg);
      qq << r << ',' << cfg.seed << ',' << rep.estimate << ','
         << rep.exit_bound + rep.weak_error + rep.stat_half_width << '\n';
    }
    srn::write_file((dir / "qq.csv").string(), qq.str());
  }

  if (o.sweep > 0) {
    std::ostringstream sw;
    sw.precision(10);
    sw << "tol,L,predicted_work,actual_work,runtime_seconds,predicted_ssa_work,estimate\n";
    for (std::size_t k = 0; k < o.sweep; ++k) {
      auto cfg = o.cfg;
      cfg.tol = o.cfg.tol / std::pow(2.0, static_cast<double>(k));
      const auto p = srn::calibrate(model, machine, cfg, progress(o));
      const auto rep = srn::estimate(model, p, machine, cfg, progress(o));
      sw << cfg.tol << ',' << p.L() << ',' << p.work << ',' << rep.modeled_work << ',' << rep.runtime_seconds << ','
         << p.work_ssa << ',' << rep.estimate << '\n';
    }
    srn::write_file((dir / "sweep.csv").string(), sw.str());
  }
  std::cout << "diagnostics written to " << dir.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel hybrid Chernoff tau-leap estimator for stochastic reaction networks"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--workers", o.workers, "worker threads (0: OpenMP default)");

  auto* machine = app.add_subcommand("calibrate-machine", "measure the work-model constants");
  machine->add_option("--model", o.model_path, "model file")->required();
  machine->add_option("--out", o.out_path, "profile to write")->required();
  machine->add_option("--repetitions", o.repetitions, "timed repetitions per constant");

  auto* calibrate = app.add_subcommand("calibrate", "choose levels, deltas and sample sizes");
  calibrate->add_option("--model", o.model_path, "model file")->required();
  calibrate->add_option("--out", o.out_path, "plan JSON (default stdout)");
  calibrate->add_option("--csv", o.csv_path, "per-level CSV");
  add_mlmc_flags(calibrate, o);

  auto* estimate = app.add_subcommand("estimate", "run the multilevel estimator");
  estimate->add_option("--model", o.model_path, "model file")->required();
  estimate->add_option("--plan", o.plan_path, "plan from calibrate (calibrates first if omitted)");
  estimate->add_option("--out", o.out_path, "report JSON (default stdout)");
  estimate->add_option("--csv", o.csv_path, "per-level CSV");
  add_mlmc_flags(estimate, o);

  auto* diagnose = app.add_subcommand("diagnose", "step-type counts, repeated estimates, work sweeps");
  diagnose->add_option("--model", o.model_path, "model file")->required();
  diagnose->add_option("--plan", o.plan_path, "plan from calibrate");
  diagnose->add_option("--out-dir", o.out_dir, "directory for the CSV files");
  diagnose->add_option("--paths", o.paths, "paths per level for step counts");
  diagnose->add_option("--repeats", o.repeats, "independent estimates for QQ data");
  diagnose->add_option("--sweep", o.sweep, "number of tolerances TOL, TOL/2, ... in the work sweep");
  add_mlmc_flags(diagnose, o);

  auto* validate = app.add_subcommand("validate", "lint a model file");
  validate->add_option("model", o.model_path, "model file")->required();
  validate->add_flag("--simplex", o.simplex, "look for a conserved weighting w >= 0 with (w, nu_j) <= 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (o.workers > 0) srn::set_worker_count(o.workers);
    if (*machine) return run_calibrate_machine(o);
    if (*calibrate) return run_calibrate(o);
    if (*estimate) return run_estimate(o);
    if (*diagnose) return run_diagnose(o);
    if (*validate) return run_validate(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const srn::ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kModel;
  } catch (const srn::InfeasibleTolerance& e) {
    std::cerr << "infeasible tolerance: " << e.what() << '\n';
    return kInfeasible;
  } catch (const srn::CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << '\n';
    return kCalibration;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}
