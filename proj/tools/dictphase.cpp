#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dictphase/certify.hpp"
#include "dictphase/errors.hpp"
#include "dictphase/harness.hpp"
#include "dictphase/io.hpp"
#include "dictphase/nsp.hpp"
#include "dictphase/rng.hpp"
#include "dictphase/selftest.hpp"
#include "dictphase/solver.hpp"

namespace fs = std::filesystem;
using namespace dictphase;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kViolation = 2;

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

void add_common(CLI::App* app, Common& c, bool with_jobs) {
  app->add_option("--config", c.config, "JSON configuration file");
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "seed override");
  if (with_jobs) app->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

int cmd_gen(const Common& c, int trial) {
  if (c.config.empty()) throw DomainError("gen requires --config");
  ExperimentConfig cfg = experiment_config_from_json(read_json_file(c.config));
  if (c.seed) cfg.seed = *c.seed;
  const TrialInstance inst = make_trial_instance(cfg, trial, 0, 0);
  const fs::path out = prepare_out(c.out);
  write_json_file(out / "frame.json", frame_to_json(inst.frame));
  write_json_file(out / "ensemble.json", ensemble_to_json(inst.a));
  write_json_file(out / "observation.json", observation_to_json(inst.obs));
  std::printf("wrote frame.json, ensemble.json, observation.json to %s\n", out.string().c_str());
  return kOk;
}

int cmd_recover(const Common& c, const std::string& frame_path, const std::string& ens_path,
                const std::string& obs_path, bool with_oracle) {
  const Frame frame = frame_from_json(read_json_file(frame_path));
  const MeasurementEnsemble a = ensemble_from_json(read_json_file(ens_path));
  const PhaselessObservation obs = observation_from_json(read_json_file(obs_path));
  SolverConfig sc;
  if (!c.config.empty()) sc = solver_config_from_json(read_json_file(c.config));
  if (c.seed) sc.seed = *c.seed;
  const RecoveryResult res = pr_l1_analysis(a, obs, frame, sc);
  Json report{{"recovery", recovery_to_json(res)}};
  if (obs.truth) report["error"] = distance_mod_sign(res.estimate, *obs.truth);
  int code = kOk;
  if (with_oracle) {
    if (obs.noise_budget != 0.0) throw DomainError("--oracle requires a noiseless observation");
    const OracleResult o = oracle_sign_enumeration(a, obs.magnitudes, frame);
    report["oracle"] = oracle_to_json(o);
    const double gap = res.objective - o.best.objective;
    report["objective_gap"] = gap;
    if (res.converged && gap < -1e-6 * std::max(1.0, o.best.objective)) code = kViolation;
  }
  const fs::path out = prepare_out(c.out);
  write_json_file(out / "recovery.json", report);
  std::printf("objective %.12g residual %.3g converged %d\n", res.objective, res.residual, res.converged);
  return code;
}

int cmd_certify(const Common& c, const std::string& frame_path, const std::string& ens_path, int drip_k,
                int sdrip_k, int nsp_k, std::uint64_t budget, int montecarlo) {
  const Frame frame = frame_from_json(read_json_file(frame_path));
  const MeasurementEnsemble a = ensemble_from_json(read_json_file(ens_path));
  const std::uint64_t seed = c.seed.value_or(0);
  Json report{{"budget", budget}, {"seed", seed}};
  int code = kOk;
  if (drip_k >= 0) report["drip"] = drip_to_json(drip_exact(a, frame, drip_k, budget));
  if (sdrip_k >= 0) {
    try {
      report["sdrip"] = sdrip_to_json(sdrip_exact(a, frame, sdrip_k, budget));
    } catch (const BudgetError&) {
      report["sdrip"] = sdrip_to_json(sdrip_montecarlo(a, frame, sdrip_k, montecarlo, seed));
    }
  }
  if (nsp_k >= 0) {
    const NspVerdict v = nsp_real_check(a, frame, nsp_k, budget, seed);
    report["nsp"] = nsp_to_json(v);
    if (v.witness && v.witness->oracle_confirmed && !*v.witness->oracle_confirmed) code = kViolation;
  }
  const fs::path out = prepare_out(c.out);
  write_json_file(out / "certify.json", report);
  std::cout << report.dump(2) << '\n';
  return code;
}

int cmd_sweep(const Common& c) {
  if (c.config.empty()) throw DomainError("sweep requires --config");
  ExperimentConfig cfg = experiment_config_from_json(read_json_file(c.config));
  if (c.seed) cfg.seed = *c.seed;
  const SweepResult res = run_sweep(cfg, c.jobs);
  std::optional<AuditReport> audit;
  if (cfg.audit.enabled) audit = audit_bound(cfg, res.records);

  const fs::path out = prepare_out(c.out);
  {
    std::ofstream f(out / "records.csv");
    write_records_csv(f, res.records, audit ? &*audit : nullptr);
  }
  {
    std::ofstream f(out / "timings.csv");
    write_timings_csv(f, res.records);
  }
  Json summary{{"cells", summary_to_json(res.cells)}, {"generator_version", std::string(kGeneratorVersion)}};
  if (audit) summary["audit"] = audit_to_json(*audit);
  write_json_file(out / "summary.json", summary);
  write_json_file(out / "config-echo.json", experiment_config_to_json(cfg));

  for (const auto& cell : res.cells)
    std::printf("m=%d eps=%g success=%d/%d median_error=%.3g\n", cell.m, cell.eps, cell.successes, cell.trials,
                cell.median_error);
  if (audit) {
    std::printf("audit: covered=%d excluded=%d not_covered=%d violations=%d\n", audit->covered, audit->excluded,
                audit->not_covered, audit->violations);
    if (audit->violations > 0) return kViolation;
  }
  return kOk;
}

int cmd_selftest(const Common& c, SelftestOptions opts) {
  if (c.seed) opts.seed = *c.seed;
  const SelftestReport rep = run_selftest(opts);
  const fs::path out = prepare_out(c.out);
  write_json_file(out / "selftest.json", rep.details);
  std::printf("polytope failures %d, power-sum failures %d, lemma failures %d (refused %d)\n",
              rep.polytope_failures, rep.power_sum_failures, rep.lemma_failures, rep.lemma_refused);
  return rep.passed() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phaseless l1-analysis recovery, certificates and experiments"};
  app.require_subcommand(1);

  Common gen_c, rec_c, cert_c, sweep_c, self_c;
  int gen_trial = 0;
  auto* gen = app.add_subcommand("gen", "draw one trial instance (first grid cell) from a config");
  add_common(gen, gen_c, false);
  gen->add_option("--trial", gen_trial, "trial index")->check(CLI::NonNegativeNumber);

  std::string frame_path, ens_path, obs_path;
  bool with_oracle = false;
  auto* rec = app.add_subcommand("recover", "run the l1-analysis phase retrieval solver");
  add_common(rec, rec_c, false);
  rec->add_option("--frame", frame_path, "frame JSON")->required();
  rec->add_option("--ensemble", ens_path, "measurement ensemble JSON")->required();
  rec->add_option("--observation", obs_path, "observation JSON")->required();
  rec->add_flag("--oracle", with_oracle, "compare against exact sign enumeration");

  std::string cert_frame, cert_ens;
  int drip_k = -1, sdrip_k = -1, nsp_k = -1, montecarlo = 10000;
  std::uint64_t budget = kDefaultBudget;
  auto* cert = app.add_subcommand("certify", "DRIP, S-DRIP and null space property certificates");
  add_common(cert, cert_c, false);
  cert->add_option("--frame", cert_frame, "frame JSON")->required();
  cert->add_option("--ensemble", cert_ens, "measurement ensemble JSON")->required();
  cert->add_option("--drip", drip_k, "DRIP order");
  cert->add_option("--sdrip", sdrip_k, "S-DRIP order");
  cert->add_option("--nsp", nsp_k, "null space property sparsity");
  cert->add_option("--budget", budget, "enumeration budget")->capture_default_str();
  cert->add_option("--montecarlo", montecarlo, "S-DRIP samples when enumeration exceeds the budget")
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
  add_common(sweep, sweep_c, true);

  SelftestOptions st;
  auto* self = app.add_subcommand("selftest", "randomized checks of the polytope, power-sum and stability lemmas");
  add_common(self, self_c, false);
  self->add_option("--polytope-trials", st.polytope_trials)->capture_default_str();
  self->add_option("--power-sum-trials", st.power_sum_trials)->capture_default_str();
  self->add_option("--lemma-trials", st.lemma_trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_c, gen_trial);
    if (*rec) return cmd_recover(rec_c, frame_path, ens_path, obs_path, with_oracle);
    if (*cert) {
      if (drip_k < 0 && sdrip_k < 0 && nsp_k < 0) throw DomainError("certify needs --drip, --sdrip or --nsp");
      return cmd_certify(cert_c, cert_frame, cert_ens, drip_k, sdrip_k, nsp_k, budget, montecarlo);
    }
    if (*sweep) return cmd_sweep(sweep_c);
    if (*self) return cmd_selftest(self_c, st);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
