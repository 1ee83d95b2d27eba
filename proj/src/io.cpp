#include "dictphase/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <string>

#include "dictphase/errors.hpp"
#include "dictphase/rng.hpp"

namespace dictphase {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw DomainError(std::string(what) + " must be a JSON object");
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw DomainError(std::string(what) + ": unknown field '" + item.key() + "'");
}

Json matrix_data(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return data;
}

Json matrix_data(const Eigen::MatrixXcd& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  return data;
}

Eigen::MatrixXd real_data(const Json& data, int rows, int cols) {
  if (!data.is_array() || data.size() != static_cast<std::size_t>(rows) * cols)
    throw ShapeError("matrix data length does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = data.at(static_cast<std::size_t>(i) * cols + j).get<double>();
  return m;
}

Eigen::MatrixXcd complex_data(const Json& data, int rows, int cols) {
  if (!data.is_array() || data.size() != static_cast<std::size_t>(rows) * cols)
    throw ShapeError("matrix data length does not match its shape");
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const Json& e = data.at(static_cast<std::size_t>(i) * cols + j);
      if (!e.is_array() || e.size() != 2) throw ShapeError("complex entries must be [re, im]");
      m(i, j) = {e[0].get<double>(), e[1].get<double>()};
    }
  return m;
}

Json indices(const std::vector<int>& v) { return Json(v); }

}  // namespace

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw ShapeError("expected a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Json frame_to_json(const Frame& frame) {
  Json j;
  j["n"] = frame.rows();
  j["N"] = frame.cols();
  j["field"] = frame.is_real() ? "real" : "complex";
  j["data"] = frame.is_real() ? matrix_data(frame.real_matrix()) : matrix_data(frame.complex_matrix());
  j["tight"] = frame.tight();
  return j;
}

Frame frame_from_json(const Json& j) {
  reject_unknown(j, {"n", "N", "field", "data", "tight"}, "frame");
  const int n = j.at("n").get<int>();
  const int big_n = j.at("N").get<int>();
  const std::string field = j.value("field", "real");
  const bool tight = j.value("tight", false);
  if (field == "real") return Frame(real_data(j.at("data"), n, big_n), tight);
  if (field == "complex") return Frame(complex_data(j.at("data"), n, big_n), tight);
  throw DomainError("frame field must be 'real' or 'complex'");
}

Json ensemble_to_json(const MeasurementEnsemble& a) {
  Json j;
  j["n"] = a.rows();
  j["N"] = a.cols();
  j["field"] = "real";
  j["data"] = matrix_data(a.matrix());
  j["tight"] = false;
  j["seed"] = a.seed();
  return j;
}

MeasurementEnsemble ensemble_from_json(const Json& j) {
  reject_unknown(j, {"n", "N", "field", "data", "tight", "seed"}, "ensemble");
  if (j.value("field", "real") != "real") throw DomainError("ensembles must be real");
  return MeasurementEnsemble(real_data(j.at("data"), j.at("n").get<int>(), j.at("N").get<int>()),
                             j.value("seed", std::uint64_t{0}));
}

Json observation_to_json(const PhaselessObservation& obs) {
  Json j;
  j["b"] = vector_to_json(obs.magnitudes);
  j["eps"] = obs.noise_budget;
  j["seed"] = obs.seed;
  j["generator_version"] = obs.generator_version;
  if (obs.truth) j["truth"] = vector_to_json(*obs.truth);
  return j;
}

PhaselessObservation observation_from_json(const Json& j) {
  reject_unknown(j, {"b", "eps", "seed", "generator_version", "truth"}, "observation");
  PhaselessObservation obs;
  obs.magnitudes = vector_from_json(j.at("b"));
  obs.noise_budget = j.value("eps", 0.0);
  obs.seed = j.value("seed", std::uint64_t{0});
  obs.generator_version = j.value("generator_version", std::string(kGeneratorVersion));
  if (j.contains("truth")) obs.truth = vector_from_json(j.at("truth"));
  obs.validate();
  return obs;
}

Json recovery_to_json(const RecoveryResult& r) {
  Json j;
  j["estimate"] = vector_to_json(r.estimate);
  j["objective"] = r.objective;
  j["residual"] = r.residual;
  j["inner_iters"] = r.inner_iters;
  j["outer_iters"] = r.outer_iters;
  j["converged"] = r.converged;
  j["kkt_residual"] = std::isnan(r.kkt_residual) ? Json(nullptr) : Json(r.kkt_residual);
  return j;
}

Json oracle_to_json(const OracleResult& r) {
  Json j;
  j["best"] = recovery_to_json(r.best);
  j["minimizers"] = Json::array();
  for (const auto& x : r.minimizers) j["minimizers"].push_back(vector_to_json(x));
  j["unique_mod_sign"] = r.unique_mod_sign();
  j["patterns_checked"] = r.patterns_checked;
  j["feasible_patterns"] = r.feasible_patterns;
  j["method"] = r.method;
  return j;
}

Json solver_config_to_json(const SolverConfig& c) {
  return Json{{"admm_step", c.admm_step},
              {"primal_tol", c.primal_tol},
              {"dual_tol", c.dual_tol},
              {"max_inner_iters", c.max_inner_iters},
              {"max_outer_iters", c.max_outer_iters},
              {"restarts", c.restarts},
              {"seed", c.seed},
              {"residual_target_slack", c.residual_target_slack},
              {"flow_iters", c.flow_iters},
              {"flow_step", c.flow_step},
              {"flow_weight", c.flow_weight}};
}

SolverConfig solver_config_from_json(const Json& j) {
  reject_unknown(j,
                 {"admm_step", "primal_tol", "dual_tol", "max_inner_iters", "max_outer_iters", "restarts",
                  "seed", "residual_target_slack", "flow_iters", "flow_step", "flow_weight"},
                 "solver");
  SolverConfig c;
  c.admm_step = j.value("admm_step", c.admm_step);
  c.primal_tol = j.value("primal_tol", c.primal_tol);
  c.dual_tol = j.value("dual_tol", c.dual_tol);
  c.max_inner_iters = j.value("max_inner_iters", c.max_inner_iters);
  c.max_outer_iters = j.value("max_outer_iters", c.max_outer_iters);
  c.restarts = j.value("restarts", c.restarts);
  c.seed = j.value("seed", c.seed);
  c.residual_target_slack = j.value("residual_target_slack", c.residual_target_slack);
  c.flow_iters = j.value("flow_iters", c.flow_iters);
  c.flow_step = j.value("flow_step", c.flow_step);
  c.flow_weight = j.value("flow_weight", c.flow_weight);
  c.validate();
  return c;
}

Json experiment_config_to_json(const ExperimentConfig& c) {
  return Json{{"n", c.n},
              {"N", c.big_n},
              {"k", c.k},
              {"m_grid", c.m_grid},
              {"eps_grid", c.eps_grid},
              {"trials", c.trials},
              {"seed", c.seed},
              {"success_threshold", c.success_threshold},
              {"frame_kind", to_string(c.frame_kind)},
              {"solver", solver_config_to_json(c.solver)},
              {"audit", Json{{"enabled", c.audit.enabled}, {"t", c.audit.t}}}};
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  reject_unknown(j,
                 {"n", "N", "k", "m_grid", "eps_grid", "trials", "seed", "success_threshold", "frame_kind",
                  "solver", "audit"},
                 "config");
  ExperimentConfig c;
  c.n = j.at("n").get<int>();
  c.big_n = j.value("N", c.n);
  c.k = j.at("k").get<int>();
  c.m_grid = j.at("m_grid").get<std::vector<int>>();
  c.eps_grid = j.value("eps_grid", std::vector<double>{0.0});
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.success_threshold = j.value("success_threshold", c.success_threshold);
  c.frame_kind = frame_kind_from_string(j.value("frame_kind", std::string("random-tight")));
  if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"));
  if (j.contains("audit")) {
    const Json& a = j.at("audit");
    reject_unknown(a, {"enabled", "t"}, "audit");
    c.audit.enabled = a.value("enabled", c.audit.enabled);
    c.audit.t = a.value("t", c.audit.t);
  }
  c.validate();
  return c;
}

Json drip_to_json(const DripReport& r) {
  return Json{{"order", r.order},
              {"delta", r.delta},
              {"lambda_min", r.lambda_min},
              {"lambda_max", r.lambda_max},
              {"method", r.method == DripMethod::kExact ? "exact" : "montecarlo-lower-bound"},
              {"supports_checked", r.supports_checked},
              {"argmax_support", indices(r.argmax_support)}};
}

Json sdrip_to_json(const SdripReport& r) {
  const char* method = r.method == SdripMethod::kExact        ? "exact"
                       : r.method == SdripMethod::kMonteCarlo ? "montecarlo"
                                                              : "inconclusive";
  Json j{{"order", r.order},
         {"theta_minus", std::isnan(r.theta_minus) ? Json(nullptr) : Json(r.theta_minus)},
         {"theta_plus", std::isnan(r.theta_plus) ? Json(nullptr) : Json(r.theta_plus)},
         {"satisfied", r.satisfied},
         {"method", method},
         {"subsets_checked", r.subsets_checked},
         {"extreme_subset", indices(r.extreme_subset)},
         {"extreme_support", indices(r.extreme_support)}};
  j["witness_subset"] = r.witness_subset ? indices(*r.witness_subset) : Json(nullptr);
  return j;
}

Json nsp_to_json(const NspVerdict& v) {
  Json j{{"status", to_string(v.status)},
         {"trials", v.trials},
         {"pairs_total", v.pairs_total},
         {"pairs_decided", v.pairs_decided}};
  if (v.witness) {
    const auto& w = *v.witness;
    j["witness"] = Json{{"T", indices(w.t)},
                        {"u", vector_to_json(w.u)},
                        {"v", vector_to_json(w.v)},
                        {"support", indices(w.support)},
                        {"gap", w.gap},
                        {"source", w.source},
                        {"oracle_confirmed", w.oracle_confirmed ? Json(*w.oracle_confirmed) : Json(nullptr)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json constants_to_json(const StabilityConstants& c) {
  return Json{{"t", c.t}, {"delta", c.delta}, {"c1", c.c1}, {"c2", c.c2}};
}

Json audit_to_json(const AuditReport& r) {
  return Json{{"t", r.t},
              {"total", r.total},
              {"oracle_confirmed", r.oracle_confirmed},
              {"excluded", r.excluded},
              {"covered", r.covered},
              {"not_covered", r.not_covered},
              {"violations", r.violations}};
}

Json summary_to_json(const std::vector<CellSummary>& cells) {
  Json out = Json::array();
  for (const auto& c : cells)
    out.push_back(Json{{"m", c.m},
                       {"eps", c.eps},
                       {"trials", c.trials},
                       {"successes", c.successes},
                       {"converged", c.converged},
                       {"success_rate", c.success_rate},
                       {"median_error", c.median_error}});
  return out;
}

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records, const AuditReport* audit) {
  os << "n,N,k,m,eps,trial,solver_seed,x0_norm,sigma_k,error,objective,objective_truth,residual,"
        "converged,success,inner_iters,outer_iters,bound,audit_status\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    os << r.n << ',' << r.big_n << ',' << r.k << ',' << r.m << ',' << fmt17(r.eps) << ',' << r.trial << ','
       << r.solver_seed << ',' << fmt17(r.x0_norm) << ',' << fmt17(r.sigma_k) << ',' << fmt17(r.error) << ','
       << fmt17(r.objective) << ',' << fmt17(r.objective_truth) << ',' << fmt17(r.residual) << ','
       << (r.converged ? 1 : 0) << ',' << (r.success ? 1 : 0) << ',' << r.inner_iters << ',' << r.outer_iters
       << ',';
    if (audit && i < audit->entries.size()) {
      const auto& e = audit->entries[i];
      if (e.status == AuditStatus::kCovered || e.status == AuditStatus::kViolation) os << fmt17(e.bound);
      os << ',' << to_string(e.status);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

void write_timings_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "m,eps,trial,runtime_seconds\n";
  for (const auto& r : records)
    os << r.m << ',' << fmt17(r.eps) << ',' << r.trial << ',' << fmt17(r.runtime_seconds) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DomainError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dictphase
