#include "dictphase/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "dictphase/certify.hpp"
#include "dictphase/errors.hpp"
#include "dictphase/lemmas.hpp"
#include "dictphase/linalg.hpp"
#include "dictphase/rng.hpp"

namespace dictphase {

std::string to_string(FrameKind kind) {
  return kind == FrameKind::kIdentity ? "identity" : "random-tight";
}

FrameKind frame_kind_from_string(const std::string& s) {
  if (s == "identity") return FrameKind::kIdentity;
  if (s == "random-tight") return FrameKind::kRandomTight;
  throw DomainError("unknown frame_kind '" + s + "'");
}

std::string to_string(AuditStatus s) {
  switch (s) {
    case AuditStatus::kCovered:
      return "covered";
    case AuditStatus::kExcluded:
      return "excluded";
    case AuditStatus::kNotCovered:
      return "not-covered";
    case AuditStatus::kViolation:
      return "violation";
  }
  return "excluded";
}

void ExperimentConfig::validate() const {
  if (n < 1) throw DomainError("n must be >= 1");
  if (big_n < n) throw DomainError("N must be >= n");
  if (frame_kind == FrameKind::kIdentity && big_n != n) throw DomainError("identity frame needs N == n");
  if (k < 0 || k > big_n) throw DomainError("k must lie in [0, N]");
  if (m_grid.empty() || eps_grid.empty()) throw DomainError("grids must be nonempty");
  for (int m : m_grid)
    if (m < 1) throw DomainError("m_grid entries must be >= 1");
  for (double e : eps_grid)
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError("eps_grid entries must be finite and >= 0");
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (!(success_threshold > 0.0)) throw DomainError("success_threshold must be positive");
  if (audit.enabled && !(audit.t > 1.0)) throw DomainError("audit.t must exceed 1");
  solver.validate();
}

TrialInstance make_trial_instance(const ExperimentConfig& cfg, int trial_index, int m_index,
                                  int eps_index) {
  if (m_index < 0 || m_index >= static_cast<int>(cfg.m_grid.size()) || eps_index < 0 ||
      eps_index >= static_cast<int>(cfg.eps_grid.size()) || trial_index < 0)
    throw ShapeError("trial indices out of range");
  const auto trial = static_cast<std::uint64_t>(trial_index);
  const int m = cfg.m_grid[m_index];
  const double eps = cfg.eps_grid[eps_index];
  auto tag = [](Stream s) { return static_cast<std::uint64_t>(s); };

  Frame frame = cfg.frame_kind == FrameKind::kIdentity
                    ? make_identity_frame(cfg.n)
                    : make_random_tight_frame(cfg.n, cfg.big_n,
                                              derive_seed(cfg.seed, {tag(Stream::kFrame), trial}));
  RandomStream sig(derive_seed(cfg.seed, {tag(Stream::kSignal), trial}), Stream::kSignal);
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(cfg.big_n);
  for (int i : sig.subset(cfg.big_n, cfg.k)) z0(i) = sig.normal();
  Eigen::VectorXd x0 = synthesize(frame, z0);

  const std::uint64_t ens_seed = derive_seed(cfg.seed, {tag(Stream::kEnsemble), trial});
  MeasurementEnsemble a = gaussian_ensemble(m, cfg.n, ens_seed).scaled(1.0 / std::sqrt(m));
  const std::uint64_t noise_seed = derive_seed(
      cfg.seed, {tag(Stream::kNoise), trial, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(eps_index)});
  PhaselessObservation obs = add_bounded_noise(phaseless_forward(a, x0), eps, noise_seed);
  obs.truth = x0;
  const std::uint64_t solver_seed = derive_seed(
      cfg.seed, {tag(Stream::kRestart), trial, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(eps_index)});
  return TrialInstance{std::move(frame), std::move(z0), std::move(x0), std::move(a), std::move(obs), solver_seed};
}

TrialRecord run_trial(const ExperimentConfig& cfg, int trial_index, int m_index, int eps_index) {
  const auto start = std::chrono::steady_clock::now();
  const TrialInstance inst = make_trial_instance(cfg, trial_index, m_index, eps_index);
  TrialRecord r;
  r.n = cfg.n;
  r.big_n = cfg.big_n;
  r.k = cfg.k;
  r.m = cfg.m_grid[m_index];
  r.eps = cfg.eps_grid[eps_index];
  r.m_index = m_index;
  r.eps_index = eps_index;
  r.trial = trial_index;
  r.solver_seed = inst.solver_seed;
  r.x0_norm = inst.x0.norm();
  const Eigen::VectorXd ax0 = analyze(inst.frame, inst.x0);
  r.objective_truth = ax0.lpNorm<1>();
  r.sigma_k = best_k_term_error(ax0, cfg.k);

  SolverConfig sc = cfg.solver;
  sc.seed = inst.solver_seed;
  try {
    const RecoveryResult res = pr_l1_analysis(inst.a, inst.obs, inst.frame, sc);
    r.x_hat = res.estimate;
    r.error = distance_mod_sign(res.estimate, inst.x0);
    r.objective = res.objective;
    r.residual = res.residual;
    r.converged = res.converged;
    r.inner_iters = res.inner_iters;
    r.outer_iters = res.outer_iters;
    r.success = r.error <= cfg.success_threshold * r.x0_norm;
  } catch (const Error& e) {
    r.failure = e.what();
    r.x_hat = Eigen::VectorXd::Zero(cfg.n);
    r.error = r.x0_norm;
    r.objective = 0.0;
    r.residual = inst.obs.magnitudes.norm();
  }
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CellSummary> summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  std::vector<CellSummary> cells;
  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi)
    for (std::size_t ei = 0; ei < cfg.eps_grid.size(); ++ei) {
      CellSummary c;
      c.m = cfg.m_grid[mi];
      c.eps = cfg.eps_grid[ei];
      std::vector<double> errors;
      for (const auto& r : records) {
        if (r.m_index != static_cast<int>(mi) || r.eps_index != static_cast<int>(ei)) continue;
        ++c.trials;
        c.successes += r.success ? 1 : 0;
        c.converged += r.converged ? 1 : 0;
        errors.push_back(r.error);
      }
      if (c.trials > 0) {
        c.success_rate = static_cast<double>(c.successes) / c.trials;
        std::sort(errors.begin(), errors.end());
        const std::size_t h = errors.size() / 2;
        c.median_error = errors.size() % 2 ? errors[h] : 0.5 * (errors[h - 1] + errors[h]);
      }
      cells.push_back(c);
    }
  return cells;
}

SweepResult run_sweep(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  const int nm = static_cast<int>(cfg.m_grid.size());
  const int ne = static_cast<int>(cfg.eps_grid.size());
  const std::size_t total = static_cast<std::size_t>(nm) * ne * cfg.trials;
  SweepResult out;
  out.records.resize(total);
  auto job = [&](std::size_t idx) {
    const int trial = static_cast<int>(idx % cfg.trials);
    const int ei = static_cast<int>((idx / cfg.trials) % ne);
    const int mi = static_cast<int>(idx / (static_cast<std::size_t>(cfg.trials) * ne));
    out.records[idx] = run_trial(cfg, trial, mi, ei);
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < total; ++i) job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) job(i);
      });
    for (auto& th : pool) th.join();
  }
  out.cells = summarize(cfg, out.records);
  return out;
}

namespace {

bool oracle_confirmed(const TrialInstance& inst, const TrialRecord& r) {
  const double obj0 = r.objective_truth;
  if (r.eps == 0.0) {
    const OracleResult o = oracle_sign_enumeration(inst.a, inst.obs.magnitudes, inst.frame);
    const double tol = 1e-6 * std::max(1.0, o.best.objective);
    return r.residual <= 1e-6 * std::max(1.0, inst.obs.magnitudes.norm()) &&
           std::abs(r.objective - o.best.objective) <= tol;
  }
  // Noisy records: the lemma needs feasibility and ||D^T x^||_1 <= ||D^T x0||_1,
  // both of which a global minimizer satisfies.
  const double feas = inst.obs.noise_budget + 1e-8 * std::max(1.0, inst.obs.magnitudes.norm());
  return r.residual <= feas && r.objective <= obj0 + 1e-9 * std::max(1.0, obj0);
}

AuditEntry audit_one(const ExperimentConfig& cfg, const TrialRecord& r) {
  AuditEntry e;
  e.error = r.error;
  if (!r.failure.empty() || r.x_hat.size() != cfg.n) {
    e.reason = "solver failure";
    return e;
  }
  const TrialInstance inst = make_trial_instance(cfg, r.trial, r.m_index, r.eps_index);
  bool confirmed = false;
  try {
    confirmed = oracle_confirmed(inst, r);
  } catch (const Error& ex) {
    e.reason = std::string("oracle unavailable: ") + ex.what();
    return e;
  }
  if (!confirmed) {
    e.reason = "not oracle-confirmed";
    return e;
  }
  if (cfg.k < 1) {
    e.status = r.error == 0.0 ? AuditStatus::kCovered : AuditStatus::kViolation;
    return e;
  }

  const Eigen::MatrixXd& am = inst.a.matrix();
  const Eigen::VectorXd ax0 = am * inst.x0;
  const Eigen::VectorXd axh = am * r.x_hat;
  std::vector<int> agree, disagree;
  for (int j = 0; j < am.rows(); ++j) ((ax0(j) < 0.0) == (axh(j) < 0.0) ? agree : disagree).push_back(j);
  const bool flip = disagree.size() > agree.size();
  const std::vector<int>& t = flip ? disagree : agree;
  const Eigen::VectorXd xh = flip ? Eigen::VectorXd(-r.x_hat) : r.x_hat;
  e.t_size = static_cast<int>(t.size());
  const MeasurementEnsemble at = row_restrict(inst.a, t);
  e.eps_t = (at.matrix() * (xh - inst.x0)).norm();
  e.rho = std::max(0.0, r.objective - r.objective_truth);

  const int order = static_cast<int>(std::ceil(cfg.audit.t * cfg.k - 1e-12));
  const DripReport dr = drip_exact(at, inst.frame, std::min(order, inst.frame.cols()));
  const double lsum = dr.lambda_min + dr.lambda_max;
  if (!(dr.lambda_min > 0.0) || !(lsum > 0.0)) {
    e.status = AuditStatus::kNotCovered;
    e.reason = "A_T is singular on a support";
    return e;
  }
  const double scale = std::sqrt(2.0 / lsum);
  const double delta = (dr.lambda_max - dr.lambda_min) / lsum;
  e.delta = delta;
  if (!(delta < std::sqrt((cfg.audit.t - 1.0) / cfg.audit.t))) {
    e.status = AuditStatus::kNotCovered;
    e.reason = "delta not admissible";
    return e;
  }
  try {
    const LemmaBoundCheck chk = check_lemma_bound(at.scaled(scale), inst.frame, inst.x0, xh, e.rho,
                                                  scale * e.eps_t, cfg.audit.t,
                                                  std::min(delta + 1e-12, std::nextafter(std::sqrt((cfg.audit.t - 1.0) / cfg.audit.t), 0.0)),
                                                  cfg.k);
    e.bound = chk.rhs;
    e.status = chk.holds ? AuditStatus::kCovered : AuditStatus::kViolation;
    if (!chk.holds) e.reason = "error exceeds bound";
  } catch (const PreconditionError& ex) {
    e.status = AuditStatus::kNotCovered;
    e.reason = std::string("lemma precondition ") + ex.clause() + ": " + ex.what();
  }
  return e;
}

}  // namespace

AuditReport audit_bound(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
  AuditReport rep;
  rep.t = cfg.audit.t;
  for (const auto& r : records) {
    AuditEntry e = audit_one(cfg, r);
    ++rep.total;
    switch (e.status) {
      case AuditStatus::kExcluded:
        ++rep.excluded;
        break;
      case AuditStatus::kCovered:
        ++rep.covered;
        break;
      case AuditStatus::kNotCovered:
        ++rep.not_covered;
        break;
      case AuditStatus::kViolation:
        ++rep.violations;
        break;
    }
    rep.entries.push_back(std::move(e));
  }
  rep.oracle_confirmed = rep.total - rep.excluded;
  return rep;
}

}  // namespace dictphase
