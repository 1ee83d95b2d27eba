#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dictphase/frames.hpp"
#include "dictphase/measure.hpp"
#include "dictphase/solver.hpp"

namespace dictphase {

enum class FrameKind { kIdentity, kRandomTight };

std::string to_string(FrameKind kind);
FrameKind frame_kind_from_string(const std::string& s);

struct AuditConfig {
  bool enabled = false;
  double t = 2.0;
};

struct ExperimentConfig {
  int n = 0;
  int big_n = 0;
  int k = 0;
  std::vector<int> m_grid;
  std::vector<double> eps_grid;
  int trials = 1;
  std::uint64_t seed = 0;
  SolverConfig solver;
  double success_threshold = 1e-4;
  FrameKind frame_kind = FrameKind::kRandomTight;
  AuditConfig audit;

  void validate() const;
};

// Everything a trial draws. The frame, z0 and the ensemble seed depend only
// on (seed, trial) so the m grid sees nested prefixes of one Gaussian draw.
struct TrialInstance {
  Frame frame;
  Eigen::VectorXd z0;
  Eigen::VectorXd x0;
  MeasurementEnsemble a;  // scaled by 1 / sqrt(m)
  PhaselessObservation obs;
  std::uint64_t solver_seed = 0;
};

TrialInstance make_trial_instance(const ExperimentConfig& cfg, int trial_index, int m_index,
                                  int eps_index);

struct TrialRecord {
  int n = 0, big_n = 0, k = 0, m = 0;
  double eps = 0.0;
  int m_index = 0, eps_index = 0, trial = 0;
  std::uint64_t solver_seed = 0;
  double x0_norm = 0.0;
  double sigma_k = 0.0;  // sigma_k(D^T x0)_1
  double error = 0.0;    // distance_mod_sign(x^, x0)
  double objective = 0.0;
  double objective_truth = 0.0;  // ||D^T x0||_1
  double residual = 0.0;
  bool converged = false;
  bool success = false;
  int inner_iters = 0;
  int outer_iters = 0;
  std::string failure;  // solver exception message, empty on success
  double runtime_seconds = 0.0;
  Eigen::VectorXd x_hat;
};

TrialRecord run_trial(const ExperimentConfig& cfg, int trial_index, int m_index = 0,
                      int eps_index = 0);

struct CellSummary {
  int m = 0;
  double eps = 0.0;
  int trials = 0;
  int successes = 0;
  int converged = 0;
  double success_rate = 0.0;
  double median_error = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> records;  // m-major, then eps, then trial
  std::vector<CellSummary> cells;
};

// jobs <= 1 runs inline; output order and content do not depend on jobs.
SweepResult run_sweep(const ExperimentConfig& cfg, int jobs = 1);

std::vector<CellSummary> summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);

enum class AuditStatus { kCovered, kExcluded, kNotCovered, kViolation };

std::string to_string(AuditStatus s);

struct AuditEntry {
  AuditStatus status = AuditStatus::kExcluded;
  std::string reason;
  double error = 0.0;
  double bound = 0.0;
  double delta = 0.0;      // DRIP constant of the rescaled A_T
  double eps_t = 0.0;      // ||A_T (x^ - x0)||_2 before rescaling
  double rho = 0.0;        // objective excess over ||D^T x0||_1
  int t_size = 0;
};

struct AuditReport {
  double t = 2.0;
  int total = 0;
  int oracle_confirmed = 0;
  int excluded = 0;
  int covered = 0;
  int not_covered = 0;
  int violations = 0;
  std::vector<AuditEntry> entries;  // one per record, same order
};

// Per record: confirms x^ against the exact oracle (eps = 0) or the
// premise ||D^T x^||_1 <= ||D^T x0||_1 with feasibility (eps > 0); takes the
// larger of the sign-agreement set T and its complement, rescales A_T to
// center its DRIP spectrum and checks the stability lemma with the measured
// ||A_T (x^ - x0)||_2 as the noise level.
AuditReport audit_bound(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);

}  // namespace dictphase
