#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dictphase/frames.hpp"
#include "dictphase/measure.hpp"

namespace dictphase {

struct SolverConfig {
  double admm_step = 1.0;
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  int max_inner_iters = 20000;
  int max_outer_iters = 50;
  int restarts = 16;
  std::uint64_t seed = 0;
  double residual_target_slack = 0.05;
  // Reweighted amplitude-flow refinement of each restart's starting point.
  int flow_iters = 1000;
  double flow_step = 2.0;
  double flow_weight = 10.0;

  void validate() const;
};

struct RecoveryResult {
  Eigen::VectorXd estimate;
  double objective = 0.0;  // ||D^T x||_1
  // ||A x - y||_2 for analysis_basis_pursuit, || |A x| - b ||_2 otherwise.
  double residual = 0.0;
  int inner_iters = 0;
  int outer_iters = 0;
  bool converged = false;
  // Equality runs only: distance of the ADMM dual from the optimality
  // conditions g in d||z||_1, D g + A^T nu = 0. NaN when not applicable.
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
};

// Entrywise sign(v_i) * max(|v_i| - tau, 0).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double tau);

// min(||x - y||_2, ||x + y||_2)
double distance_mod_sign(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// sign with sign(0) = +1.
Eigen::VectorXd sign_vector(const Eigen::VectorXd& v);

// Leading eigenvector of sum_j sqrt(b_j) a_j a_j^T / ||a_j||^2 over the
// ceil(3m/13) rows with the largest b_j / ||a_j||, scaled to the energy
// estimate ||b|| / ||A||_F * sqrt(n).
Eigen::VectorXd weighted_correlation_init(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// Gradient flow on sum_j w_j (|a_j x| - b_j)^2 with
// w_j = |a_j x| / (|a_j x| + weight * b_j), step scaled by n / ||A||_F^2.
Eigen::VectorXd amplitude_flow(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               Eigen::VectorXd x, int iters, double step, double weight);

// Reusable l1-analysis solver for one (A, D) pair. Factorizations of A are
// computed once and shared by every right-hand side.
//
// eps == 0: min ||D^T x||_1 s.t. A x = y, by ADMM on (x, z = D^T x) where the
//   x-update is the exact projection onto {A x = y} (valid because D D^T = I)
//   followed by an active-set polish of the ADMM point.
// eps > 0: the penalized surrogate min ||D^T x||_1 + ||A x - y||^2 / (2 lambda)
//   with lambda bisected until the residual lands in [eps (1 - slack), eps].
class AnalysisBasisPursuit {
 public:
  AnalysisBasisPursuit(const MeasurementEnsemble& a, const Frame& frame, SolverConfig cfg);

  // Throws InfeasibleError when no x meets ||A x - y||_2 <= eps.
  RecoveryResult solve(const Eigen::VectorXd& y, double eps) const;

  // Same as solve() but never infeasible: when eps is below the distance of y
  // from range(A) the residual target becomes that distance.
  RecoveryResult solve_relaxed(const Eigen::VectorXd& y, double eps) const;

  // Minimum-norm least-squares solution A^+ y.
  Eigen::VectorXd least_squares(const Eigen::VectorXd& y) const;
  Eigen::VectorXd project_to_range(const Eigen::VectorXd& y) const;

 private:
  RecoveryResult solve_equality(const Eigen::VectorXd& y_in_range) const;
  RecoveryResult solve_ball(const Eigen::VectorXd& y_in_range, double eps) const;
  RecoveryResult finish(Eigen::VectorXd x, const Eigen::VectorXd& y) const;

  Eigen::MatrixXd a_;
  Eigen::MatrixXd d_;
  SolverConfig cfg_;
  int rank_ = 0;
  Eigen::MatrixXd v_;            // right singular vectors of A (n x n)
  Eigen::VectorXd sigma2_;       // squared singular values, zero-padded to n
  Eigen::MatrixXd pinv_;         // A^+
  Eigen::MatrixXd range_basis_;  // orthonormal basis of range(A)
  Eigen::MatrixXd null_proj_;    // I - A^+ A
};

RecoveryResult analysis_basis_pursuit(const MeasurementEnsemble& a, const Eigen::VectorXd& y,
                                      const Frame& frame, double eps, const SolverConfig& cfg);

// Alternating sign refinement with restarts for
//   min ||D^T x||_1  s.t.  || |A x| - b ||_2 <= eps.
// Restart 0 starts from the weighted maximal-correlation direction; restart
// r > 0 draws random signs from seed ^ r and fits x by least squares to the
// signed magnitudes. The start is refined by reweighted amplitude flow and
// s = sign(A x) is taken. Each outer step solves the convex problem for
// y = s o b and resets s = sign(A x) until s repeats. The lowest objective
// among feasible restarts wins; otherwise the lowest residual is returned
// with converged = false.
RecoveryResult pr_l1_analysis(const MeasurementEnsemble& a, const PhaselessObservation& obs,
                              const Frame& frame, const SolverConfig& cfg);

struct OracleOptions {
  int max_measurements = 16;  // sign-pattern budget when A is column-rank deficient
  int max_signal_dim = 16;    // sign-pattern budget when A has full column rank
  double feasibility_tol = 1e-8;
  double tie_tol = 1e-9;
};

struct OracleResult {
  RecoveryResult best;
  // All global minimizers up to tie_tol, one representative per +-pair.
  std::vector<Eigen::VectorXd> minimizers;
  std::uint64_t patterns_checked = 0;
  std::uint64_t feasible_patterns = 0;
  std::string method;  // "row-basis" or "full-sign"

  bool unique_mod_sign() const { return minimizers.size() == 1; }
};

// Exact global minimizer of min ||D^T x||_1 s.t. |A x| = b (noiseless b).
// Full column rank A: every feasible x is fixed by its signs on n independent
// rows, so 2^(n-1) patterns are enumerated and checked against all rows.
// Otherwise all 2^(m-1) patterns with s_1 = +1 are enumerated and each
// equality-constrained problem is solved as an exact LP.
// Throws BudgetError beyond the limits in `opts`, InfeasibleError when no
// pattern is consistent with b.
OracleResult oracle_sign_enumeration(const MeasurementEnsemble& a, const Eigen::VectorXd& b,
                                     const Frame& frame, const OracleOptions& opts = {});

}  // namespace dictphase
