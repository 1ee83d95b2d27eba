#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dictphase/frames.hpp"
#include "dictphase/measure.hpp"

namespace dictphase {

enum class NspStatus { kHoldsOnTestedFamily, kCounterexample, kInconclusive };

std::string to_string(NspStatus s);

// T, u in N(A_T), v in N(A_{T^c}) with u + v in D Sigma_k and
// ||D^T (u + v)||_1 >= ||D^T (u - v)||_1.
struct RealNspWitness {
  std::vector<int> t;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  std::vector<int> support;  // u + v lies in range(D_support)
  double gap = 0.0;          // ||D^T(u+v)||_1 - ||D^T(u-v)||_1
  std::string source;        // "exact", "search" or "oracle"
  // Whether the exact oracle finds a minimizer other than +-(u + v) for
  // b = |A (u + v)|; empty when the oracle budget is exceeded.
  std::optional<bool> oracle_confirmed;
};

struct NspVerdict {
  NspStatus status = NspStatus::kInconclusive;
  std::optional<RealNspWitness> witness;
  std::uint64_t trials = 0;  // (T, support) pairs, probes and oracle draws
  std::uint64_t pairs_total = 0;
  std::uint64_t pairs_decided = 0;
};

struct RealAmbiguity {
  Eigen::VectorXd x0;       // u + v
  Eigen::VectorXd x_tilde;  // u - v
  std::vector<int> t;       // rows where A u vanishes
};

// Finds T = {j : |a_j u| <= |a_j v|}, checks A_T u = 0 and A_{T^c} v = 0 to
// 1e-10 relative to ||A|| (||u|| + ||v||) and returns x0 = u + v,
// x~ = u - v, which satisfy |A x0| = |A x~|. Throws PreconditionError
// (clause "null-space") otherwise.
RealAmbiguity nsp_real_counterexample_to_failure(const MeasurementEnsemble& a,
                                                 const Eigen::VectorXd& u,
                                                 const Eigen::VectorXd& v);

// Real null space property check, by T symmetry over T containing row 0.
// For each T and each support S of size min(k, N), the pairs (u, v) = (U a, V b)
// with U a + V b in range(D_S) form a subspace W of (a, b). W is decided exactly
// when dim W <= 2 or W is invariant under b -> -b; larger subspaces are probed
// by random search. When undecided pairs remain, random x0 in D Sigma_k are
// passed through the exact oracle and any second minimizer is converted into
// a witness. Every witness is re-verified before it is returned.
NspVerdict nsp_real_check(const MeasurementEnsemble& a, const Frame& frame, int k,
                          std::uint64_t budget = kDefaultBudget, std::uint64_t seed = 0);

struct ComplexNspTuple {
  std::vector<std::vector<int>> partition;  // S_1..S_p covering [m]
  std::vector<Eigen::VectorXcd> eta;        // eta_j in N(A_{S_j})
  std::vector<std::complex<double>> c;      // pairwise distinct, unimodular
};

struct ComplexNspCheck {
  bool holds = true;
  std::optional<std::pair<int, int>> violating_pair;  // (j, l), 0-based
};

// True iff ||D^*(eta_j - eta_l)||_1 < ||D^*(c_l eta_j - c_j eta_l)||_1 for all
// j != l. Throws PreconditionError naming the failed clause: "shape",
// "partition", "unimodular", "distinct", "null-space", "ratio-constant",
// "ratio-membership".
ComplexNspCheck nsp_complex_check_tuple(const Frame& frame, const ComplexNspTuple& tuple,
                                        const Eigen::MatrixXcd& a, int k);

struct ComplexAmbiguity {
  Eigen::VectorXcd x0;       // eta_j0 - eta_l0
  Eigen::VectorXcd x_tilde;  // c_l0 eta_j0 - c_j0 eta_l0
};

// Converts a violating pair into x0, x~ with |A x0| = |A x~| (checked to 1e-9
// relative) and x~ not a unimodular multiple of x0.
ComplexAmbiguity nsp_complex_counterexample_to_failure(const ComplexNspTuple& tuple,
                                                       const Eigen::MatrixXcd& a, int j0, int l0);

}  // namespace dictphase
