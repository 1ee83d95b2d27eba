#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dictphase/certify.hpp"
#include "dictphase/frames.hpp"
#include "dictphase/measure.hpp"

namespace dictphase {

struct PolytopeDecomposition {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> atoms;
  double alpha = 0.0;
  int s = 0;
};

// Writes v with ||v||_inf <= alpha and ||v||_1 <= s alpha as a convex
// combination of s-sparse atoms u with supp(u) in supp(v),
// ||u||_1 = ||v||_1 and ||u||_inf <= alpha. Each step peels the vertex that
// puts alpha on the largest remaining coordinates, with the largest weight
// that keeps the remainder inside the polytope. Throws PreconditionError
// with clause "linf" or "l1" when v is outside.
PolytopeDecomposition polytope_decompose(const Eigen::VectorXd& v, double alpha, int s);

struct PolytopeCheck {
  bool ok = true;
  std::string clause;  // first violated clause, empty when ok
};

// Clauses in order: "shape", "weights-range", "weights-sum", "atom-support",
// "atom-sparsity", "atom-l1", "atom-linf", "reconstruction".
PolytopeCheck polytope_verify(const Eigen::VectorXd& v, double alpha, int s,
                              const PolytopeDecomposition& dec);

// sum_{j > r} a_j^alpha <= sum_{i <= r} a_i^alpha for nonincreasing a >= 0
// with sum_{i <= r} a_i >= sum_{j > r} a_j and alpha >= 1. Precondition
// failures throw PreconditionError: "shape", "negative", "unsorted",
// "alpha", "premise".
bool power_sum_check(const Eigen::VectorXd& a, int r, double alpha);

struct LemmaBoundCheck {
  bool holds = false;
  double lhs = 0.0;  // ||x^ - x0||_2
  double rhs = 0.0;
  double t_star = 0.0;  // ceil(t k) / k
  int order = 0;        // ceil(t k)
  double delta_exact = 0.0;
  StabilityConstants constants;
};

// Checks ||x^ - x0||_2 <= c1 eps + c2 (2 sigma_k(D^T x0)_1 + rho) / sqrt(k)
// with constants at t* = ceil(t k) / k. Refuses (PreconditionError) unless
// the frame is tight ("tight-frame"), ||D^T x^||_1 <= ||D^T x0||_1 + rho
// ("objective"), ||A (x^ - x0)||_2 <= eps ("residual"), delta is at least the
// exact DRIP constant of order ceil(t k) ("delta-certificate") and
// delta < sqrt((t - 1) / t) ("admissibility").
LemmaBoundCheck check_lemma_bound(const MeasurementEnsemble& a, const Frame& frame,
                                  const Eigen::VectorXd& x0, const Eigen::VectorXd& x_hat,
                                  double rho, double eps, double t, double delta, int k);

}  // namespace dictphase
