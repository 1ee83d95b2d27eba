#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dictphase {

struct L1FitResult {
  Eigen::VectorXd w;
  double objective = 0.0;  // ||M w + c||_1
  int pivots = 0;
  std::vector<int> zero_rows;  // rows with (M w + c)_i == 0 at the returned vertex
};

// Exact minimizer of ||M w + c||_1 over w by the primal simplex method on the
// split-variable LP  min 1'(p + q)  s.t.  M w - p + q = -c,  p, q >= 0.
// The slack columns give a feasible starting basis, so no phase one is
// needed. Bland's rule prevents cycling. The returned vertex is re-solved from
// its zero rows to remove accumulated pivoting error.
L1FitResult minimize_l1_affine(const Eigen::MatrixXd& m, const Eigen::VectorXd& c);

}  // namespace dictphase
