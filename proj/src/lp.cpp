#include "dictphase/lp.hpp"

#include <cmath>
#include <limits>

#include "dictphase/errors.hpp"
#include "dictphase/linalg.hpp"

namespace dictphase {

L1FitResult minimize_l1_affine(const Eigen::MatrixXd& m, const Eigen::VectorXd& c) {
  const int rows = static_cast<int>(m.rows());
  const int d = static_cast<int>(m.cols());
  if (c.size() != rows) throw ShapeError("minimize_l1_affine: c must have one entry per row");

  L1FitResult out;
  if (d == 0) {
    out.w = Eigen::VectorXd::Zero(0);
    out.objective = c.lpNorm<1>();
    for (int i = 0; i < rows; ++i)
      if (c(i) == 0.0) out.zero_rows.push_back(i);
    return out;
  }

  // Columns: [w+ | w- | p | q | rhs].
  const int nvar = 2 * d + 2 * rows;
  const int rhs = nvar;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(rows, nvar + 1);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nvar);
  cost.tail(2 * rows).setOnes();
  std::vector<int> basis(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) {
    const double sgn = (-c(i) >= 0.0) ? 1.0 : -1.0;
    tab.block(i, 0, 1, d) = sgn * m.row(i);
    tab.block(i, d, 1, d) = -sgn * m.row(i);
    tab(i, 2 * d + i) = -sgn;
    tab(i, 2 * d + rows + i) = sgn;
    tab(i, rhs) = -sgn * c(i);
    basis[i] = sgn > 0 ? 2 * d + rows + i : 2 * d + i;
  }

  const double scale = 1.0 + m.cwiseAbs().maxCoeff() + c.cwiseAbs().maxCoeff();
  const double cost_tol = 1e-12 * scale;
  const double pivot_tol = 1e-11;
  const int max_pivots = 100 * (nvar + rows) + 1000;

  Eigen::VectorXd reduced(nvar);
  while (true) {
    // Reduced costs r_j = c_j - c_B' T_j.
    reduced = cost;
    for (int i = 0; i < rows; ++i) reduced -= cost(basis[i]) * tab.row(i).head(nvar).transpose();
    int enter = -1;
    for (int j = 0; j < nvar; ++j) {
      if (reduced(j) < -cost_tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      const double a = tab(i, enter);
      if (a <= pivot_tol) continue;
      const double ratio = tab(i, rhs) / a;
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 && leave >= 0 && basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) throw Error("minimize_l1_affine: LP reported unbounded (cannot happen)");

    tab.row(leave) /= tab(leave, enter);
    for (int i = 0; i < rows; ++i) {
      if (i == leave) continue;
      const double f = tab(i, enter);
      if (f != 0.0) tab.row(i) -= f * tab.row(leave);
    }
    basis[leave] = enter;
    if (++out.pivots > max_pivots) throw Error("minimize_l1_affine: pivot limit reached");
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar);
  for (int i = 0; i < rows; ++i) x(basis[i]) = std::max(0.0, tab(i, rhs));
  Eigen::VectorXd w = x.head(d) - x.segment(d, d);

  // Polish: re-solve the vertex from the rows where the residual vanishes.
  Eigen::VectorXd r = m * w + c;
  const double zero_tol = 1e-9 * scale;
  std::vector<int> zero_rows;
  for (int i = 0; i < rows; ++i)
    if (std::abs(r(i)) <= zero_tol) zero_rows.push_back(i);
  if (!zero_rows.empty()) {
    const Eigen::MatrixXd mz = select_rows(m, zero_rows);
    Eigen::VectorXd cz(static_cast<Eigen::Index>(zero_rows.size()));
    for (std::size_t i = 0; i < zero_rows.size(); ++i) cz(i) = c(zero_rows[i]);
    const auto cod = mz.completeOrthogonalDecomposition();
    const Eigen::VectorXd wp = cod.solve(-cz);
    if ((mz * wp + cz).norm() <= zero_tol * std::sqrt(static_cast<double>(zero_rows.size())) &&
        (m * wp + c).lpNorm<1>() <= r.lpNorm<1>() + 1e-12 * scale) {
      w = wp;
    }
  }
  out.w = w;
  r = m * w + c;
  out.objective = r.lpNorm<1>();
  out.zero_rows.clear();
  for (int i = 0; i < rows; ++i)
    if (std::abs(r(i)) <= zero_tol) out.zero_rows.push_back(i);
  return out;
}

}  // namespace dictphase
