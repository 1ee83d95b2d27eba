#include "dictphase/linalg.hpp"

#include <limits>

#include "dictphase/errors.hpp"

namespace dictphase {
namespace {

template <typename Matrix>
Matrix null_space_impl(const Matrix& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || n == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax && s(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

template <typename Matrix>
Matrix select_rows_impl(const Matrix& a, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw ShapeError("row index out of range");
    out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
  }
  return out;
}

template <typename Matrix>
Matrix select_cols_impl(const Matrix& a, std::span<const int> cols) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] < 0 || cols[i] >= a.cols()) throw ShapeError("column index out of range");
    out.col(static_cast<Eigen::Index>(i)) = a.col(cols[i]);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol) {
  return null_space_impl(a, rel_tol);
}

Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double rel_tol) {
  return null_space_impl(a, rel_tol);
}

Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0) && s(i) > 0.0) ++rank;
  return svd.matrixU().leftCols(rank);
}

int numerical_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0) && s(i) > 0.0) ++rank;
  return rank;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& a, std::span<const int> rows) {
  return select_rows_impl(a, rows);
}
Eigen::MatrixXcd select_rows(const Eigen::MatrixXcd& a, std::span<const int> rows) {
  return select_rows_impl(a, rows);
}
Eigen::MatrixXd select_cols(const Eigen::MatrixXd& a, std::span<const int> cols) {
  return select_cols_impl(a, cols);
}
Eigen::MatrixXcd select_cols(const Eigen::MatrixXcd& a, std::span<const int> cols) {
  return select_cols_impl(a, cols);
}

std::vector<int> complement(std::span<const int> subset, int n) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) - subset.size());
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    if (j < subset.size() && subset[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

double l1_norm(const Eigen::VectorXcd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::abs(v(i));
  return s;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / num)
      return std::numeric_limits<std::uint64_t>::max();
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

bool for_each_combination(int n, int k, const std::function<bool(std::span<const int>)>& visit) {
  if (k < 0 || k > n) return true;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(idx)) return false;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace dictphase
