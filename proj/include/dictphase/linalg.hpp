#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dictphase {

// Default singular-value threshold, relative to the largest singular value,
// below which a direction counts as numerically null.
inline constexpr double kNullSpaceRelTol = 1e-10;

// Orthonormal basis (columns) of the null space of `a`. A matrix with zero
// rows has the whole space as null space.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol = kNullSpaceRelTol);
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& a, double rel_tol = kNullSpaceRelTol);

// Orthonormal basis of the column space of `a`.
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a, double rel_tol = kNullSpaceRelTol);

int numerical_rank(const Eigen::MatrixXd& a, double rel_tol = kNullSpaceRelTol);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& a, std::span<const int> rows);
Eigen::MatrixXcd select_rows(const Eigen::MatrixXcd& a, std::span<const int> rows);
Eigen::MatrixXd select_cols(const Eigen::MatrixXd& a, std::span<const int> cols);
Eigen::MatrixXcd select_cols(const Eigen::MatrixXcd& a, std::span<const int> cols);

// Complement of `subset` within [0, n), ascending. `subset` must be sorted.
std::vector<int> complement(std::span<const int> subset, int n);

// Sum of moduli.
double l1_norm(const Eigen::VectorXcd& v);

// binomial(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

// Visits every k-subset of [0, n) in lexicographic order. The visitor returns
// false to stop early; the function returns false iff it was stopped.
bool for_each_combination(int n, int k, const std::function<bool(std::span<const int>)>& visit);

// Indices of the set bits among the low n bits of `mask`.
inline std::vector<int> mask_to_indices(std::uint64_t mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (mask & (std::uint64_t{1} << i)) out.push_back(i);
  return out;
}

}  // namespace dictphase
