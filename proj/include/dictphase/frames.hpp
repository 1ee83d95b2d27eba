#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dictphase {

enum class Field { kReal, kComplex };

inline constexpr double kDefaultTightTol = 1e-10;
inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

// An n x N synthesis dictionary D with N >= n and full row rank. Frames are
// immutable after construction. A frame flagged tight satisfies
// max|DD* - I| <= tight_tol, checked at construction.
class Frame {
 public:
  Frame(Eigen::MatrixXd d, bool tight, double tight_tol = kDefaultTightTol);
  Frame(Eigen::MatrixXcd d, bool tight, double tight_tol = kDefaultTightTol);

  int rows() const { return static_cast<int>(complex_.rows()); }
  int cols() const { return static_cast<int>(complex_.cols()); }
  Field field() const { return field_; }
  bool is_real() const { return field_ == Field::kReal; }
  bool tight() const { return tight_; }
  double tight_tol() const { return tight_tol_; }

  // Throws DomainError for complex frames.
  const Eigen::MatrixXd& real_matrix() const;
  // Available for both fields; real frames are promoted.
  const Eigen::MatrixXcd& complex_matrix() const { return complex_; }

  // max-norm of DD* - I.
  double tightness_residual() const;

 private:
  void validate();

  Field field_;
  Eigen::MatrixXd real_;
  Eigen::MatrixXcd complex_;
  bool tight_;
  double tight_tol_;
};

// Coefficient vector with at most `sparsity` nonzero entries.
class SparseCoefVector {
 public:
  SparseCoefVector(Eigen::VectorXd values, int sparsity);

  const Eigen::VectorXd& values() const { return values_; }
  int sparsity() const { return sparsity_; }
  std::vector<int> support() const;

 private:
  Eigen::VectorXd values_;
  int sparsity_;
};

Frame make_identity_frame(int n);

// D = Q^T where Q is the orthonormalized N x n standard-normal draw. Exactly
// tight up to rounding and deterministic per seed.
Frame make_random_tight_frame(int n, int big_n, std::uint64_t seed);

// D^T x (D^* x for complex frames).
Eigen::VectorXd analyze(const Frame& frame, const Eigen::VectorXd& x);
Eigen::VectorXcd analyze(const Frame& frame, const Eigen::VectorXcd& x);
// D z
Eigen::VectorXd synthesize(const Frame& frame, const Eigen::VectorXd& z);
Eigen::VectorXcd synthesize(const Frame& frame, const Eigen::VectorXcd& z);

// sigma_k(v)_1: l1 mass outside the k largest-magnitude entries.
double best_k_term_error(const Eigen::VectorXd& v, int k);

// Indices of the k largest magnitudes; ties go to the lower index.
std::vector<int> largest_k_support(const Eigen::VectorXd& v, int k);

enum class MembershipStatus { kMember, kNotMember, kInconclusive };

template <typename Vector>
struct Membership {
  MembershipStatus status = MembershipStatus::kInconclusive;
  Vector coefficients;       // witness z with D z ~ x (empty unless member)
  std::vector<int> support;  // support the witness was fitted on
  double residual = 0.0;     // ||D z - x||_2 of the witness
  std::uint64_t supports_checked = 0;

  bool member() const { return status == MembershipStatus::kMember; }
};

using RealMembership = Membership<Eigen::VectorXd>;
using ComplexMembership = Membership<Eigen::VectorXcd>;

// Decides x in D Sigma_k^N by least squares on every support of size
// min(k, N), lowest indices first. tol < 0 selects 1e-8 * ||x||_2. Returns
// kInconclusive when binomial(N, k) exceeds the budget.
RealMembership is_in_d_sigma_k(const Frame& frame, const Eigen::VectorXd& x, int k,
                               double tol = -1.0, std::uint64_t budget = kDefaultBudget);
ComplexMembership is_in_d_sigma_k(const Frame& frame, const Eigen::VectorXcd& x, int k,
                                  double tol = -1.0, std::uint64_t budget = kDefaultBudget);

}  // namespace dictphase
