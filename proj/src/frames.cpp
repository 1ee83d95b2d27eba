#include "dictphase/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dictphase/errors.hpp"
#include "dictphase/linalg.hpp"
#include "dictphase/rng.hpp"

namespace dictphase {

Frame::Frame(Eigen::MatrixXd d, bool tight, double tight_tol)
    : field_(Field::kReal), real_(std::move(d)), tight_(tight), tight_tol_(tight_tol) {
  complex_ = real_.cast<std::complex<double>>();
  validate();
}

Frame::Frame(Eigen::MatrixXcd d, bool tight, double tight_tol)
    : field_(Field::kComplex), complex_(std::move(d)), tight_(tight), tight_tol_(tight_tol) {
  validate();
}

void Frame::validate() {
  if (complex_.rows() < 1) throw ShapeError("frame needs at least one row");
  if (complex_.cols() < complex_.rows()) throw ShapeError("frame needs N >= n");
  if (!complex_.allFinite()) throw DomainError("frame entries must be finite");
  if (tight_tol_ < 0.0) throw DomainError("tight_tol must be nonnegative");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(complex_);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-12 * s(0))) throw DomainError("frame must have full row rank");
  if (tight_ && tightness_residual() > tight_tol_)
    throw DomainError("frame flagged tight but DD* deviates from identity");
}

const Eigen::MatrixXd& Frame::real_matrix() const {
  if (field_ != Field::kReal) throw DomainError("operation requires a real frame");
  return real_;
}

double Frame::tightness_residual() const {
  const Eigen::MatrixXcd g = complex_ * complex_.adjoint();
  return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

SparseCoefVector::SparseCoefVector(Eigen::VectorXd values, int sparsity)
    : values_(std::move(values)), sparsity_(sparsity) {
  if (sparsity_ < 0) throw DomainError("sparsity must be nonnegative");
  if ((values_.array() != 0.0).count() > sparsity_)
    throw DomainError("coefficient vector has more than k nonzeros");
}

std::vector<int> SparseCoefVector::support() const {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (values_(i) != 0.0) s.push_back(static_cast<int>(i));
  return s;
}

Frame make_identity_frame(int n) {
  if (n < 1) throw DomainError("n must be >= 1");
  return Frame(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n)), true);
}

Frame make_random_tight_frame(int n, int big_n, std::uint64_t seed) {
  if (n < 1 || big_n < n) throw DomainError("need 1 <= n <= N");
  constexpr int kMaxDraws = 8;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    RandomStream rng(derive_seed(seed, {static_cast<std::uint64_t>(draw)}), Stream::kFrame);
    Eigen::MatrixXd g(big_n, n);
    for (int i = 0; i < big_n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const Eigen::VectorXd diag = r.diagonal().cwiseAbs();
    if (diag.minCoeff() <= 1e-8 * diag.maxCoeff()) continue;
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big_n, n);
    return Frame(Eigen::MatrixXd(q.transpose()), true);
  }
  throw DomainError("rank-deficient Gaussian draws exhausted the retry limit");
}

Eigen::VectorXd analyze(const Frame& frame, const Eigen::VectorXd& x) {
  if (x.size() != frame.rows()) throw ShapeError("analyze: x must have length n");
  return frame.real_matrix().transpose() * x;
}

Eigen::VectorXcd analyze(const Frame& frame, const Eigen::VectorXcd& x) {
  if (x.size() != frame.rows()) throw ShapeError("analyze: x must have length n");
  return frame.complex_matrix().adjoint() * x;
}

Eigen::VectorXd synthesize(const Frame& frame, const Eigen::VectorXd& z) {
  if (z.size() != frame.cols()) throw ShapeError("synthesize: z must have length N");
  return frame.real_matrix() * z;
}

Eigen::VectorXcd synthesize(const Frame& frame, const Eigen::VectorXcd& z) {
  if (z.size() != frame.cols()) throw ShapeError("synthesize: z must have length N");
  return frame.complex_matrix() * z;
}

std::vector<int> largest_k_support(const Eigen::VectorXd& v, int k) {
  std::vector<int> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
  order.resize(static_cast<std::size_t>(std::clamp<Eigen::Index>(k, 0, v.size())));
  std::sort(order.begin(), order.end());
  return order;
}

double best_k_term_error(const Eigen::VectorXd& v, int k) {
  if (k < 0 || k > v.size()) throw DomainError("best_k_term_error: need 0 <= k <= N");
  std::vector<double> mags(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) mags[i] = std::abs(v(i));
  std::sort(mags.begin(), mags.end());
  double s = 0.0;
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) < mags.size(); ++i) s += mags[i];
  return s;
}

namespace {

template <typename Vector, typename Matrix>
Membership<Vector> membership_impl(const Matrix& d, const Vector& x, int k, double tol,
                                   std::uint64_t budget) {
  if (x.size() != d.rows()) throw ShapeError("membership: x must have length n");
  if (k < 0) throw DomainError("membership: k must be nonnegative");
  const int big_n = static_cast<int>(d.cols());
  const int size = std::min(k, big_n);
  if (tol < 0.0) tol = 1e-8 * x.norm();
  Membership<Vector> out;
  if (binomial(big_n, size) > budget) {
    out.status = MembershipStatus::kInconclusive;
    return out;
  }
  out.status = MembershipStatus::kNotMember;
  double best = std::numeric_limits<double>::infinity();
  for_each_combination(big_n, size, [&](std::span<const int> support) {
    ++out.supports_checked;
    const Matrix ds = select_cols(d, support);
    Vector w;
    if (size == 0) {
      w = Vector::Zero(0);
    } else {
      w = ds.completeOrthogonalDecomposition().solve(x);
    }
    const double res = size == 0 ? x.norm() : (ds * w - x).norm();
    if (res <= tol) {
      out.status = MembershipStatus::kMember;
      out.coefficients = Vector::Zero(big_n);
      for (int i = 0; i < size; ++i) out.coefficients(support[i]) = w(i);
      out.support.assign(support.begin(), support.end());
      out.residual = res;
      return false;
    }
    best = std::min(best, res);
    return true;
  });
  if (!out.member()) out.residual = best;
  return out;
}

}  // namespace

RealMembership is_in_d_sigma_k(const Frame& frame, const Eigen::VectorXd& x, int k, double tol,
                               std::uint64_t budget) {
  return membership_impl<Eigen::VectorXd>(frame.real_matrix(), x, k, tol, budget);
}

ComplexMembership is_in_d_sigma_k(const Frame& frame, const Eigen::VectorXcd& x, int k,
                                  double tol, std::uint64_t budget) {
  return membership_impl<Eigen::VectorXcd>(frame.complex_matrix(), x, k, tol, budget);
}

}  // namespace dictphase
