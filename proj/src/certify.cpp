#include "dictphase/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dictphase/errors.hpp"
#include "dictphase/linalg.hpp"
#include "dictphase/rng.hpp"

namespace dictphase {

namespace {

constexpr double kThetaZeroTol = 1e-12;

struct SupportBasis {
  std::vector<int> support;
  Eigen::MatrixXd basis;  // orthonormal basis of range(D_T)
};

std::vector<SupportBasis> support_bases(const Eigen::MatrixXd& d, int k) {
  std::vector<SupportBasis> out;
  const int kk = std::min<int>(k, static_cast<int>(d.cols()));
  if (kk <= 0) return out;
  for_each_combination(static_cast<int>(d.cols()), kk, [&](std::span<const int> t) {
    SupportBasis sb;
    sb.support.assign(t.begin(), t.end());
    sb.basis = range_basis(select_cols(d, t));
    out.push_back(std::move(sb));
    return true;
  });
  return out;
}

// Extreme eigenvalues of U^T G U; (1, 1) when U has no columns.
std::pair<double, double> extremes(const Eigen::MatrixXd& g, const Eigen::MatrixXd& u) {
  if (u.cols() == 0) return {1.0, 1.0};
  const Eigen::MatrixXd m = u.transpose() * g * u;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues()(0), eig.eigenvalues()(m.rows() - 1)};
}

void check_shapes(const MeasurementEnsemble& a, const Frame& frame, int k) {
  if (!frame.is_real()) throw DomainError("certificates require a real frame");
  if (a.cols() != frame.rows()) throw ShapeError("ensemble columns must equal frame rows");
  if (k < 0) throw DomainError("order must be nonnegative");
}

bool sdrip_holds(double lo, double hi) { return lo > kThetaZeroTol && lo <= hi && hi < 2.0; }

}  // namespace

DripReport drip_exact(const MeasurementEnsemble& a, const Frame& frame, int k,
                      std::uint64_t budget) {
  check_shapes(a, frame, k);
  DripReport r;
  r.order = k;
  r.method = DripMethod::kExact;
  const int big_n = frame.cols();
  if (k == 0) {
    r.delta = 0.0;
    return r;
  }
  if (binomial(big_n, std::min(k, big_n)) > budget)
    throw BudgetError("drip_exact: support count exceeds budget");
  const Eigen::MatrixXd g = a.matrix().transpose() * a.matrix();
  double best = -1.0;
  r.lambda_min = std::numeric_limits<double>::infinity();
  r.lambda_max = -std::numeric_limits<double>::infinity();
  for (const auto& sb : support_bases(frame.real_matrix(), k)) {
    ++r.supports_checked;
    if (sb.basis.cols() == 0) continue;
    const auto [lo, hi] = extremes(g, sb.basis);
    r.lambda_min = std::min(r.lambda_min, lo);
    r.lambda_max = std::max(r.lambda_max, hi);
    const double d = std::max(1.0 - lo, hi - 1.0);
    if (d > best) {
      best = d;
      r.argmax_support = sb.support;
    }
  }
  if (best < 0.0 && r.argmax_support.empty()) {
    r.lambda_min = r.lambda_max = 1.0;
    best = 0.0;
  }
  r.delta = std::max(0.0, best);
  return r;
}

DripReport drip_montecarlo(const MeasurementEnsemble& a, const Frame& frame, int k, int trials,
                           std::uint64_t seed) {
  check_shapes(a, frame, k);
  if (trials < 0) throw DomainError("trials must be nonnegative");
  DripReport r;
  r.order = k;
  r.method = DripMethod::kMonteCarloLowerBound;
  const Eigen::MatrixXd& d = frame.real_matrix();
  const int kk = std::min(k, frame.cols());
  if (kk == 0 || trials == 0) return r;
  RandomStream rng(seed, Stream::kProbe);
  r.lambda_min = std::numeric_limits<double>::infinity();
  r.lambda_max = -std::numeric_limits<double>::infinity();
  double best = -1.0;
  for (int i = 0; i < trials; ++i) {
    const std::vector<int> t = rng.subset(frame.cols(), kk);
    Eigen::VectorXd z(kk);
    for (int j = 0; j < kk; ++j) z(j) = rng.normal();
    const Eigen::VectorXd x = select_cols(d, t) * z;
    ++r.supports_checked;
    const double nx = x.squaredNorm();
    if (nx == 0.0) continue;
    const double q = (a.matrix() * x).squaredNorm() / nx;
    r.lambda_min = std::min(r.lambda_min, q);
    r.lambda_max = std::max(r.lambda_max, q);
    const double dd = std::max(1.0 - q, q - 1.0);
    if (dd > best) {
      best = dd;
      r.argmax_support = t;
    }
  }
  r.delta = std::max(0.0, best);
  return r;
}

SdripReport sdrip_exact(const MeasurementEnsemble& a, const Frame& frame, int k,
                        std::uint64_t budget) {
  check_shapes(a, frame, k);
  const int m = a.rows();
  const int big_n = frame.cols();
  if (m == 0) throw ShapeError("sdrip_exact: ensemble has no rows");
  if (k == 0) throw DomainError("sdrip_exact: order must be positive");
  const int half = (m + 1) / 2;
  const std::uint64_t subsets = binomial(m, half);
  const std::uint64_t supports = binomial(big_n, std::min(k, big_n));
  if (subsets > budget || supports > budget / std::max<std::uint64_t>(1, subsets))
    throw BudgetError("sdrip_exact: subset x support count exceeds budget");

  SdripReport r;
  r.order = k;
  r.method = SdripMethod::kExact;
  const auto bases = support_bases(frame.real_matrix(), k);
  const Eigen::MatrixXd& am = a.matrix();

  const Eigen::MatrixXd g_full = am.transpose() * am;
  r.theta_plus = -std::numeric_limits<double>::infinity();
  for (const auto& sb : bases) r.theta_plus = std::max(r.theta_plus, extremes(g_full, sb.basis).second);

  r.theta_minus = std::numeric_limits<double>::infinity();
  for_each_combination(m, half, [&](std::span<const int> rows) {
    ++r.subsets_checked;
    const Eigen::MatrixXd ai = select_rows(am, rows);
    const Eigen::MatrixXd g = ai.transpose() * ai;
    for (const auto& sb : bases) {
      const double lo = extremes(g, sb.basis).first;
      if (lo < r.theta_minus) {
        r.theta_minus = lo;
        r.extreme_subset.assign(rows.begin(), rows.end());
        r.extreme_support = sb.support;
      }
    }
    return true;
  });
  r.satisfied = sdrip_holds(r.theta_minus, r.theta_plus);
  if (!r.satisfied) {
    if (r.theta_minus <= kThetaZeroTol) {
      r.witness_subset = r.extreme_subset;
    } else {
      std::vector<int> all(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) all[j] = j;
      r.witness_subset = all;
    }
  }
  return r;
}

SdripReport sdrip_montecarlo(const MeasurementEnsemble& a, const Frame& frame, int k, int trials,
                             std::uint64_t seed) {
  check_shapes(a, frame, k);
  if (trials < 0) throw DomainError("trials must be nonnegative");
  SdripReport r;
  r.order = k;
  const int m = a.rows();
  const int kk = std::min(k, frame.cols());
  if (trials == 0 || m == 0 || kk == 0) {
    r.method = SdripMethod::kInconclusive;
    r.theta_minus = std::numeric_limits<double>::quiet_NaN();
    r.theta_plus = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.method = SdripMethod::kMonteCarlo;
  const int half = (m + 1) / 2;
  const Eigen::MatrixXd& d = frame.real_matrix();
  const Eigen::MatrixXd& am = a.matrix();
  RandomStream rng(seed, Stream::kSubset);
  r.theta_minus = std::numeric_limits<double>::infinity();
  r.theta_plus = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < trials; ++i) {
    const std::vector<int> rows = rng.subset(m, half);
    const std::vector<int> t = rng.subset(frame.cols(), kk);
    Eigen::VectorXd z(kk);
    for (int j = 0; j < kk; ++j) z(j) = rng.normal();
    const Eigen::VectorXd x = select_cols(d, t) * z;
    ++r.subsets_checked;
    const double nx = x.squaredNorm();
    if (nx == 0.0) continue;
    const Eigen::VectorXd ax = am * x;
    double part = 0.0;
    for (int j : rows) part += ax(j) * ax(j);
    if (part / nx < r.theta_minus) {
      r.theta_minus = part / nx;
      r.extreme_subset = rows;
      r.extreme_support = t;
    }
    r.theta_plus = std::max(r.theta_plus, ax.squaredNorm() / nx);
  }
  r.satisfied = sdrip_holds(r.theta_minus, r.theta_plus);
  if (!r.satisfied && !r.extreme_subset.empty()) r.witness_subset = r.extreme_subset;
  return r;
}

double admissible_t(double theta_minus, double theta_plus) {
  auto in_range = [](double th) { return th > 0.0 && th < 2.0; };
  if (!in_range(theta_minus) || !in_range(theta_plus))
    throw DomainError("admissible_t: theta values must lie in (0, 2)");
  return std::max(1.0 / (2.0 * theta_minus - theta_minus * theta_minus),
                  1.0 / (2.0 * theta_plus - theta_plus * theta_plus));
}

StabilityConstants stability_constants(double delta, double t) {
  if (!(t > 1.0) || !std::isfinite(t)) throw DomainError("stability_constants: t must exceed 1");
  const double limit = std::sqrt((t - 1.0) / t);
  if (!(delta >= 0.0)) throw DomainError("stability_constants: delta must be nonnegative");
  if (!(delta < limit)) throw DomainError("stability_constants: delta >= sqrt((t-1)/t), bound is vacuous");
  StabilityConstants c;
  c.t = t;
  c.delta = delta;
  c.c1 = std::sqrt(2.0 * (1.0 + delta)) / (1.0 - std::sqrt(t / (t - 1.0)) * delta);
  const double gap = limit - delta;
  c.c2 = (std::sqrt(2.0) * delta + std::sqrt(t * gap * delta)) / (t * gap) + 1.0;
  return c;
}

double error_bound(const StabilityConstants& c, double eps, double sigma, int k, double rho) {
  if (k < 1) throw DomainError("error_bound: k must be >= 1");
  if (!(eps >= 0.0) || !(sigma >= 0.0) || !(rho >= 0.0))
    throw DomainError("error_bound: eps, sigma and rho must be nonnegative");
  return c.c1 * eps + c.c2 * (2.0 * sigma + rho) / std::sqrt(static_cast<double>(k));
}

}  // namespace dictphase
