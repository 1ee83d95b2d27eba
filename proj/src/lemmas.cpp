#include "dictphase/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dictphase/errors.hpp"

namespace dictphase {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kAtomTol = 1e-10;
constexpr double kCapTol = 1e-12;

int count_nonzero(const Eigen::VectorXd& v) {
  return static_cast<int>((v.array() != 0.0).count());
}

// alpha on the floor(L / alpha) largest coordinates of w, the remainder on
// the next one. Ties go to the lower index.
Eigen::VectorXd top_vertex(const Eigen::VectorXd& w, double alpha, double l1) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(w.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return w(i) > w(j); });
  Eigen::VectorXd u = Eigen::VectorXd::Zero(w.size());
  double left = l1;
  for (Eigen::Index i : order) {
    if (left <= 0.0 || w(i) == 0.0) break;
    u(i) = std::min(alpha, left);
    left -= u(i);
  }
  return u;
}

}  // namespace

PolytopeDecomposition polytope_decompose(const Eigen::VectorXd& v, double alpha, int s) {
  if (!(alpha > 0.0)) throw DomainError("polytope_decompose: alpha must be positive");
  if (s < 0) throw DomainError("polytope_decompose: s must be nonnegative");
  const double linf = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  const double l1 = v.lpNorm<1>();
  if (linf > alpha * (1.0 + kCapTol))
    throw PreconditionError("linf", "||v||_inf exceeds alpha");
  if (l1 > s * alpha * (1.0 + kCapTol))
    throw PreconditionError("l1", "||v||_1 exceeds s * alpha");

  PolytopeDecomposition dec;
  dec.alpha = alpha;
  dec.s = s;
  if (count_nonzero(v) <= s) {
    dec.weights.push_back(1.0);
    dec.atoms.push_back(v);
    return dec;
  }

  const Eigen::VectorXd sign = v.unaryExpr([](double x) { return x < 0.0 ? -1.0 : 1.0; });
  Eigen::VectorXd w = v.cwiseAbs().cwiseMin(alpha);
  double mass = 1.0;
  for (int step = 0; step <= 2 * v.size() + 2; ++step) {
    if (count_nonzero(w) <= s) break;
    const Eigen::VectorXd u = top_vertex(w, alpha, l1);
    double lam = 1.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (u(i) > 0.0) lam = std::min(lam, w(i) / u(i));
      if (u(i) < alpha) lam = std::min(lam, (alpha - w(i)) / (alpha - u(i)));
    }
    if (lam >= 1.0 - 1e-15) {
      w = u;
      break;
    }
    dec.weights.push_back(mass * lam);
    dec.atoms.push_back(u.cwiseProduct(sign));
    mass *= 1.0 - lam;
    w = (w - lam * u) / (1.0 - lam);
    // Snap coordinates that the step drove onto a bound.
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w(i) <= 1e-14 * alpha) w(i) = 0.0;
      if (w(i) >= alpha * (1.0 - 1e-14)) w(i) = alpha;
    }
    // Restore the exact l1 mass on the free coordinates.
    const double drift = w.sum() - l1;
    if (drift != 0.0) {
      Eigen::Index pick = -1;
      for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > 0.0 && w(i) < alpha && (pick < 0 || w(i) > w(pick))) pick = i;
      if (pick >= 0) w(pick) = std::clamp(w(pick) - drift, 0.0, alpha);
    }
  }
  dec.weights.push_back(mass);
  dec.atoms.push_back(w.cwiseProduct(sign));
  return dec;
}

PolytopeCheck polytope_verify(const Eigen::VectorXd& v, double alpha, int s,
                              const PolytopeDecomposition& dec) {
  auto fail = [](const char* clause) { return PolytopeCheck{false, clause}; };
  if (dec.weights.empty() || dec.weights.size() != dec.atoms.size()) return fail("shape");
  for (const auto& u : dec.atoms)
    if (u.size() != v.size()) return fail("shape");
  double total = 0.0;
  for (double w : dec.weights) {
    if (!(w > 0.0) || w > 1.0 + kWeightTol) return fail("weights-range");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTol) return fail("weights-sum");
  for (const auto& u : dec.atoms)
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (u(i) != 0.0 && v(i) == 0.0) return fail("atom-support");
  for (const auto& u : dec.atoms)
    if (count_nonzero(u) > s) return fail("atom-sparsity");
  const double l1 = v.lpNorm<1>();
  for (const auto& u : dec.atoms)
    if (std::abs(u.lpNorm<1>() - l1) > kAtomTol) return fail("atom-l1");
  for (const auto& u : dec.atoms)
    if (u.size() && u.cwiseAbs().maxCoeff() > alpha + kCapTol) return fail("atom-linf");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(v.size());
  for (std::size_t i = 0; i < dec.atoms.size(); ++i) sum += dec.weights[i] * dec.atoms[i];
  if (v.size() && (sum - v).cwiseAbs().maxCoeff() > kAtomTol) return fail("reconstruction");
  return {};
}

bool power_sum_check(const Eigen::VectorXd& a, int r, double alpha) {
  if (r < 0 || r > a.size()) throw PreconditionError("shape", "r must lie in [0, len(a)]");
  if (!(alpha >= 1.0)) throw PreconditionError("alpha", "alpha must be >= 1");
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!(a(i) >= 0.0)) throw PreconditionError("negative", "entries must be nonnegative");
  for (Eigen::Index i = 1; i < a.size(); ++i)
    if (a(i) > a(i - 1)) throw PreconditionError("unsorted", "a must be nonincreasing");
  const double head = a.head(r).sum();
  const double tail = a.tail(a.size() - r).sum();
  if (head < tail * (1.0 - 1e-15)) throw PreconditionError("premise", "sum of the head is below the tail");
  const double head_p = a.head(r).array().pow(alpha).sum();
  const double tail_p = a.tail(a.size() - r).array().pow(alpha).sum();
  return tail_p <= head_p * (1.0 + 1e-12) + 1e-300;
}

LemmaBoundCheck check_lemma_bound(const MeasurementEnsemble& a, const Frame& frame,
                                  const Eigen::VectorXd& x0, const Eigen::VectorXd& x_hat,
                                  double rho, double eps, double t, double delta, int k) {
  if (k < 1) throw DomainError("check_lemma_bound: k must be >= 1");
  if (!(t > 1.0)) throw DomainError("check_lemma_bound: t must exceed 1");
  if (!(rho >= 0.0) || !(eps >= 0.0)) throw DomainError("check_lemma_bound: rho and eps must be nonnegative");
  if (x0.size() != a.cols() || x_hat.size() != a.cols())
    throw ShapeError("check_lemma_bound: signal length must equal columns of A");
  if (!frame.is_real() || !frame.tight())
    throw PreconditionError("tight-frame", "a real tight frame is required");

  const double obj0 = analyze(frame, x0).lpNorm<1>();
  const double obj_hat = analyze(frame, x_hat).lpNorm<1>();
  if (obj_hat > obj0 + rho + 1e-12 * std::max(1.0, obj0))
    throw PreconditionError("objective", "||D^T x^||_1 exceeds ||D^T x0||_1 + rho");
  const double res = (a.matrix() * (x_hat - x0)).norm();
  if (res > eps * (1.0 + 1e-12) + 1e-14 * std::max(1.0, x0.norm()))
    throw PreconditionError("residual", "||A (x^ - x0)||_2 exceeds eps");

  LemmaBoundCheck out;
  out.order = static_cast<int>(std::ceil(t * k - 1e-12));
  out.t_star = static_cast<double>(out.order) / k;
  out.delta_exact = drip_exact(a, frame, std::min(out.order, frame.cols())).delta;
  if (delta < out.delta_exact - 1e-12)
    throw PreconditionError("delta-certificate", "delta is below the exact DRIP constant");
  if (!(delta < std::sqrt((t - 1.0) / t)))
    throw PreconditionError("admissibility", "delta >= sqrt((t - 1) / t)");
  out.constants = stability_constants(delta, out.t_star);
  const double sigma = best_k_term_error(analyze(frame, x0), k);
  out.lhs = (x_hat - x0).norm();
  out.rhs = error_bound(out.constants, eps, sigma, k, rho);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-12 * (1.0 + x0.norm());
  return out;
}

}  // namespace dictphase
