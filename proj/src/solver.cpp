#include "dictphase/solver.hpp"

#include <algorithm>
#include <cmath>

#include "dictphase/errors.hpp"
#include "dictphase/linalg.hpp"
#include "dictphase/lp.hpp"
#include "dictphase/rng.hpp"

namespace dictphase {

void SolverConfig::validate() const {
  if (!(admm_step > 0.0)) throw DomainError("admm_step must be positive");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0)) throw DomainError("tolerances must be positive");
  if (max_inner_iters < 1 || max_outer_iters < 1) throw DomainError("iteration caps must be positive");
  if (restarts < 1) throw DomainError("restarts must be >= 1");
  if (!(residual_target_slack > 0.0) || residual_target_slack >= 1.0)
    throw DomainError("residual_target_slack must lie in (0, 1)");
  if (flow_iters < 0) throw DomainError("flow_iters must be nonnegative");
  if (!(flow_step > 0.0) || !(flow_weight >= 0.0)) throw DomainError("invalid flow parameters");
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double tau) {
  if (!(tau >= 0.0)) throw DomainError("soft_threshold: tau must be nonnegative");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i)) - tau;
    out(i) = mag > 0.0 ? std::copysign(mag, v(i)) : 0.0;
  }
  return out;
}

double distance_mod_sign(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw ShapeError("distance_mod_sign: length mismatch");
  return std::min((x - y).norm(), (x + y).norm());
}

Eigen::VectorXd sign_vector(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double t) { return t < 0.0 ? -1.0 : 1.0; });
}

Eigen::VectorXd weighted_correlation_init(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m == 0 || b.norm() == 0.0) return Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd row_norm = a.rowwise().norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) order[j] = j;
  auto ratio = [&](Eigen::Index j) { return row_norm(j) > 0.0 ? b(j) / row_norm(j) : 0.0; };
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return ratio(i) > ratio(j); });
  const Eigen::Index q = std::max<Eigen::Index>(1, (3 * m + 12) / 13);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < q; ++i) {
    const Eigen::Index j = order[i];
    if (row_norm(j) == 0.0) continue;
    const Eigen::VectorXd u = a.row(j).transpose() / row_norm(j);
    y.noalias() += std::sqrt(b(j)) * u * u.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y);
  const double energy = b.norm() / a.norm() * std::sqrt(static_cast<double>(n));
  return eig.eigenvectors().col(n - 1) * energy;
}

Eigen::VectorXd amplitude_flow(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               Eigen::VectorXd x, int iters, double step, double weight) {
  const double fro2 = a.squaredNorm();
  if (fro2 == 0.0) return x;
  const double mu = step * static_cast<double>(a.cols()) / fro2;
  Eigen::VectorXd g(a.rows());
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd ax = a * x;
    for (Eigen::Index j = 0; j < ax.size(); ++j) {
      const double mag = std::abs(ax(j));
      const double denom = mag + weight * b(j);
      const double w = denom > 0.0 ? mag / denom : 1.0;
      g(j) = w * (ax(j) - (ax(j) < 0.0 ? -b(j) : b(j)));
    }
    x.noalias() -= mu * (a.transpose() * g);
  }
  return x;
}

namespace {

struct AdmmState {
  Eigen::VectorXd x, z, u;
};

struct AdmmOutcome {
  int iters = 0;
  bool converged = false;
};

// Scaled-form ADMM for min ||z||_1 + f(x) s.t. D^T x = z. `x_update(v)`
// returns argmin f(x) + rho/2 ||D^T x - D^T ... ||^2 given v = D (z - u),
// which is what the tight-frame identity D D^T = I reduces it to.
template <typename XUpdate>
AdmmOutcome run_admm(const Eigen::MatrixXd& d, double rho, double ptol, double dtol,
                     int max_iters, AdmmState& st, XUpdate&& x_update) {
  const double tau = 1.0 / rho;
  Eigen::VectorXd dtx, z_old;
  AdmmOutcome out;
  for (int it = 1; it <= max_iters; ++it) {
    st.x = x_update(d * (st.z - st.u));
    dtx.noalias() = d.transpose() * st.x;
    z_old = st.z;
    st.z = soft_threshold(dtx + st.u, tau);
    st.u += dtx - st.z;
    out.iters = it;
    const double rp = (dtx - st.z).norm();
    const double rd = rho * (d * (st.z - z_old)).norm();
    const double sp = ptol * std::max({1.0, dtx.norm(), st.z.norm()});
    const double sd = dtol * std::max(1.0, rho * (d * st.u).norm());
    if (rp <= sp && rd <= sd) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

AnalysisBasisPursuit::AnalysisBasisPursuit(const MeasurementEnsemble& a, const Frame& frame,
                                           SolverConfig cfg)
    : a_(a.matrix()), cfg_(cfg) {
  cfg_.validate();
  if (!frame.is_real()) throw DomainError("l1-analysis solver requires a real frame");
  if (!frame.tight()) throw DomainError("l1-analysis solver requires a tight frame");
  d_ = frame.real_matrix();
  if (a_.cols() != d_.rows()) throw ShapeError("ensemble columns must equal frame rows");
  const Eigen::Index n = a_.cols();
  const Eigen::Index m = a_.rows();
  if (m == 0) {
    v_ = Eigen::MatrixXd::Identity(n, n);
    sigma2_ = Eigen::VectorXd::Zero(n);
    pinv_ = Eigen::MatrixXd::Zero(n, 0);
    range_basis_ = Eigen::MatrixXd::Zero(0, 0);
    null_proj_ = Eigen::MatrixXd::Identity(n, n);
    return;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kNullSpaceRelTol * s(0) && s(i) > 0.0) ++rank_;
  v_ = svd.matrixV();
  sigma2_ = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < rank_; ++i) sigma2_(i) = s(i) * s(i);
  const Eigen::MatrixXd ur = svd.matrixU().leftCols(rank_);
  const Eigen::MatrixXd vr = v_.leftCols(rank_);
  pinv_ = vr * s.head(rank_).cwiseInverse().asDiagonal() * ur.transpose();
  range_basis_ = ur;
  null_proj_ = Eigen::MatrixXd::Identity(n, n) - vr * vr.transpose();
}

Eigen::VectorXd AnalysisBasisPursuit::least_squares(const Eigen::VectorXd& y) const {
  return pinv_ * y;
}

Eigen::VectorXd AnalysisBasisPursuit::project_to_range(const Eigen::VectorXd& y) const {
  return range_basis_ * (range_basis_.transpose() * y);
}

RecoveryResult AnalysisBasisPursuit::finish(Eigen::VectorXd x, const Eigen::VectorXd& y) const {
  RecoveryResult r;
  r.objective = (d_.transpose() * x).lpNorm<1>();
  r.residual = (a_ * x - y).norm();
  r.estimate = std::move(x);
  return r;
}

RecoveryResult AnalysisBasisPursuit::solve_equality(const Eigen::VectorXd& y) const {
  const Eigen::Index n = a_.cols();
  const double scale = y.norm();
  if (scale == 0.0) {
    RecoveryResult r = finish(Eigen::VectorXd::Zero(n), y);
    r.converged = true;
    r.kkt_residual = 0.0;
    return r;
  }
  const Eigen::VectorXd yh = y / scale;
  const Eigen::VectorXd xp = pinv_ * yh;
  const double rho = cfg_.admm_step;

  AdmmState st;
  st.x = xp;
  st.z = d_.transpose() * xp;
  st.u = Eigen::VectorXd::Zero(d_.cols());
  const bool pinned = rank_ == n;
  const AdmmOutcome run = run_admm(d_, rho, cfg_.primal_tol, cfg_.dual_tol, cfg_.max_inner_iters,
                                   st, [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                                     if (pinned) return xp;
                                     return null_proj_ * v + xp;
                                   });

  // Optimality certificate from the scaled dual g = rho u.
  const Eigen::VectorXd g = rho * st.u;
  double subgrad_violation = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    subgrad_violation = std::max(subgrad_violation, std::abs(g(i)) - 1.0);
    if (st.z(i) != 0.0)
      subgrad_violation = std::max(subgrad_violation, std::abs(g(i) - std::copysign(1.0, st.z(i))));
  }
  const double kkt = (null_proj_ * (d_ * g)).norm() + std::max(0.0, subgrad_violation);

  Eigen::VectorXd x = st.x;
  if (!pinned) {
    // Active-set polish: refit on the vanishing analysis coefficients.
    const Eigen::VectorXd dtx = d_.transpose() * x;
    const double cut = 1e-6 * dtx.cwiseAbs().maxCoeff();
    std::vector<int> zero_set;
    for (Eigen::Index i = 0; i < dtx.size(); ++i)
      if (std::abs(dtx(i)) <= cut) zero_set.push_back(static_cast<int>(i));
    if (!zero_set.empty()) {
      const Eigen::Index mz = static_cast<Eigen::Index>(zero_set.size());
      Eigen::MatrixXd lhs(a_.rows() + mz, n);
      lhs.topRows(a_.rows()) = a_;
      lhs.bottomRows(mz) = select_cols(d_, zero_set).transpose();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a_.rows() + mz);
      rhs.head(a_.rows()) = yh;
      const Eigen::VectorXd xp2 = lhs.completeOrthogonalDecomposition().solve(rhs);
      const double obj_admm = (d_.transpose() * x).lpNorm<1>();
      const double obj_pol = (d_.transpose() * xp2).lpNorm<1>();
      if ((lhs * xp2 - rhs).norm() <= 1e-10 && obj_pol <= obj_admm + 1e-9 * std::max(1.0, obj_admm))
        x = xp2;
    }
  }
  RecoveryResult r = finish(x * scale, y);
  r.inner_iters = run.iters;
  r.converged = run.converged;
  r.kkt_residual = kkt;
  return r;
}

RecoveryResult AnalysisBasisPursuit::solve_ball(const Eigen::VectorXd& y, double eps) const {
  const Eigen::Index n = a_.cols();
  const double scale = y.norm();
  if (scale <= eps) {
    RecoveryResult r = finish(Eigen::VectorXd::Zero(n), y);
    r.converged = true;
    return r;
  }
  const Eigen::VectorXd yh = y / scale;
  const double eh = eps / scale;
  const Eigen::VectorXd aty = a_.transpose() * yh;
  const double rho = cfg_.admm_step;
  const double lam_max = (d_.transpose() * aty).cwiseAbs().maxCoeff();
  const double loose = std::max(cfg_.primal_tol, 1e-6);

  AdmmState st;
  st.x = Eigen::VectorXd::Zero(n);
  st.z = Eigen::VectorXd::Zero(d_.cols());
  st.u = Eigen::VectorXd::Zero(d_.cols());
  int total_iters = 0;

  auto run_at = [&](double lam, double tol, AdmmState& state) {
    const Eigen::VectorXd inv = (sigma2_.array() / lam + rho).inverse().matrix();
    const Eigen::MatrixXd w = v_ * inv.asDiagonal() * v_.transpose();
    const Eigen::VectorXd base = w * aty / lam;
    const Eigen::MatrixXd wr = rho * w;
    AdmmOutcome o = run_admm(d_, rho, tol, tol, cfg_.max_inner_iters, state,
                             [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                               return base + wr * v;
                             });
    total_iters += o.iters;
    return o;
  };
  auto residual = [&](const AdmmState& s) { return (a_ * s.x - yh).norm(); };

  // Bracket: lambda >= lam_max gives x = 0 (residual 1 > eh); shrink lambda
  // until the residual drops below eh.
  double hi = lam_max;
  double lo = 0.0;
  AdmmState feasible;
  bool have_feasible = false;
  double lam = lam_max * 0.5;
  for (int i = 0; i < 16; ++i) {
    run_at(lam, loose, st);
    if (residual(st) <= eh) {
      lo = lam;
      feasible = st;
      have_feasible = true;
      break;
    }
    hi = lam;
    lam *= 1e-2;
  }
  if (!have_feasible) {
    RecoveryResult r = solve_equality(y);
    r.inner_iters += total_iters;
    return r;
  }

  double chosen = lo;
  const double target_lo = eh * (1.0 - cfg_.residual_target_slack);
  if (residual(feasible) < target_lo) {
    for (int i = 0; i < 60 && hi / lo > 1.0 + 1e-10; ++i) {
      const double mid = std::sqrt(lo * hi);
      AdmmState trial = feasible;
      run_at(mid, loose, trial);
      const double res = residual(trial);
      if (res > eh) {
        hi = mid;
      } else {
        lo = mid;
        feasible = trial;
        if (res >= target_lo) break;
      }
    }
    chosen = lo;
  }

  AdmmState final_state = feasible;
  const AdmmOutcome fin = run_at(chosen, cfg_.primal_tol, final_state);
  const bool final_ok = residual(final_state) <= eh;
  const AdmmState& pick = final_ok ? final_state : feasible;
  RecoveryResult r = finish(pick.x * scale, y);
  r.inner_iters = total_iters;
  r.converged = fin.converged && final_ok;
  return r;
}

RecoveryResult AnalysisBasisPursuit::solve(const Eigen::VectorXd& y, double eps) const {
  if (y.size() != a_.rows()) throw ShapeError("y must have one entry per measurement");
  if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
  const Eigen::VectorXd yp = project_to_range(y);
  const double dist = (y - yp).norm();
  if (eps == 0.0) {
    if (dist > 1e-9 * std::max(1.0, y.norm()))
      throw InfeasibleError("A x = y has no solution (y is not in range(A))");
    RecoveryResult r = solve_equality(yp);
    r.residual = (a_ * r.estimate - y).norm();
    return r;
  }
  if (dist > eps) throw InfeasibleError("no x satisfies ||A x - y||_2 <= eps");
  return solve_relaxed(y, eps);
}

RecoveryResult AnalysisBasisPursuit::solve_relaxed(const Eigen::VectorXd& y, double eps) const {
  if (y.size() != a_.rows()) throw ShapeError("y must have one entry per measurement");
  const Eigen::VectorXd yp = project_to_range(y);
  const double dist = (y - yp).norm();
  // ||A x - y||^2 = ||A x - yp||^2 + dist^2, so the ball around y is a ball
  // around yp with the reduced radius below.
  const double inner = eps > dist ? std::sqrt(eps * eps - dist * dist) : 0.0;
  RecoveryResult r;
  if (inner <= 1e-12 * std::max(1.0, yp.norm())) {
    r = solve_equality(yp);
  } else {
    r = solve_ball(yp, inner);
  }
  r.residual = (a_ * r.estimate - y).norm();
  return r;
}

RecoveryResult analysis_basis_pursuit(const MeasurementEnsemble& a, const Eigen::VectorXd& y,
                                      const Frame& frame, double eps, const SolverConfig& cfg) {
  return AnalysisBasisPursuit(a, frame, cfg).solve(y, eps);
}

RecoveryResult pr_l1_analysis(const MeasurementEnsemble& a, const PhaselessObservation& obs,
                              const Frame& frame, const SolverConfig& cfg) {
  obs.validate();
  const Eigen::VectorXd& b = obs.magnitudes;
  if (b.size() != a.rows()) throw ShapeError("observation length must equal measurement count");
  const double eps = obs.noise_budget;
  const AnalysisBasisPursuit abp(a, frame, cfg);
  const Eigen::MatrixXd& am = a.matrix();
  const Eigen::MatrixXd& d = frame.real_matrix();

  auto assess = [&](RecoveryResult r) {
    r.objective = (d.transpose() * r.estimate).lpNorm<1>();
    r.residual = ((am * r.estimate).cwiseAbs() - b).norm();
    return r;
  };

  if (b.norm() == 0.0) {
    RecoveryResult r;
    r.estimate = Eigen::VectorXd::Zero(a.cols());
    r.converged = true;
    return assess(r);
  }

  const double feas_slack = 1e-8 * std::max(1.0, b.norm());
  RecoveryResult best_feasible, best_any;
  bool have_feasible = false, have_any = false;
  int total_inner = 0, total_outer = 0;

  for (int r = 0; r < cfg.restarts; ++r) {
    Eigen::VectorXd start;
    if (r == 0) {
      start = weighted_correlation_init(am, b);
    } else {
      RandomStream rng(cfg.seed ^ static_cast<std::uint64_t>(r), Stream::kRestart);
      Eigen::VectorXd s(b.size());
      for (Eigen::Index j = 0; j < s.size(); ++j) s(j) = rng.sign();
      start = abp.least_squares(s.cwiseProduct(b));
    }
    start = amplitude_flow(am, b, start, cfg.flow_iters, cfg.flow_step, cfg.flow_weight);
    Eigen::VectorXd signs = sign_vector(am * start);

    RecoveryResult cur;
    for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
      cur = abp.solve_relaxed(signs.cwiseProduct(b), eps);
      total_inner += cur.inner_iters;
      ++total_outer;
      const Eigen::VectorXd next = sign_vector(am * cur.estimate);
      if (next == signs) break;
      signs = next;
    }
    cur = assess(cur);
    const bool feasible = cur.residual <= eps + feas_slack;
    if (feasible && (!have_feasible || cur.objective < best_feasible.objective)) {
      best_feasible = cur;
      have_feasible = true;
    }
    if (!have_any || cur.residual < best_any.residual) {
      best_any = cur;
      have_any = true;
    }
  }

  RecoveryResult out = have_feasible ? best_feasible : best_any;
  if (!have_feasible) out.converged = false;
  out.inner_iters = total_inner;
  out.outer_iters = total_outer;
  return out;
}

OracleResult oracle_sign_enumeration(const MeasurementEnsemble& a, const Eigen::VectorXd& b,
                                     const Frame& frame, const OracleOptions& opts) {
  const Eigen::MatrixXd& am = a.matrix();
  const Eigen::MatrixXd& d = frame.real_matrix();
  const int m = a.rows();
  const int n = a.cols();
  if (b.size() != m) throw ShapeError("oracle: b must have one entry per measurement");
  if (d.rows() != n) throw ShapeError("oracle: frame rows must equal signal dimension");
  if ((b.array() < 0.0).any()) throw DomainError("oracle: magnitudes must be nonnegative");

  const double feas_tol = opts.feasibility_tol * std::max(1.0, b.cwiseAbs().maxCoeff());
  struct Candidate {
    Eigen::VectorXd x;
    double objective;
  };
  std::vector<Candidate> feasible;
  OracleResult out;

  const int rank = numerical_rank(am);
  if (rank == n) {
    if (n > opts.max_signal_dim)
      throw BudgetError("oracle: signal dimension exceeds the sign-pattern budget");
    out.method = "row-basis";
    // Pick n well-conditioned independent rows via pivoted QR of A^T.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(am.transpose());
    std::vector<int> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[i] = qr.colsPermutation().indices()(i);
    const Eigen::MatrixXd ab = select_rows(am, rows);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(ab);
    Eigen::VectorXd bb(n);
    for (int i = 0; i < n; ++i) bb(i) = b(rows[i]);
    const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      Eigen::VectorXd rhs = bb;
      for (int i = 1; i < n; ++i)
        if (mask & (std::uint64_t{1} << (i - 1))) rhs(i) = -rhs(i);
      ++out.patterns_checked;
      const Eigen::VectorXd x = lu.solve(rhs);
      if (((am * x).cwiseAbs() - b).cwiseAbs().maxCoeff() > feas_tol) continue;
      ++out.feasible_patterns;
      feasible.push_back({x, (d.transpose() * x).lpNorm<1>()});
    }
  } else {
    if (m > opts.max_measurements)
      throw BudgetError("oracle: measurement count exceeds the sign-pattern budget");
    out.method = "full-sign";
    Eigen::MatrixXd pinv;
    if (m > 0) {
      pinv = am.completeOrthogonalDecomposition().pseudoInverse();
    } else {
      pinv = Eigen::MatrixXd::Zero(n, 0);
    }
    const Eigen::MatrixXd z = null_space(am);
    const Eigen::MatrixXd dz = d.transpose() * z;
    const std::uint64_t patterns = m == 0 ? 1 : (std::uint64_t{1} << (m - 1));
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      Eigen::VectorXd y = b;
      for (int j = 1; j < m; ++j)
        if (mask & (std::uint64_t{1} << (j - 1))) y(j) = -y(j);
      ++out.patterns_checked;
      const Eigen::VectorXd xp = pinv * y;
      if (m > 0 && (am * xp - y).cwiseAbs().maxCoeff() > feas_tol) continue;
      ++out.feasible_patterns;
      const L1FitResult fit = minimize_l1_affine(dz, d.transpose() * xp);
      const Eigen::VectorXd x = xp + z * fit.w;
      feasible.push_back({x, (d.transpose() * x).lpNorm<1>()});
    }
  }
  if (feasible.empty()) throw InfeasibleError("oracle: no sign pattern is consistent with b");

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : feasible) best = std::min(best, c.objective);
  const double tie = opts.tie_tol * std::max(1.0, best);
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    const auto& c = feasible[i];
    if (c.objective == best && out.minimizers.empty()) best_idx = i;
    if (c.objective > best + tie) continue;
    const double dedupe = 1e-7 * std::max(1.0, c.x.norm());
    const bool seen = std::any_of(out.minimizers.begin(), out.minimizers.end(),
                                  [&](const Eigen::VectorXd& v) { return distance_mod_sign(v, c.x) <= dedupe; });
    if (!seen) out.minimizers.push_back(c.x);
  }
  const Eigen::VectorXd& xb = feasible[best_idx].x;
  out.best.estimate = xb;
  out.best.objective = feasible[best_idx].objective;
  out.best.residual = ((am * xb).cwiseAbs() - b).norm();
  out.best.converged = true;
  // Keep the exact minimizer first in the list.
  for (std::size_t i = 0; i < out.minimizers.size(); ++i) {
    if (distance_mod_sign(out.minimizers[i], xb) <= 1e-7 * std::max(1.0, xb.norm())) {
      std::swap(out.minimizers[0], out.minimizers[i]);
      break;
    }
  }
  return out;
}

}  // namespace dictphase
