#include "dictphase/nsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dictphase/errors.hpp"
#include "dictphase/linalg.hpp"
#include "dictphase/rng.hpp"
#include "dictphase/solver.hpp"

namespace dictphase {

std::string to_string(NspStatus s) {
  switch (s) {
    case NspStatus::kHoldsOnTestedFamily:
      return "holds-on-tested-family";
    case NspStatus::kCounterexample:
      return "counterexample";
    case NspStatus::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

RealAmbiguity nsp_real_counterexample_to_failure(const MeasurementEnsemble& a,
                                                 const Eigen::VectorXd& u,
                                                 const Eigen::VectorXd& v) {
  if (u.size() != a.cols() || v.size() != a.cols())
    throw ShapeError("u and v must have one entry per column of A");
  const Eigen::VectorXd au = a.matrix() * u;
  const Eigen::VectorXd av = a.matrix() * v;
  const double tol = 1e-10 * std::max(1.0, a.matrix().norm() * (u.norm() + v.norm()));
  RealAmbiguity out;
  for (int j = 0; j < a.rows(); ++j) {
    if (std::abs(au(j)) <= std::abs(av(j))) {
      if (std::abs(au(j)) > tol)
        throw PreconditionError("null-space", "u is not in N(A_T) for any T compatible with v");
      out.t.push_back(j);
    } else if (std::abs(av(j)) > tol) {
      throw PreconditionError("null-space", "v is not in N(A_{T^c}) for any T compatible with u");
    }
  }
  out.x0 = u + v;
  out.x_tilde = u - v;
  return out;
}

namespace {

constexpr double kGapRelTol = 1e-10;
constexpr double kPartTol = 1e-9;
constexpr int kProbes = 64;
constexpr int kClimbSteps = 200;
constexpr int kHarvestDraws = 32;

struct Gap {
  double value = 0.0;
  double scale = 0.0;
  bool counter() const { return scale > 0.0 && value >= -kGapRelTol * scale; }
};

Gap gap_of(const Eigen::MatrixXd& dt, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double p = (dt * (u + v)).lpNorm<1>();
  const double q = (dt * (u - v)).lpNorm<1>();
  return {p - q, p + q};
}

enum class Decision { kNone, kFound, kUndecided };

struct PairProblem {
  const Eigen::MatrixXd& u_basis;
  const Eigen::MatrixXd& v_basis;
  const Eigen::MatrixXd& dt;
};

struct Found {
  Eigen::VectorXd u, v;
  bool exact = true;
};

// Orthonormal basis of the (a, b) coordinates of null([U V -D_S]).
Eigen::MatrixXd coefficient_subspace(const PairProblem& pp, const Eigen::MatrixXd& ds) {
  const Eigen::Index p = pp.u_basis.cols();
  const Eigen::Index q = pp.v_basis.cols();
  const Eigen::Index n = pp.u_basis.rows();
  Eigen::MatrixXd m(n, p + q + ds.cols());
  m << pp.u_basis, pp.v_basis, -ds;
  const Eigen::MatrixXd l = null_space(m);
  if (l.cols() == 0) return Eigen::MatrixXd(p + q, 0);
  const Eigen::MatrixXd w = l.topRows(p + q);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kPartTol) ++r;
  return svd.matrixU().leftCols(r);
}

class PairDecider {
 public:
  PairDecider(const PairProblem& pp, RandomStream& rng) : pp_(pp), rng_(rng) {}

  Decision decide(const Eigen::MatrixXd& w, Found& out) {
    const Eigen::Index p = pp_.u_basis.cols();
    const Eigen::Index dim = w.cols();
    if (dim == 0) return Decision::kNone;
    if (w.topRows(p).norm() <= kPartTol || w.bottomRows(w.rows() - p).norm() <= kPartTol)
      return Decision::kNone;

    Eigen::MatrixXd rw = w;
    rw.bottomRows(w.rows() - p) *= -1.0;
    if ((rw - w * (w.transpose() * rw)).norm() <= kPartTol) {
      // Reflection b -> -b flips the sign of the gap, so one of the pair wins.
      for (int attempt = 0; attempt < 16; ++attempt) {
        const Eigen::VectorXd c = w * random_vector(dim);
        if (!good(c)) continue;
        Eigen::VectorXd r = c;
        r.tail(r.size() - p) *= -1.0;
        return accept(gap(c).counter() ? c : r, true, out);
      }
    }
    if (dim == 1) {
      const Eigen::VectorXd c = w.col(0);
      if (good(c) && gap(c).counter()) return accept(c, true, out);
      return Decision::kNone;
    }
    if (dim == 2) return scan_plane(w, out);
    return search(w, out);
  }

 private:
  Eigen::VectorXd random_vector(Eigen::Index d) {
    Eigen::VectorXd g(d);
    for (Eigen::Index i = 0; i < d; ++i) g(i) = rng_.normal();
    return g;
  }

  bool good(const Eigen::VectorXd& c) const {
    const Eigen::Index p = pp_.u_basis.cols();
    const double nc = c.norm();
    return c.head(p).norm() > kPartTol * nc && c.tail(c.size() - p).norm() > kPartTol * nc;
  }

  Gap gap(const Eigen::VectorXd& c) const {
    const Eigen::Index p = pp_.u_basis.cols();
    return gap_of(pp_.dt, pp_.u_basis * c.head(p), pp_.v_basis * c.tail(c.size() - p));
  }

  Decision accept(const Eigen::VectorXd& c, bool exact, Found& out) const {
    const Eigen::Index p = pp_.u_basis.cols();
    out.u = pp_.u_basis * c.head(p);
    out.v = pp_.v_basis * c.tail(c.size() - p);
    out.exact = exact;
    return Decision::kFound;
  }

  // The gap is piecewise linear on the plane with kinks on finitely many
  // lines; checking every kink ray and the sectors between them is exact.
  Decision scan_plane(const Eigen::MatrixXd& w, Found& out) {
    const Eigen::Index p = pp_.u_basis.cols();
    const Eigen::Index q = w.rows() - p;
    Eigen::MatrixXd plus(pp_.dt.rows(), p + q), minus(pp_.dt.rows(), p + q);
    plus << pp_.dt * pp_.u_basis, pp_.dt * pp_.v_basis;
    minus << pp_.dt * pp_.u_basis, -(pp_.dt * pp_.v_basis);
    std::vector<double> angles{0.0, std::numbers::pi / 2};
    auto add_line = [&](const Eigen::RowVectorXd& f) {
      const double c1 = f.dot(w.col(0));
      const double c2 = f.dot(w.col(1));
      if (std::abs(c1) + std::abs(c2) <= 1e-14 * f.norm()) return;
      double th = std::atan2(-c1, c2);
      if (th < 0.0) th += std::numbers::pi;
      if (th >= std::numbers::pi) th -= std::numbers::pi;
      angles.push_back(th);
    };
    for (Eigen::Index i = 0; i < plus.rows(); ++i) {
      add_line(plus.row(i));
      add_line(minus.row(i));
    }
    for (Eigen::Index i = 0; i < p + q; ++i) add_line(Eigen::RowVectorXd::Unit(p + q, i));
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());

    auto ray = [&](double th) -> Eigen::VectorXd { return std::cos(th) * w.col(0) + std::sin(th) * w.col(1); };
    for (double th : angles) {
      const Eigen::VectorXd c = ray(th);
      if (good(c) && gap(c).counter()) return accept(c, true, out);
    }
    // Remaining case: the gap is positive only at rays where u or v vanishes.
    const std::size_t na = angles.size();
    for (std::size_t i = 0; i < na; ++i) {
      const double lo = angles[i];
      const double hi = i + 1 < na ? angles[i + 1] : angles[0] + std::numbers::pi;
      for (const auto& [from, to] : {std::pair{lo, hi}, std::pair{hi, lo}}) {
        const Gap g = gap(ray(from));
        if (!(g.value > kGapRelTol * g.scale)) continue;
        double step = 0.5;
        for (int j = 0; j < 60; ++j, step *= 0.5) {
          const Eigen::VectorXd c = ray(from + (to - from) * step);
          if (good(c) && gap(c).counter()) return accept(c, true, out);
        }
      }
    }
    return Decision::kNone;
  }

  Decision search(const Eigen::MatrixXd& w, Found& out) {
    const Eigen::Index dim = w.cols();
    Eigen::VectorXd best_g;
    double best = -std::numeric_limits<double>::infinity();
    auto score = [&](const Eigen::VectorXd& g) {
      const Eigen::VectorXd c = w * g;
      if (!good(c)) return -std::numeric_limits<double>::infinity();
      const Gap gp = gap(c);
      return gp.scale > 0.0 ? gp.value / gp.scale : -std::numeric_limits<double>::infinity();
    };
    for (int i = 0; i < kProbes; ++i) {
      Eigen::VectorXd g = random_vector(dim).normalized();
      const double s = score(g);
      if (s >= -kGapRelTol) return accept(w * g, false, out);
      if (s > best) {
        best = s;
        best_g = g;
      }
    }
    if (best_g.size() == 0) return Decision::kUndecided;
    double step = 0.5;
    for (int i = 0; i < kClimbSteps && step > 1e-6; ++i) {
      const Eigen::VectorXd g = (best_g + step * random_vector(dim)).normalized();
      const double s = score(g);
      if (s >= -kGapRelTol) return accept(w * g, false, out);
      if (s > best) {
        best = s;
        best_g = g;
      } else {
        step *= 0.95;
      }
    }
    return Decision::kUndecided;
  }

  const PairProblem& pp_;
  RandomStream& rng_;
};

std::optional<bool> oracle_confirms(const MeasurementEnsemble& a, const Frame& frame,
                                    const Eigen::VectorXd& x0) {
  try {
    const Eigen::VectorXd b = phaseless_forward(a, x0);
    const OracleResult o = oracle_sign_enumeration(a, b, frame);
    const double obj0 = analyze(frame, x0).lpNorm<1>();
    if (o.best.objective < obj0 - 1e-9 * std::max(1.0, obj0)) return true;
    for (const auto& x : o.minimizers)
      if (distance_mod_sign(x, x0) > 1e-6 * std::max(1.0, x0.norm())) return true;
    return false;
  } catch (const BudgetError&) {
    return std::nullopt;
  }
}

// Re-verifies a candidate and fills the derived fields; false if it fails.
bool finalize_witness(const MeasurementEnsemble& a, const Frame& frame, int k, RealNspWitness& w) {
  const double scale = (w.u + w.v).norm();
  if (scale == 0.0 || w.u.norm() == 0.0 || w.v.norm() == 0.0) return false;
  w.u /= scale;
  w.v /= scale;
  const Gap g = gap_of(frame.real_matrix().transpose(), w.u, w.v);
  if (!g.counter()) return false;
  w.gap = g.value;
  const RealMembership mem = is_in_d_sigma_k(frame, Eigen::VectorXd(w.u + w.v), k);
  if (!mem.member()) return false;
  w.support = mem.support;
  try {
    w.t = nsp_real_counterexample_to_failure(a, w.u, w.v).t;
  } catch (const PreconditionError&) {
    return false;
  }
  w.oracle_confirmed = oracle_confirms(a, frame, w.u + w.v);
  return true;
}

}  // namespace

NspVerdict nsp_real_check(const MeasurementEnsemble& a, const Frame& frame, int k,
                          std::uint64_t budget, std::uint64_t seed) {
  if (!frame.is_real()) throw DomainError("nsp_real_check requires a real frame");
  if (a.cols() != frame.rows()) throw ShapeError("ensemble columns must equal frame rows");
  if (k < 0) throw DomainError("k must be nonnegative");
  NspVerdict verdict;
  const int m = a.rows();
  const int big_n = frame.cols();
  const int kk = std::min(k, big_n);
  if (kk == 0) {
    // Only u + v = 0 qualifies, where the gap is -2 ||D^T u||_1 < 0.
    verdict.status = NspStatus::kHoldsOnTestedFamily;
    return verdict;
  }
  const Eigen::MatrixXd& d = frame.real_matrix();
  const Eigen::MatrixXd dt = d.transpose();
  const Eigen::MatrixXd& am = a.matrix();
  RandomStream rng(seed, Stream::kProbe);

  const std::uint64_t n_supports = binomial(big_n, kk);
  const bool enumerable = m < 63 && n_supports <= budget;
  bool exhausted = false;
  if (enumerable) {
    std::vector<Eigen::MatrixXd> ds;
    std::vector<std::vector<int>> supports;
    for_each_combination(big_n, kk, [&](std::span<const int> s) {
      supports.emplace_back(s.begin(), s.end());
      ds.push_back(select_cols(d, s));
      return true;
    });
    const std::uint64_t n_sets = m == 0 ? 1 : (std::uint64_t{1} << (m - 1));
    verdict.pairs_total = n_sets > UINT64_MAX / n_supports ? UINT64_MAX : n_sets * n_supports;
    for (std::uint64_t idx = 0; idx < n_sets && !exhausted; ++idx) {
      const std::uint64_t mask = m == 0 ? 0 : ((idx << 1) | 1);
      const std::vector<int> t = mask_to_indices(mask, m);
      const std::vector<int> tc = complement(t, m);
      const Eigen::MatrixXd u_basis = null_space(select_rows(am, t));
      const Eigen::MatrixXd v_basis = null_space(select_rows(am, tc));
      if (u_basis.cols() == 0 || v_basis.cols() == 0) {
        verdict.pairs_decided += n_supports;
        verdict.trials += 1;
        continue;
      }
      const PairProblem pp{u_basis, v_basis, dt};
      PairDecider decider(pp, rng);
      for (std::size_t s = 0; s < ds.size(); ++s) {
        if (verdict.trials >= budget) {
          exhausted = true;
          break;
        }
        ++verdict.trials;
        Found found;
        const Decision dec = decider.decide(coefficient_subspace(pp, ds[s]), found);
        if (dec == Decision::kNone) {
          ++verdict.pairs_decided;
        } else if (dec == Decision::kFound) {
          RealNspWitness w;
          w.u = found.u;
          w.v = found.v;
          w.source = found.exact ? "exact" : "search";
          if (finalize_witness(a, frame, k, w)) {
            verdict.witness = std::move(w);
            verdict.status = NspStatus::kCounterexample;
            return verdict;
          }
        }
      }
    }
  }
  const bool all_decided = enumerable && !exhausted && verdict.pairs_decided == verdict.pairs_total;
  if (all_decided) {
    verdict.status = NspStatus::kHoldsOnTestedFamily;
    return verdict;
  }

  // Oracle harvest: a second minimizer x^ for b = |A x0| gives u = x0 + x^,
  // v = x0 - x^.
  for (int i = 0; i < kHarvestDraws && verdict.trials < budget; ++i) {
    ++verdict.trials;
    const std::vector<int> s = rng.subset(big_n, kk);
    Eigen::VectorXd z(kk);
    for (int j = 0; j < kk; ++j) z(j) = rng.normal();
    const Eigen::VectorXd x0 = select_cols(d, s) * z;
    if (x0.norm() == 0.0) continue;
    OracleResult o;
    try {
      o = oracle_sign_enumeration(a, phaseless_forward(a, x0), frame);
    } catch (const BudgetError&) {
      break;
    }
    for (const auto& xh : o.minimizers) {
      if (distance_mod_sign(xh, x0) <= 1e-6 * x0.norm()) continue;
      RealNspWitness w;
      w.u = x0 + xh;
      w.v = x0 - xh;
      w.source = "oracle";
      if (finalize_witness(a, frame, k, w)) {
        verdict.witness = std::move(w);
        verdict.status = NspStatus::kCounterexample;
        return verdict;
      }
    }
  }
  verdict.status = NspStatus::kInconclusive;
  return verdict;
}

ComplexNspCheck nsp_complex_check_tuple(const Frame& frame, const ComplexNspTuple& tuple,
                                        const Eigen::MatrixXcd& a, int k) {
  const std::size_t p = tuple.partition.size();
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (p < 2 || tuple.eta.size() != p || tuple.c.size() != p)
    throw PreconditionError("shape", "partition, eta and c must have the same length p >= 2");
  if (frame.rows() != n) throw PreconditionError("shape", "frame rows must equal columns of A");
  for (const auto& e : tuple.eta)
    if (e.size() != n) throw PreconditionError("shape", "every eta_j must have n entries");

  std::vector<int> seen(static_cast<std::size_t>(m), 0);
  for (const auto& part : tuple.partition)
    for (int j : part) {
      if (j < 0 || j >= m) throw PreconditionError("partition", "row index out of range");
      if (seen[j]++) throw PreconditionError("partition", "parts are not disjoint");
    }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw PreconditionError("partition", "parts do not cover every row");

  for (const auto& c : tuple.c)
    if (std::abs(std::abs(c) - 1.0) > 1e-12) throw PreconditionError("unimodular", "|c_j| != 1");
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = j + 1; l < p; ++l)
      if (std::abs(tuple.c[j] - tuple.c[l]) <= 1e-12)
        throw PreconditionError("distinct", "c_j are not pairwise distinct");

  const double anorm = a.norm();
  for (std::size_t j = 0; j < p; ++j) {
    const Eigen::MatrixXcd as = select_rows(a, tuple.partition[j]);
    if (as.rows() == 0) continue;
    if ((as * tuple.eta[j]).norm() > 1e-10 * std::max(1.0, anorm * tuple.eta[j].norm()))
      throw PreconditionError("null-space", "eta_j is not in N(A_{S_j})");
  }

  const Eigen::VectorXcd ratio = (tuple.eta[0] - tuple.eta[1]) / (tuple.c[0] - tuple.c[1]);
  for (std::size_t l = 2; l < p; ++l) {
    const Eigen::VectorXcd r = (tuple.eta[0] - tuple.eta[l]) / (tuple.c[0] - tuple.c[l]);
    if ((r - ratio).norm() > 1e-10 * std::max(1.0, ratio.norm()))
      throw PreconditionError("ratio-constant", "(eta_1 - eta_l) / (c_1 - c_l) depends on l");
  }
  if (ratio.norm() == 0.0 || !is_in_d_sigma_k(frame, ratio, k).member())
    throw PreconditionError("ratio-membership", "the common ratio is not in D Sigma_k \\ {0}");

  ComplexNspCheck out;
  for (std::size_t j = 0; j < p && out.holds; ++j)
    for (std::size_t l = j + 1; l < p; ++l) {
      const double lhs = l1_norm(analyze(frame, Eigen::VectorXcd(tuple.eta[j] - tuple.eta[l])));
      const double rhs = l1_norm(
          analyze(frame, Eigen::VectorXcd(tuple.c[l] * tuple.eta[j] - tuple.c[j] * tuple.eta[l])));
      if (!(lhs < rhs - 1e-12 * std::max(lhs, rhs))) {
        out.holds = false;
        out.violating_pair = std::pair<int, int>(static_cast<int>(j), static_cast<int>(l));
        break;
      }
    }
  return out;
}

ComplexAmbiguity nsp_complex_counterexample_to_failure(const ComplexNspTuple& tuple,
                                                       const Eigen::MatrixXcd& a, int j0, int l0) {
  const int p = static_cast<int>(tuple.eta.size());
  if (j0 < 0 || l0 < 0 || j0 >= p || l0 >= p || j0 == l0 ||
      static_cast<int>(tuple.c.size()) != p)
    throw PreconditionError("shape", "j0 and l0 must be distinct tuple indices");
  ComplexAmbiguity out;
  out.x0 = tuple.eta[j0] - tuple.eta[l0];
  out.x_tilde = tuple.c[l0] * tuple.eta[j0] - tuple.c[j0] * tuple.eta[l0];
  const Eigen::VectorXd m0 = (a * out.x0).cwiseAbs();
  const Eigen::VectorXd m1 = (a * out.x_tilde).cwiseAbs();
  const double tol = 1e-9 * std::max(1.0, a.norm() * out.x0.norm());
  if ((m0 - m1).cwiseAbs().maxCoeff() > tol)
    throw PreconditionError("magnitudes", "|A x0| and |A x~| differ");
  const std::complex<double> inner = out.x0.dot(out.x_tilde);
  const std::complex<double> phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : 1.0;
  if ((out.x_tilde - phase * out.x0).norm() <= 1e-9 * std::max(1.0, out.x0.norm()))
    throw PreconditionError("trivial", "x~ is a unimodular multiple of x0");
  return out;
}

}  // namespace dictphase
