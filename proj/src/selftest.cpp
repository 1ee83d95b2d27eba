#include "dictphase/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dictphase/errors.hpp"
#include "dictphase/lemmas.hpp"
#include "dictphase/rng.hpp"

namespace dictphase {

namespace {

int polytope_round_trips(int trials, std::uint64_t seed, Json& failures) {
  RandomStream rng(derive_seed(seed, {1}), Stream::kProbe);
  int bad = 0;
  for (int i = 0; i < trials; ++i) {
    const int len = 1 + static_cast<int>(rng.uniform_int(10));
    const int support = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(len)));
    const double alpha = 0.1 + 2.0 * rng.uniform();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(len);
    for (int j : rng.subset(len, support)) v(j) = rng.sign() * alpha * rng.uniform();
    const int s_min = static_cast<int>(std::ceil(v.lpNorm<1>() / alpha - 1e-12));
    const int s = std::max(s_min, 1) + static_cast<int>(rng.uniform_int(3));
    const PolytopeCheck chk = polytope_verify(v, alpha, s, polytope_decompose(v, alpha, s));
    if (!chk.ok) {
      ++bad;
      if (failures.size() < 10) failures.push_back(Json{{"v", vector_to_json(v)}, {"alpha", alpha}, {"s", s}, {"clause", chk.clause}});
    }
  }
  return bad;
}

int power_sums(int trials, std::uint64_t seed, Json& failures) {
  RandomStream rng(derive_seed(seed, {2}), Stream::kProbe);
  const double alphas[] = {1.0, 1.5, 2.0, 3.0};
  int bad = 0;
  for (int i = 0; i < trials; ++i) {
    const int len = 2 + static_cast<int>(rng.uniform_int(11));
    Eigen::VectorXd a(len);
    for (int j = 0; j < len; ++j) a(j) = rng.uniform();
    std::sort(a.data(), a.data() + len, std::greater<>());
    int r = 1;
    while (r < len && a.head(r).sum() < a.tail(len - r).sum()) ++r;
    const double alpha = alphas[i % 4];
    if (!power_sum_check(a, r, alpha)) {
      ++bad;
      if (failures.size() < 10) failures.push_back(Json{{"a", vector_to_json(a)}, {"r", r}, {"alpha", alpha}});
    }
  }
  return bad;
}

void lemma_trials(int trials, std::uint64_t seed, SelftestReport& rep) {
  const int n = 6, big_n = 9, k = 1, m = 24;
  const double t = 2.0;
  RandomStream rng(derive_seed(seed, {3}), Stream::kProbe);
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = derive_seed(seed, {4, static_cast<std::uint64_t>(i)});
    const Frame frame = make_random_tight_frame(n, big_n, s);
    const MeasurementEnsemble raw = gaussian_ensemble(m, n, s);
    const DripReport dr = drip_exact(raw, frame, 2);
    const double c = std::sqrt(2.0 / (dr.lambda_min + dr.lambda_max));
    const MeasurementEnsemble a = raw.scaled(c);
    const double delta = (dr.lambda_max - dr.lambda_min) / (dr.lambda_max + dr.lambda_min) + 1e-12;
    if (!(delta < std::sqrt((t - 1.0) / t))) {
      ++rep.lemma_refused;
      continue;
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(big_n);
    z(static_cast<Eigen::Index>(rng.uniform_int(big_n))) = rng.normal();
    const Eigen::VectorXd x0 = synthesize(frame, z);
    const double eps = 0.1 * rng.uniform();
    const double rho = 0.1 * rng.uniform();
    Eigen::VectorXd h(n);
    for (int j = 0; j < n; ++j) h(j) = rng.normal();
    h *= eps * rng.uniform() / std::max(1e-300, (a.matrix() * h).norm());
    const double obj0 = analyze(frame, x0).lpNorm<1>();
    while (analyze(frame, Eigen::VectorXd(x0 + h)).lpNorm<1>() > obj0 + rho) h *= 0.5;
    try {
      const LemmaBoundCheck chk = check_lemma_bound(a, frame, x0, x0 + h, rho, eps, t, delta, k);
      if (!chk.holds) ++rep.lemma_failures;
    } catch (const PreconditionError&) {
      ++rep.lemma_refused;
    }
  }
}

}  // namespace

SelftestReport run_selftest(const SelftestOptions& opts) {
  SelftestReport rep;
  Json poly_fail = Json::array(), power_fail = Json::array();
  rep.polytope_failures = polytope_round_trips(opts.polytope_trials, opts.seed, poly_fail);
  rep.power_sum_failures = power_sums(opts.power_sum_trials, opts.seed, power_fail);
  lemma_trials(opts.lemma_trials, opts.seed, rep);
  rep.details = Json{{"polytope", {{"trials", opts.polytope_trials}, {"failures", rep.polytope_failures}, {"examples", poly_fail}}},
                     {"power_sum", {{"trials", opts.power_sum_trials}, {"failures", rep.power_sum_failures}, {"examples", power_fail}}},
                     {"lemma_bound",
                      {{"trials", opts.lemma_trials}, {"failures", rep.lemma_failures}, {"refused", rep.lemma_refused}}},
                     {"seed", opts.seed},
                     {"passed", rep.passed()}};
  return rep;
}

}  // namespace dictphase
