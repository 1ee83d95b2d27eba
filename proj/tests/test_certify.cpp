#include <gtest/gtest.h>

#include "dictphase/certify.hpp"
#include "test_util.hpp"

using namespace dictphase;

namespace {

// Classical RIP constant for D = I by eigen-extremes of every principal
// k x k block of A^T A.
double naive_rip(const Eigen::MatrixXd& a, int k) {
  const Eigen::MatrixXd g = a.transpose() * a;
  double best = 0.0;
  for_each_combination(static_cast<int>(a.cols()), k, [&](std::span<const int> s) {
    Eigen::MatrixXd sub(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = g(s[i], s[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
    best = std::max({best, 1.0 - eig.eigenvalues()(0), eig.eigenvalues()(k - 1) - 1.0});
    return true;
  });
  return best;
}

Eigen::MatrixXd orthogonal(int n, std::uint64_t seed) {
  return make_random_tight_frame(n, n, seed).real_matrix();
}

}  // namespace

TEST(Drip, OrthogonalEnsembleIsIsometry) {
  const MeasurementEnsemble a(orthogonal(4, 3));
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(drip_exact(a, make_identity_frame(4), k).delta, 0.0, 1e-12);
}

TEST(Drip, ScaledIdentity) {
  const MeasurementEnsemble a(Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(3, 3)));
  const auto r = drip_exact(a, make_identity_frame(3), 2);
  EXPECT_NEAR(r.delta, 3.0, 1e-12);
  EXPECT_EQ(r.supports_checked, 3u);
}

TEST(Drip, MatchesClassicalRipForIdentityFrame) {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 5;
    const int k = 1 + trial % 3;
    const auto a = testutil::scaled_gaussian(2 * n, n, trial);
    EXPECT_NEAR(drip_exact(a, make_identity_frame(n), k).delta, naive_rip(a.matrix(), k), 1e-10);
  }
}

TEST(Drip, MonteCarloIsLowerBound) {
  const auto a = testutil::scaled_gaussian(6, 4, 21);
  const Frame f = make_random_tight_frame(4, 6, 21);
  const auto exact = drip_exact(a, f, 1);
  const auto mc = drip_montecarlo(a, f, 1, 10000, 5);
  EXPECT_EQ(mc.method, DripMethod::kMonteCarloLowerBound);
  EXPECT_LE(mc.delta, exact.delta + 1e-12);
  // For k = 1 every support is a ray, so sampling the argmax support is exact.
  EXPECT_LE(exact.delta - mc.delta, 1e-9);
}

TEST(Drip, MonotoneInOrder) {
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = testutil::scaled_gaussian(8, 4, trial);
    const Frame f = make_random_tight_frame(4, 6, trial);
    double prev = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double d = drip_exact(a, f, k).delta;
      EXPECT_GE(d, prev - 1e-12);
      prev = d;
    }
  }
}

TEST(Drip, Budget) {
  const auto a = testutil::scaled_gaussian(8, 4, 1);
  EXPECT_THROW(drip_exact(a, make_random_tight_frame(4, 30, 1), 5, 1000), BudgetError);
}

TEST(Sdrip, IdentityEnsembleFails) {
  const MeasurementEnsemble a(Eigen::MatrixXd::Identity(4, 4));
  const auto r = sdrip_exact(a, make_identity_frame(4), 1);
  EXPECT_NEAR(r.theta_minus, 0.0, 1e-15);
  EXPECT_FALSE(r.satisfied);
  ASSERT_TRUE(r.witness_subset.has_value());
  // The witness misses the coordinate of the extreme support.
  for (int j : *r.witness_subset) EXPECT_NE(j, r.extreme_support[0]);
}

TEST(Sdrip, DuplicatedOrthogonalRows) {
  const Eigen::MatrixXd g = orthogonal(3, 4);
  Eigen::MatrixXd am(6, 3);
  am << g, g;
  const MeasurementEnsemble a(am);
  const auto r = sdrip_exact(a, make_identity_frame(3), 1);
  // Either copy alone is an isometry, the full stack doubles the energy.
  const std::vector<int> first = {0, 1, 2};
  EXPECT_NEAR(drip_exact(row_restrict(a, first), make_identity_frame(3), 3).delta, 0.0, 1e-12);
  EXPECT_NEAR(r.theta_plus, 2.0, 1e-12);
  EXPECT_FALSE(r.satisfied);
  const auto naive = testutil::naive_sdrip(am, Eigen::MatrixXd::Identity(3, 3), 1);
  EXPECT_NEAR(r.theta_minus, naive.first, 1e-10);
}

TEST(Sdrip, GaussianTenByFour) {
  const auto a = testutil::scaled_gaussian(10, 4, 17);
  const Frame f = make_random_tight_frame(4, 6, 17);
  const auto r = sdrip_exact(a, f, 1);
  EXPECT_EQ(r.subsets_checked, 252u);
  EXPECT_GT(r.theta_minus, 0.0);
  EXPECT_LE(r.theta_minus, r.theta_plus);
}

TEST(Sdrip, MatchesNaiveEnumeration) {
  for (int trial = 0; trial < 6; ++trial) {
    const int m = 4 + trial;
    const auto a = testutil::scaled_gaussian(m, 3, 60 + trial);
    const Frame f = make_random_tight_frame(3, 5, 60 + trial);
    for (int k = 1; k <= 2; ++k) {
      const auto r = sdrip_exact(a, f, k);
      const auto naive = testutil::naive_sdrip(a.matrix(), f.real_matrix(), k);
      EXPECT_NEAR(r.theta_minus, naive.first, 1e-10);
      EXPECT_NEAR(r.theta_plus, naive.second, 1e-10);
    }
  }
}

TEST(Sdrip, EnvelopeWidensWithOrder) {
  const auto a = testutil::scaled_gaussian(8, 4, 5);
  const Frame f = make_random_tight_frame(4, 6, 5);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const auto r = sdrip_exact(a, f, k);
    EXPECT_LE(r.theta_minus, lo + 1e-12);
    EXPECT_GE(r.theta_plus, hi - 1e-12);
    lo = r.theta_minus;
    hi = r.theta_plus;
  }
}

TEST(Sdrip, SubsetMonotonicity) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = testutil::scaled_gaussian(8, 4, trial);
    const Eigen::VectorXd x = testutil::random_vector(4, trial);
    const std::vector<int> small = {1, 4};
    const std::vector<int> big = {0, 1, 4, 6};
    EXPECT_LE((row_restrict(a, small).matrix() * x).squaredNorm(),
              (row_restrict(a, big).matrix() * x).squaredNorm());
  }
}

TEST(Sdrip, MonteCarloSitsInsideExactInterval) {
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = testutil::scaled_gaussian(8, 4, 30 + trial);
    const Frame f = make_random_tight_frame(4, 6, 30 + trial);
    const auto exact = sdrip_exact(a, f, 1);
    const auto mc = sdrip_montecarlo(a, f, 1, 2000, trial);
    EXPECT_EQ(mc.method, SdripMethod::kMonteCarlo);
    EXPECT_GE(mc.theta_minus, exact.theta_minus - 1e-12);
    EXPECT_LE(mc.theta_plus, exact.theta_plus + 1e-12);
  }
}

TEST(Sdrip, MonteCarloDeterministicAndInconclusive) {
  const auto a = testutil::scaled_gaussian(8, 4, 1);
  const Frame f = make_random_tight_frame(4, 6, 1);
  const auto r1 = sdrip_montecarlo(a, f, 1, 100, 9);
  const auto r2 = sdrip_montecarlo(a, f, 1, 100, 9);
  EXPECT_EQ(r1.theta_minus, r2.theta_minus);
  EXPECT_EQ(r1.theta_plus, r2.theta_plus);
  EXPECT_EQ(r1.extreme_subset, r2.extreme_subset);
  const auto r0 = sdrip_montecarlo(a, f, 1, 0, 9);
  EXPECT_EQ(r0.method, SdripMethod::kInconclusive);
  EXPECT_FALSE(r0.satisfied);
}

TEST(AdmissibleT, Examples) {
  EXPECT_DOUBLE_EQ(admissible_t(1.0, 1.0), 1.0);
  EXPECT_NEAR(admissible_t(0.5, 1.5), 4.0 / 3.0, 1e-15);
  for (double th = 0.1; th < 1.0; th += 0.1) EXPECT_NEAR(admissible_t(th, 2 - th), admissible_t(th, th), 1e-12);
  EXPECT_THROW(admissible_t(0.0, 1.0), DomainError);
  EXPECT_THROW(admissible_t(1.0, 2.0), DomainError);
}

TEST(StabilityConstants, ZeroDelta) {
  const auto c = stability_constants(0.0, 2.0);
  EXPECT_NEAR(c.c1, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c.c2, 1.0, 1e-15);
}

TEST(StabilityConstants, ReferenceValues) {
  const auto c = stability_constants(0.2, 2.0);
  EXPECT_NEAR(c.c1, 2.1601862874859779, 1e-12);
  EXPECT_NEAR(c.c2, 1.7229476811767498, 1e-12);
}

TEST(StabilityConstants, IncreaseInDelta) {
  for (double t : {1.5, 2.0, 4.0}) {
    const double limit = std::sqrt((t - 1) / t);
    StabilityConstants prev = stability_constants(0.0, t);
    for (int i = 1; i < 100; ++i) {
      const auto c = stability_constants(limit * i / 100.0, t);
      EXPECT_GT(c.c1, prev.c1);
      EXPECT_GT(c.c2, prev.c2);
      EXPECT_GE(c.c2, 1.0);
      prev = c;
    }
    EXPECT_GT(stability_constants(limit * (1 - 1e-9), t).c1, 1e6);
  }
}

TEST(StabilityConstants, DomainErrors) {
  EXPECT_THROW(stability_constants(0.1, 1.0), DomainError);
  EXPECT_THROW(stability_constants(std::sqrt(0.5), 2.0), DomainError);
  EXPECT_THROW(stability_constants(-0.1, 2.0), DomainError);
}

TEST(ErrorBound, Examples) {
  const auto c = stability_constants(0.2, 2.0);
  EXPECT_EQ(error_bound(c, 0, 0, 3, 0), 0.0);
  EXPECT_NEAR(error_bound(c, 0.1, 0.05, 4, 0), 0.30216601280743528, 1e-12);
  EXPECT_NEAR(error_bound(c, 0.3, 0, 1, 0) - error_bound(c, 0.2, 0, 1, 0), 0.1 * c.c1, 1e-14);
  EXPECT_THROW(error_bound(c, 0.1, 0, 0, 0), DomainError);
}
