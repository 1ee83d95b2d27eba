#include <gtest/gtest.h>

#include "dictphase/frames.hpp"
#include "test_util.hpp"

using namespace dictphase;

TEST(Frames, IdentityFrame) {
  const Frame f = make_identity_frame(3);
  EXPECT_TRUE(f.tight());
  EXPECT_EQ(f.tightness_residual(), 0.0);
  EXPECT_EQ(f.real_matrix(), Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(make_identity_frame(1).real_matrix()(0, 0), 1.0);
  const Eigen::VectorXd x = testutil::random_vector(4, 1);
  EXPECT_EQ(analyze(make_identity_frame(4), x), x);
  EXPECT_EQ(synthesize(make_identity_frame(4), x), x);
}

TEST(Frames, RandomTightFrame) {
  const Frame f = make_random_tight_frame(4, 6, 1);
  EXPECT_EQ(f.rows(), 4);
  EXPECT_EQ(f.cols(), 6);
  EXPECT_LE(f.tightness_residual(), 1e-10);
  EXPECT_EQ(f.real_matrix(), make_random_tight_frame(4, 6, 1).real_matrix());
  EXPECT_NE(f.real_matrix(), make_random_tight_frame(4, 6, 2).real_matrix());
}

TEST(Frames, SquareTightFrameIsOrthogonal) {
  const Eigen::MatrixXd d = make_random_tight_frame(5, 5, 3).real_matrix();
  EXPECT_LE((d.transpose() * d - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Frames, RejectsBadShapes) {
  EXPECT_THROW(make_random_tight_frame(4, 3, 1), Error);
  EXPECT_THROW(make_identity_frame(0), Error);
  EXPECT_THROW(Frame(Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 3)), false), Error);
  EXPECT_THROW(Frame(Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(2, 2)), true), Error);
}

TEST(Frames, ComplexFrameRefusesRealAccess) {
  const Frame f(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2)), true);
  EXPECT_FALSE(f.is_real());
  EXPECT_THROW(f.real_matrix(), DomainError);
}

TEST(Frames, TightAnalysisIsIsometry) {
  for (int seed = 0; seed < 5; ++seed) {
    const Frame f = make_random_tight_frame(5, 9, seed);
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd x = testutil::random_vector(5, 100 * seed + i);
      EXPECT_LE(std::abs(analyze(f, x).norm() - x.norm()), 1e-8 * x.norm());
      EXPECT_LE((synthesize(f, analyze(f, x)) - x).norm(), 1e-10 * x.norm());
    }
  }
}

TEST(Frames, AnalyzeChecksShape) {
  const Frame f = make_random_tight_frame(3, 4, 0);
  EXPECT_THROW(analyze(f, Eigen::VectorXd(Eigen::VectorXd::Zero(4))), ShapeError);
  EXPECT_THROW(synthesize(f, Eigen::VectorXd(Eigen::VectorXd::Zero(3))), ShapeError);
}

TEST(Frames, BestKTermErrorExamples) {
  EXPECT_DOUBLE_EQ(best_k_term_error(Eigen::Vector3d(3, -1, 0.5), 1), 1.5);
  Eigen::VectorXd v(5);
  v << 5, 4, 3, 2, 1;
  EXPECT_DOUBLE_EQ(best_k_term_error(v, 2), 6.0);
  EXPECT_EQ(best_k_term_error(Eigen::Vector3d(0, 2, 0), 1), 0.0);
  EXPECT_EQ(best_k_term_error(v, 5), 0.0);
}

TEST(Frames, BestKTermErrorMatchesBruteForce) {
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    Eigen::VectorXd v = testutil::random_vector(n, trial);
    if (trial % 3 == 0) v(0) = v(n - 1);  // ties
    for (int k = 0; k <= n; ++k) {
      EXPECT_NEAR(best_k_term_error(v, k), testutil::brute_sigma_k(v, k), 1e-12);
      if (k < n) EXPECT_LE(best_k_term_error(v, k + 1), best_k_term_error(v, k));
    }
  }
}

TEST(Frames, LargestSupportPrefersLowerIndex) {
  EXPECT_EQ(largest_k_support(Eigen::Vector4d(1, -2, 2, 0.5), 2), (std::vector<int>{1, 2}));
  EXPECT_EQ(largest_k_support(Eigen::Vector4d(1, 1, 1, 1), 2), (std::vector<int>{0, 1}));
}

TEST(Frames, MembershipSoundness) {
  const Frame f = make_random_tight_frame(4, 6, 7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + trial % 2;
    const Eigen::VectorXd z = testutil::sparse_coefficients(6, k, trial);
    const RealMembership mem = is_in_d_sigma_k(f, synthesize(f, z), k);
    ASSERT_TRUE(mem.member());
    EXPECT_LE((synthesize(f, mem.coefficients) - synthesize(f, z)).norm(), 1e-8);
  }
}

TEST(Frames, MembershipRecoversSupport) {
  const Frame f = make_random_tight_frame(4, 6, 2);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(6);
  z(4) = 1.5;
  const RealMembership mem = is_in_d_sigma_k(f, synthesize(f, z), 1);
  ASSERT_TRUE(mem.member());
  EXPECT_EQ(mem.support, std::vector<int>{4});
}

TEST(Frames, ZeroIsMember) {
  const Frame f = make_random_tight_frame(4, 6, 2);
  const RealMembership mem = is_in_d_sigma_k(f, Eigen::VectorXd(Eigen::VectorXd::Zero(4)), 1);
  ASSERT_TRUE(mem.member());
  EXPECT_EQ(mem.coefficients.norm(), 0.0);
}

TEST(Frames, RandomVectorIsNotMember) {
  const Frame f = make_random_tight_frame(4, 6, 1);
  const Eigen::VectorXd x = testutil::random_vector(4, 99);
  EXPECT_EQ(is_in_d_sigma_k(f, x, 1).status, MembershipStatus::kNotMember);
  // Every single-column fit leaves a residual far above the tolerance.
  const Eigen::MatrixXd d = f.real_matrix();
  for (int j = 0; j < 6; ++j) {
    const Eigen::VectorXd col = d.col(j);
    const Eigen::VectorXd r = x - col * (col.dot(x) / col.squaredNorm());
    EXPECT_GT(r.norm(), 1e-8 * x.norm());
  }
}

TEST(Frames, MembershipBudget) {
  const Frame f = make_random_tight_frame(4, 20, 1);
  EXPECT_EQ(is_in_d_sigma_k(f, testutil::random_vector(4, 1), 3, -1.0, 100).status,
            MembershipStatus::kInconclusive);
}

TEST(Frames, ComplexMembership) {
  const Frame f(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(3, 3)), true);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(3);
  x(1) = std::complex<double>(1, 2);
  EXPECT_TRUE(is_in_d_sigma_k(f, x, 1).member());
  x(2) = 1.0;
  EXPECT_FALSE(is_in_d_sigma_k(f, x, 1).member());
}

TEST(Frames, SparseCoefVectorChecksSparsity) {
  EXPECT_THROW(SparseCoefVector(Eigen::Vector3d(1, 1, 0), 1), Error);
  const SparseCoefVector z(Eigen::Vector3d(0, 2, 0), 1);
  EXPECT_EQ(z.support(), std::vector<int>{1});
}
