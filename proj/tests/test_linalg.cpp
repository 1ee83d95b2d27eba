#include <gtest/gtest.h>

#include "dictphase/linalg.hpp"
#include "test_util.hpp"

using namespace dictphase;

TEST(Linalg, NullSpaceIsOrthonormalAndAnnihilated) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 7);
  const Eigen::MatrixXd z = null_space(a);
  ASSERT_EQ(z.cols(), 4);
  EXPECT_LE((a * z).norm(), 1e-12);
  EXPECT_LE((z.transpose() * z - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-12);
}

TEST(Linalg, NullSpaceOfEmptyMatrixIsEverything) {
  const Eigen::MatrixXd z = null_space(Eigen::MatrixXd(0, 3));
  EXPECT_EQ(z.cols(), 3);
}

TEST(Linalg, NullSpaceDetectsRankDeficiency) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 1, 0, 1;
  EXPECT_EQ(numerical_rank(a), 2);
  EXPECT_EQ(null_space(a).cols(), 1);
  EXPECT_EQ(range_basis(a).cols(), 2);
}

TEST(Linalg, ComplexNullSpace) {
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(2, 4);
  const Eigen::MatrixXcd z = null_space(a);
  ASSERT_EQ(z.cols(), 2);
  EXPECT_LE((a * z).norm(), 1e-12);
}

TEST(Linalg, Binomial) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(10, 5), 252u);
  EXPECT_EQ(binomial(4, 0), 1u);
  EXPECT_EQ(binomial(3, 4), 0u);
  EXPECT_EQ(binomial(200, 100), UINT64_MAX);
}

TEST(Linalg, CombinationsAreLexicographic) {
  std::vector<std::vector<int>> seen;
  for_each_combination(4, 2, [&](std::span<const int> s) {
    seen.emplace_back(s.begin(), s.end());
    return true;
  });
  const std::vector<std::vector<int>> want = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(seen, want);
}

TEST(Linalg, CombinationEarlyStop) {
  int calls = 0;
  const bool done = for_each_combination(6, 3, [&](std::span<const int>) { return ++calls < 4; });
  EXPECT_FALSE(done);
  EXPECT_EQ(calls, 4);
}

TEST(Linalg, ComplementAndSelect) {
  const std::vector<int> s = {1, 3};
  EXPECT_EQ(complement(s, 5), (std::vector<int>{0, 2, 4}));
  Eigen::MatrixXd a(3, 2);
  a << 1, 2, 3, 4, 5, 6;
  const std::vector<int> rows = {2, 0};
  const Eigen::MatrixXd r = select_rows(a, rows);
  EXPECT_EQ(r(0, 0), 5);
  EXPECT_EQ(r(1, 1), 2);
  const std::vector<int> bad = {3};
  EXPECT_THROW(select_rows(a, bad), ShapeError);
}

TEST(Linalg, ComplexL1Norm) {
  Eigen::VectorXcd v(2);
  v << std::complex<double>(3, 4), std::complex<double>(0, -1);
  EXPECT_DOUBLE_EQ(l1_norm(v), 6.0);
}

TEST(Linalg, MaskToIndices) {
  EXPECT_EQ(mask_to_indices(0b1011, 4), (std::vector<int>{0, 1, 3}));
}
