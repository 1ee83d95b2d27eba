#include <gtest/gtest.h>

#include "dictphase/nsp.hpp"
#include "dictphase/solver.hpp"
#include "test_util.hpp"

using namespace dictphase;
using cd = std::complex<double>;

namespace {

void expect_valid_witness(const MeasurementEnsemble& a, const Frame& f, int k, const RealNspWitness& w) {
  const auto amb = nsp_real_counterexample_to_failure(a, w.u, w.v);
  EXPECT_LE((phaseless_forward(a, amb.x0) - phaseless_forward(a, amb.x_tilde)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(analyze(f, amb.x_tilde).lpNorm<1>(), analyze(f, amb.x0).lpNorm<1>() + 1e-9);
  EXPECT_TRUE(is_in_d_sigma_k(f, amb.x0, k).member());
  EXPECT_GT(w.u.norm(), 0.0);
  EXPECT_GT(w.v.norm(), 0.0);
}

}  // namespace

TEST(NspReal, ConversionFromNullSpaces) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testutil::scaled_gaussian(5, 4, trial);
    const std::vector<int> t = {0, 3};
    const std::vector<int> tc = complement(t, 5);
    const Eigen::MatrixXd ub = null_space(row_restrict(a, t).matrix());
    const Eigen::MatrixXd vb = null_space(row_restrict(a, tc).matrix());
    ASSERT_EQ(ub.cols(), 2);
    ASSERT_EQ(vb.cols(), 1);
    const Eigen::VectorXd u = ub * testutil::random_vector(2, trial);
    const Eigen::VectorXd v = vb * testutil::random_vector(1, trial + 99);
    const auto amb = nsp_real_counterexample_to_failure(a, u, v);
    EXPECT_LE((phaseless_forward(a, amb.x0) - phaseless_forward(a, amb.x_tilde)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(amb.t, t);
  }
}

TEST(NspReal, ConversionTrivialBranches) {
  const auto a = testutil::scaled_gaussian(3, 2, 1);
  const Eigen::VectorXd x = testutil::random_vector(2, 1);
  const auto zero_u = nsp_real_counterexample_to_failure(a, Eigen::VectorXd::Zero(2), x);
  EXPECT_EQ(zero_u.x_tilde, -zero_u.x0);
  const auto zero_v = nsp_real_counterexample_to_failure(a, x, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(zero_v.x_tilde, zero_v.x0);
}

TEST(NspReal, ConversionRejectsNonNullPairs) {
  const auto a = testutil::scaled_gaussian(3, 2, 1);
  try {
    nsp_real_counterexample_to_failure(a, testutil::random_vector(2, 1), testutil::random_vector(2, 2));
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.clause(), "null-space");
  }
}

TEST(NspReal, ScalarCaseHolds) {
  const MeasurementEnsemble a(Eigen::MatrixXd::Constant(1, 1, 0.7));
  const auto v = nsp_real_check(a, make_identity_frame(1), 1);
  EXPECT_EQ(v.status, NspStatus::kHoldsOnTestedFamily);
  EXPECT_FALSE(v.witness.has_value());
}

TEST(NspReal, SingleMeasurementInPlaneFails) {
  const auto a = testutil::scaled_gaussian(1, 2, 3);
  const Frame f = make_identity_frame(2);
  const auto v = nsp_real_check(a, f, 1);
  ASSERT_EQ(v.status, NspStatus::kCounterexample);
  ASSERT_TRUE(v.witness.has_value());
  expect_valid_witness(a, f, 1, *v.witness);
  ASSERT_TRUE(v.witness->oracle_confirmed.has_value());
  EXPECT_TRUE(*v.witness->oracle_confirmed);
  // The oracle sees a minimizer other than +-x0.
  const auto amb = nsp_real_counterexample_to_failure(a, v.witness->u, v.witness->v);
  const auto o = oracle_sign_enumeration(a, phaseless_forward(a, amb.x0), f);
  bool other = o.best.objective < analyze(f, amb.x0).lpNorm<1>() - 1e-9;
  for (const auto& x : o.minimizers) other = other || distance_mod_sign(x, amb.x0) > 1e-6;
  EXPECT_TRUE(other);
}

TEST(NspReal, ZeroOrderHolds) {
  const auto a = testutil::scaled_gaussian(2, 3, 1);
  EXPECT_EQ(nsp_real_check(a, make_random_tight_frame(3, 4, 1), 0).status, NspStatus::kHoldsOnTestedFamily);
}

TEST(NspReal, ManyRowsInPlaneIsVacuous) {
  // With n = 2 and m >= 4 no split leaves both null spaces nontrivial.
  const auto a = testutil::scaled_gaussian(4, 2, 8);
  const auto v = nsp_real_check(a, make_random_tight_frame(2, 3, 8), 1);
  EXPECT_EQ(v.status, NspStatus::kHoldsOnTestedFamily);
  EXPECT_EQ(v.pairs_decided, v.pairs_total);
}

TEST(NspReal, WitnessesReverify) {
  int counterexamples = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 4;
    const auto a = testutil::scaled_gaussian(m, 3, 40 + trial);
    const Frame f = make_random_tight_frame(3, 4, 40 + trial);
    const auto v = nsp_real_check(a, f, 1, kDefaultBudget, trial);
    if (v.status != NspStatus::kCounterexample) continue;
    ++counterexamples;
    expect_valid_witness(a, f, 1, *v.witness);
    if (v.witness->oracle_confirmed) EXPECT_TRUE(*v.witness->oracle_confirmed) << trial;
  }
  EXPECT_GT(counterexamples, 0);
}

TEST(NspReal, StatusStrings) {
  EXPECT_EQ(to_string(NspStatus::kHoldsOnTestedFamily), "holds-on-tested-family");
  EXPECT_EQ(to_string(NspStatus::kCounterexample), "counterexample");
  EXPECT_EQ(to_string(NspStatus::kInconclusive), "inconclusive");
}

namespace {

// One row a = (1, 1) in C^2 with D = I: x0 = e1 and x~ = e2 share |a x|.
struct Ambiguous {
  Eigen::MatrixXcd a;
  Frame frame;
  ComplexNspTuple tuple;
};

Ambiguous ambiguous_plane() {
  Eigen::MatrixXcd a(1, 2);
  a << 1.0, 1.0;
  ComplexNspTuple tuple;
  tuple.partition = {{0}, {}};
  Eigen::VectorXcd eta1(2), eta2(2);
  eta1 << 0.5, -0.5;
  eta2 << -0.5, -0.5;
  tuple.eta = {eta1, eta2};
  tuple.c = {cd(1.0), cd(-1.0)};
  return {a, Frame(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2)), true), tuple};
}

}  // namespace

TEST(NspComplex, AmbiguousTupleViolates) {
  const Ambiguous inst = ambiguous_plane();
  const auto check = nsp_complex_check_tuple(inst.frame, inst.tuple, inst.a, 1);
  EXPECT_FALSE(check.holds);
  ASSERT_TRUE(check.violating_pair.has_value());
  const auto amb = nsp_complex_counterexample_to_failure(inst.tuple, inst.a, check.violating_pair->first,
                                                         check.violating_pair->second);
  EXPECT_LE(((inst.a * amb.x0).cwiseAbs() - (inst.a * amb.x_tilde).cwiseAbs()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(NspComplex, ZeroSecondEtaGivesEquality) {
  Eigen::MatrixXcd a(1, 2);
  a << cd(1, 1), cd(2, -1);
  ComplexNspTuple tuple;
  tuple.partition = {{0}, {}};
  const Eigen::VectorXcd eta1 = null_space(a).col(0);
  tuple.eta = {eta1, Eigen::VectorXcd::Zero(2)};
  tuple.c = {cd(1.0), cd(-1.0)};
  const Frame f(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2)), true);
  EXPECT_FALSE(nsp_complex_check_tuple(f, tuple, a, 2).holds);
  // x~ = -x0 here, which the conversion rejects as trivial.
  try {
    nsp_complex_counterexample_to_failure(tuple, a, 0, 1);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.clause(), "trivial");
  }
}

TEST(NspComplex, CommonPhaseDoesNotChangeVerdict) {
  Ambiguous inst = ambiguous_plane();
  const bool base = nsp_complex_check_tuple(inst.frame, inst.tuple, inst.a, 1).holds;
  const cd phase = std::polar(1.0, 0.7);
  for (auto& e : inst.tuple.eta) e *= phase;
  EXPECT_EQ(nsp_complex_check_tuple(inst.frame, inst.tuple, inst.a, 1).holds, base);
}

TEST(NspComplex, HoldsWhenSecondCandidateIsDenser) {
  // Single row (1, 0): x0 = (1 - i) e1 and x~ = x0 + (i - 1) e2.
  Eigen::MatrixXcd a(1, 2);
  a << 1.0, 0.0;
  ComplexNspTuple tuple;
  tuple.partition = {{0}, {}};
  Eigen::VectorXcd eta1(2), eta2(2);
  eta1 << 0.0, 1.0;
  eta2 << cd(-1, 1), 1.0;
  tuple.eta = {eta1, eta2};
  tuple.c = {cd(1.0), cd(0.0, 1.0)};
  const Frame f(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2)), true);
  EXPECT_TRUE(nsp_complex_check_tuple(f, tuple, a, 1).holds);
}

TEST(NspComplex, PreconditionClauses) {
  auto clause_of = [](const Ambiguous& inst, int k = 1) {
    try {
      nsp_complex_check_tuple(inst.frame, inst.tuple, inst.a, k);
    } catch (const PreconditionError& e) {
      return e.clause();
    }
    return std::string();
  };
  Ambiguous inst = ambiguous_plane();
  EXPECT_EQ(clause_of(inst), "");

  inst = ambiguous_plane();
  inst.tuple.c.pop_back();
  EXPECT_EQ(clause_of(inst), "shape");

  inst = ambiguous_plane();
  inst.tuple.partition = {{0}, {0}};
  EXPECT_EQ(clause_of(inst), "partition");

  inst = ambiguous_plane();
  inst.tuple.partition = {{}, {}};
  EXPECT_EQ(clause_of(inst), "partition");

  inst = ambiguous_plane();
  inst.tuple.c[1] = cd(-1.1);
  EXPECT_EQ(clause_of(inst), "unimodular");

  inst = ambiguous_plane();
  inst.tuple.c[1] = cd(1.0);
  EXPECT_EQ(clause_of(inst), "distinct");

  inst = ambiguous_plane();
  inst.tuple.partition = {{}, {0}};
  EXPECT_EQ(clause_of(inst), "null-space");

  inst = ambiguous_plane();
  inst.tuple.partition = {{0}, {}, {}};
  inst.tuple.eta.push_back(Eigen::VectorXcd::Ones(2));
  inst.tuple.c.push_back(cd(0.0, 1.0));
  EXPECT_EQ(clause_of(inst), "ratio-constant");

}

TEST(NspComplex, RatioMembershipClause) {
  Eigen::MatrixXcd a(1, 2);
  a << 1.0, 1.0;
  ComplexNspTuple tuple;
  tuple.partition = {{0}, {}};
  Eigen::VectorXcd eta1(2), eta2(2);
  eta1 << 0.5, -0.5;
  eta2 << -0.5, 0.5;  // ratio (eta1 - eta2) / 2 = (0.5, -0.5) is 2-sparse
  tuple.eta = {eta1, eta2};
  tuple.c = {cd(1.0), cd(-1.0)};
  const Frame f(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(2, 2)), true);
  try {
    nsp_complex_check_tuple(f, tuple, a, 1);
    FAIL() << "expected a precondition error";
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.clause(), "ratio-membership");
  }
  EXPECT_NO_THROW(nsp_complex_check_tuple(f, tuple, a, 2));
}
