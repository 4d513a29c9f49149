#include <gtest/gtest.h>

#include <random>

#include "qmem/channel.hpp"
#include "qmem/dynamics.hpp"
#include "test_util.hpp"

using namespace qmem;
using qmem::testing::random_channel;
using qmem::testing::random_hermitian;
using qmem::testing::random_matrix;
using qmem::testing::random_state;

namespace {

double max_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

MapAction identity_action(int d) {
  MapAction a{d, {}};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a.images.push_back(unit_op(d, i, j));
  return a;
}

}  // namespace

TEST(ChoiOperator, RejectsBadShapeAndNonHermitian) {
  EXPECT_THROW(ChoiOperator(2, 2, Mat::Zero(3, 3)), std::invalid_argument);
  Mat m = Mat::Zero(4, 4);
  m(0, 1) = 1.0;
  EXPECT_THROW(ChoiOperator(2, 2, m), std::invalid_argument);
  EXPECT_THROW(ChoiOperator(0, 2, Mat::Zero(0, 0)), std::invalid_argument);
}

TEST(ChoiOperator, SymmetrizesTinyDrift) {
  Mat m = max_entangled(2);
  m(0, 3) += cplx(1e-14, 0.0);
  const ChoiOperator c(2, 2, m);
  EXPECT_EQ(hermiticity_defect(c.matrix()), 0.0);
}

TEST(ChoiFromAction, IdentityGivesMaximallyEntangledProjector) {
  const ChoiOperator c = choi_from_action(identity_action(2));
  Mat expected = Mat::Zero(4, 4);
  expected(0, 0) = expected(0, 3) = expected(3, 0) = expected(3, 3) = 1.0;
  EXPECT_LT(max_diff(c.matrix(), expected), 1e-15);
  EXPECT_LT(max_diff(c.matrix(), ChoiOperator::identity(2).matrix()), 1e-15);
}

TEST(ChoiFromAction, TwoLevelEmissionAction) {
  // |g><g| -> |g><g|, |g><e| -> c* |g><e|, |e><e| -> |c|^2 |e><e| + (1-|c|^2) |g><g|
  const double c = 0.5;
  MapAction a{2, {}};
  Mat gg = unit_op(2, 0, 0), ge = c * unit_op(2, 0, 1), eg = c * unit_op(2, 1, 0);
  Mat ee = c * c * unit_op(2, 1, 1) + (1 - c * c) * unit_op(2, 0, 0);
  a.images = {gg, ge, eg, ee};
  Mat expected(4, 4);
  expected << 1, 0, 0, 0.5, 0, 0, 0, 0, 0, 0, 0.75, 0, 0.5, 0, 0, 0.25;
  EXPECT_LT(max_diff(choi_from_action(a).matrix(), expected), 1e-15);
  EXPECT_LT(max_diff(channel_two_level(0.5).matrix(), expected), 1e-15);
}

TEST(ChoiFromAction, RejectsMismatchedImages) {
  MapAction a = identity_action(2);
  a.images[1] = Mat::Zero(3, 3);
  EXPECT_THROW(choi_from_action(a), std::invalid_argument);
  a.images.pop_back();
  EXPECT_THROW(choi_from_action(a), std::invalid_argument);
}

TEST(ChoiFromAction, RoundTripOnRandomHermitian) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 2;
    const ChoiOperator x(d, d, random_hermitian(d * d, rng));
    const ChoiOperator back = choi_from_action(action_from_choi(x));
    EXPECT_LT(max_diff(back.matrix(), x.matrix()), 1e-12);
  }
}

TEST(ActionFromChoi, CompletelyDepolarizing) {
  const MapAction a = action_from_choi(ChoiOperator(2, 2, Mat::Identity(4, 4) / 2.0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Mat expected = (i == j ? 0.5 : 0.0) * Mat::Identity(2, 2);
      EXPECT_LT(max_diff(a.image(i, j), expected), 1e-15);
    }
}

TEST(ActionFromChoi, TwoLevelAtUnitAmplitudeIsIdentity) {
  const MapAction a = action_from_choi(channel_two_level(1.0));
  EXPECT_LT(max_diff(a.image(0, 0), unit_op(2, 0, 0)), 1e-15);
  EXPECT_LT(max_diff(a.image(1, 1), unit_op(2, 1, 1)), 1e-15);
}

TEST(ApplyChannel, IdentityAndEmission) {
  std::mt19937_64 rng(3);
  const Mat rho = random_state(2, rng);
  EXPECT_LT(max_diff(apply_channel(ChoiOperator::identity(2), rho), rho), 1e-14);
  const cplx c(0.3, 0.4);
  const Mat out = apply_channel(channel_two_level(c), unit_op(2, 1, 1));
  EXPECT_NEAR(out(0, 0).real(), 1.0 - std::norm(c), 1e-15);
  EXPECT_NEAR(out(1, 1).real(), std::norm(c), 1e-15);
  EXPECT_THROW(apply_channel(ChoiOperator::identity(2), Mat::Identity(3, 3)), std::invalid_argument);
}

TEST(ApplyChannel, RandomChannelKeepsStatesPhysical) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 2;
    const Mat out = apply_channel(random_channel(d, rng), random_state(d, rng));
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-10);
    EXPECT_GT(min_eigenvalue(out), -1e-12);
  }
}

TEST(LinkProduct, IdentityIsNeutral) {
  std::mt19937_64 rng(5);
  const ChoiOperator e = random_channel(3, rng);
  EXPECT_LT(max_diff(link_product(e, ChoiOperator::identity(3)).matrix(), e.matrix()), 1e-12);
  EXPECT_LT(max_diff(link_product(ChoiOperator::identity(3), e).matrix(), e.matrix()), 1e-12);
}

TEST(LinkProduct, TwoLevelComposition) {
  const cplx c = std::polar(0.6, 0.3), c2 = std::polar(0.7, -1.1);
  const ChoiOperator r = link_product(channel_two_level(c), channel_two_level(c2));
  EXPECT_LT(max_diff(r.matrix(), channel_two_level(c * c2).matrix()), 1e-12);
}

TEST(LinkProduct, ThreeLevelComposition) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const cplx d1 = 0.8, d2 = std::polar(0.5, 0.2);
  const double g1 = 0.1, g2 = 0.3, p1 = u(rng), p2 = u(rng);
  const ChoiOperator r = link_product(channel_three_level(d1, g1, p1), channel_three_level(d2, g2, p2));
  const ChoiOperator expected = channel_three_level(d2 * d1, g1 + std::norm(d1) * g2, p1 + p2);
  EXPECT_LT(max_diff(r.matrix(), expected.matrix()), 1e-12);
}

TEST(LinkProduct, MatchesComposedAction) {
  std::mt19937_64 rng(13);
  const ChoiOperator a = random_channel(2, rng), b = random_channel(2, rng);
  MapAction composed{2, {}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) composed.images.push_back(apply_channel(b, apply_channel(a, unit_op(2, i, j))));
  EXPECT_LT(max_diff(link_product(a, b).matrix(), choi_from_action(composed).matrix()), 1e-12);
  EXPECT_THROW(link_product(a, ChoiOperator::identity(3)), std::invalid_argument);
}

TEST(LinkProductProperty, Associative) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 2;
    const ChoiOperator a = random_channel(d, rng), b = random_channel(d, rng), c = random_channel(d, rng);
    const Mat left = link_product(link_product(a, b), c).matrix();
    const Mat right = link_product(a, link_product(b, c)).matrix();
    EXPECT_LT(max_diff(left, right), 1e-10);
  }
}

TEST(LinkProductProperty, ApplicationComposes) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 2;
    const ChoiOperator a = random_channel(d, rng), b = random_channel(d, rng);
    const Mat rho = random_state(d, rng);
    EXPECT_LT(max_diff(apply_channel(link_product(a, b), rho), apply_channel(b, apply_channel(a, rho))), 1e-10);
  }
}

TEST(PartialTrace, Examples) {
  EXPECT_LT(max_diff(partial_trace(max_entangled(2), {2, 2}, 1), Mat::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_diff(partial_trace(channel_two_level(0.5).matrix(), {2, 2}, 1), Mat::Identity(2, 2)), 1e-15);
  std::mt19937_64 rng(23);
  const Mat a = random_matrix(3, 3, rng), b = random_matrix(2, 2, rng);
  EXPECT_LT(max_diff(partial_trace(kron(a, b), {3, 2}, 1), a * b.trace()), 1e-12);
  EXPECT_LT(max_diff(partial_trace(kron(a, b), {3, 2}, 0), b * a.trace()), 1e-12);
  EXPECT_THROW(partial_trace(kron(a, b), {3, 2}, 2), std::invalid_argument);
  EXPECT_THROW(partial_trace(kron(a, b), {3, 3}, 0), std::invalid_argument);
}

TEST(PartialTrace, PreservesTraceOverSeveralFactors) {
  std::mt19937_64 rng(29);
  const Mat m = random_matrix(12, 12, rng);
  const Mat r = partial_trace(m, {2, 3, 2}, std::vector<int>{0, 2});
  EXPECT_EQ(r.rows(), 3);
  EXPECT_NEAR(std::abs(r.trace() - m.trace()), 0.0, 1e-12);
}

TEST(PartialTranspose, Examples) {
  std::mt19937_64 rng(31);
  const Mat a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng);
  EXPECT_LT(max_diff(partial_transpose(kron(a, b), {2, 3}, {0}), kron(a.transpose(), b)), 1e-14);
  Eigen::SelfAdjointEigenSolver<Mat> es(partial_transpose(max_entangled(2), {2, 2}, {0}));
  Eigen::VectorXd expected(4);
  expected << -1, 1, 1, 1;
  EXPECT_LT((es.eigenvalues() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(partial_transpose(kron(a, b), {2, 3}, {5}), std::invalid_argument);
}

TEST(PartialTransposeProperty, Involution) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat m = random_matrix(16, 16, rng);
    const std::vector<int> dims{2, 2, 2, 2};
    const std::vector<int> which = trial % 2 ? std::vector<int>{0, 1} : std::vector<int>{1, 3};
    EXPECT_LT(max_diff(partial_transpose(partial_transpose(m, dims, which), dims, which), m), 1e-15);
  }
}

TEST(IsCptp, Examples) {
  EXPECT_TRUE(is_cptp(channel_two_level(std::polar(0.9, 1.0))).ok);
  Mat bad = Mat::Zero(4, 4);
  bad(0, 0) = 1.0, bad(0, 3) = 1.2, bad(3, 0) = 1.2, bad(2, 2) = 1.0 - 1.44, bad(3, 3) = 1.44;
  const CptpReport r = is_cptp(ChoiOperator(2, 2, bad));
  EXPECT_FALSE(r.ok);
  EXPECT_LT(r.min_eigenvalue, 0.0);
  EXPECT_TRUE(is_cptp(ChoiOperator::identity(2)).ok);
  const CptpReport scaled = is_cptp(ChoiOperator(2, 2, 2.0 * max_entangled(2)));
  EXPECT_FALSE(scaled.ok);
  EXPECT_NEAR(scaled.trace_deviation, 1.0, 1e-15);
}

TEST(IsCptpProperty, DynamicsConstructorsAreChannels) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    EXPECT_TRUE(is_cptp(channel_two_level(std::polar(u(rng), 6.0 * u(rng)))).ok);
    EXPECT_TRUE(is_cptp(dephasing_channel(std::polar(u(rng), 6.0 * u(rng)))).ok);
    const double a = u(rng), g = (1.0 - a) * u(rng);
    EXPECT_TRUE(is_cptp(channel_three_level(std::polar(std::sqrt(a), 6.0 * u(rng)), g, 6.0 * u(rng))).ok);
  }
}

TEST(SubchannelDecomposition, Validation) {
  const ChoiOperator parent = ChoiOperator::identity(2);
  SubchannelDecomposition ok{{ChoiOperator(2, 2, 0.25 * parent.matrix()), ChoiOperator(2, 2, 0.75 * parent.matrix())},
                             parent};
  EXPECT_NO_THROW(ok.validate());
  SubchannelDecomposition short_sum{{ChoiOperator(2, 2, 0.5 * parent.matrix())}, parent};
  EXPECT_THROW(short_sum.validate(), std::invalid_argument);
  SubchannelDecomposition negative{
      {ChoiOperator(2, 2, -0.5 * parent.matrix()), ChoiOperator(2, 2, 1.5 * parent.matrix())}, parent};
  EXPECT_THROW(negative.validate(), std::invalid_argument);
}

TEST(UnitaryChannel, RejectsNonUnitary) {
  EXPECT_THROW(unitary_channel(2.0 * Mat::Identity(2, 2)), std::invalid_argument);
  std::mt19937_64 rng(43);
  EXPECT_TRUE(is_cptp(unitary_channel(qmem::testing::random_unitary(3, rng))).ok);
}
