#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qmem/programs.hpp"
#include "test_util.hpp"

using namespace qmem;
using qmem::testing::random_hermitian;
using qmem::testing::random_matrix;

namespace {

constexpr double kPi = std::numbers::pi;

cplx random_disk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(std::sqrt(u(rng)), 2 * kPi * u(rng));
}

std::vector<sdp::Coef> coefs_from_matrix(int block, const Mat& a) {
  std::vector<sdp::Coef> out;
  for (int p = 0; p < a.rows(); ++p)
    for (int q = p; q < a.cols(); ++q)
      if (a(p, q) != cplx(0.0)) out.push_back({block, p, q, a(p, q)});
  return out;
}

std::pair<ChoiOperator, ChoiOperator> ga2_pair(double axis1, double axis2) {
  const GiantAtom2LParams p;
  return {channel_two_level(amplitude_c(axis_to_time_2l(axis1, p), p)),
          channel_two_level(amplitude_c(axis_to_time_2l(axis2, p), p))};
}

}  // namespace

TEST(SdpSolve, TrivialScalarBound) {
  // max s with s + t = 1, s, t >= 0, and 1 - s >= 0 on a 2x2 block
  sdp::SdpProblem prob;
  const int s = prob.add_block("s", 1), t = prob.add_block("t", 1), m = prob.add_block("m", 2);
  prob.equalities.push_back({{{s, 0, 0, 1.0}, {t, 0, 0, 1.0}}, 1.0});
  prob.equalities.push_back({{{s, 0, 0, 1.0}, {m, 0, 0, 1.0}}, 1.0});
  prob.equalities.push_back({{{s, 0, 0, 1.0}, {m, 1, 1, 1.0}}, 1.0});
  prob.equalities.push_back({{{m, 0, 1, 1.0}}, 0.0});
  prob.equalities.push_back({{{m, 0, 1, cplx(0.0, 1.0)}}, 0.0});
  prob.objective = {{s, 0, 0, 1.0}};
  prob.maximize = true;
  const sdp::SdpSolution sol = sdp::solve(prob);
  ASSERT_EQ(sol.status, sdp::SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, 1.0, 1e-6);
  EXPECT_NEAR(sol.dual_objective, sol.objective_value, 1e-6);
}

TEST(SdpSolve, DualConstructionOracle) {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4 + trial % 3, rank = 2, m = 6;
    // complementary optimal pair: X* on the first `rank` directions of a random unitary, S* on the rest
    const Mat u = qmem::testing::random_unitary(n, rng);
    Mat x_star = Mat::Zero(n, n), s_star = Mat::Zero(n, n);
    std::uniform_real_distribution<double> w(0.5, 2.0);
    for (int k = 0; k < n; ++k) (k < rank ? x_star : s_star) += w(rng) * u.col(k) * u.col(k).adjoint();
    sdp::SdpProblem prob;
    const int b = prob.add_block("X", n);
    Mat c = s_star;
    for (int i = 0; i < m; ++i) {
      const Mat a = random_hermitian(n, rng);
      const double y = std::normal_distribution<double>()(rng);
      c += y * a;
      prob.equalities.push_back({coefs_from_matrix(b, a), (a * x_star).trace().real()});
    }
    // keep tr(X) bounded so the random problem stays well posed
    prob.equalities.push_back({coefs_from_matrix(b, Mat::Identity(n, n)), x_star.trace().real()});
    c += 0.3 * Mat::Identity(n, n);
    prob.objective = coefs_from_matrix(b, c);
    const sdp::SdpSolution sol = sdp::solve(prob);
    ASSERT_EQ(sol.status, sdp::SolveStatus::Optimal) << sol.message;
    EXPECT_NEAR(sol.objective_value, (c * x_star).trace().real(), 1e-6);
    EXPECT_LT(sol.duality_gap, 1e-7);
    EXPECT_NEAR(sdp::evaluate(prob.objective, sol.primal_blocks), sol.objective_value, 1e-9);
  }
}

TEST(SdpSolve, InconsistentConstraintsNotOptimal) {
  sdp::SdpProblem prob;
  const int b = prob.add_block("x", 1);
  prob.equalities.push_back({{{b, 0, 0, 1.0}}, -1.0});
  prob.objective = {{b, 0, 0, 1.0}};
  EXPECT_NE(sdp::solve(prob).status, sdp::SolveStatus::Optimal);
}

TEST(SdpSolve, Deterministic) {
  const auto [e1, e2] = ga2_pair(5.9, 7.0);
  const MembershipProgram prog = build_ppt_membership(e1, e2);
  const auto a = sdp::solve(prog.problem), b = sdp::solve(prog.problem);
  EXPECT_EQ(a.objective_value, b.objective_value);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(PptMembership, UnreducedBlockSizes) {
  MembershipOptions opt;
  opt.facial_reduction = false;
  opt.symmetry = false;
  const MembershipProgram prog = build_ppt_membership(ChoiOperator::identity(2), ChoiOperator::identity(2), opt);
  std::vector<int> dims;
  for (const auto& b : prog.problem.blocks) dims.push_back(b.dim);
  EXPECT_EQ(dims, (std::vector<int>{16, 16, 4, 1}));
  const auto sol = sdp::solve(prog.problem);
  ASSERT_EQ(sol.status, sdp::SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, 1.0, 1e-6);
  EXPECT_THROW(build_ppt_membership(ChoiOperator::identity(2), ChoiOperator::identity(3)), std::invalid_argument);
}

TEST(PptMembership, ReducedAndUnreducedAgree) {
  const auto [e1, e2] = ga2_pair(5.9, 7.0);
  MembershipOptions plain;
  plain.facial_reduction = false;
  plain.symmetry = false;
  plain.regularization = 1e-7;
  MembershipOptions reduced;
  reduced.regularization = 1e-7;
  const auto a = sdp::solve(build_ppt_membership(e1, e2, plain).problem);
  const auto b = sdp::solve(build_ppt_membership(e1, e2, reduced).problem);
  ASSERT_EQ(a.status, sdp::SolveStatus::Optimal);
  ASSERT_EQ(b.status, sdp::SolveStatus::Optimal);
  EXPECT_NEAR(a.objective_value, b.objective_value, 1e-5);
}

TEST(Robustness, IdentityPairIsClassical) {
  const auto r = robustness_quantum_memory(ChoiOperator::identity(2), ChoiOperator::identity(2));
  EXPECT_EQ(r.status, sdp::SolveStatus::Optimal);
  EXPECT_LE(r.r_star, 1e-6);
  EXPECT_NE(r.verdict.kind, MemoryKind::QuantumMemory);
  EXPECT_FALSE(r.dual_witness.has_value());
}

TEST(Robustness, GiantAtomPeakDetected) {
  const auto [e1, e2] = ga2_pair(5.9, 7.0);
  const auto r = robustness_quantum_memory(e1, e2);
  ASSERT_EQ(r.status, sdp::SolveStatus::Optimal);
  EXPECT_LT(r.s_star, 1.0 - 1e-3);
  EXPECT_NEAR(r.r_star, 1.0 / r.s_star - 1.0, 1e-12);
  EXPECT_EQ(r.verdict.kind, MemoryKind::QuantumMemory);
  // frozen from the reduced program at the default tolerances
  EXPECT_NEAR(r.r_star, 0.132663, 1e-4);
  const auto m = robustness_markovianity(e1, e2);
  EXPECT_GE(m.r_star, r.r_star - 1e-6);
}

TEST(Robustness, DephasingClassicalButNonMarkovian) {
  const auto r = robustness_quantum_memory(dephasing_channel(0.3), dephasing_channel(cplx(0.0, 0.9)));
  EXPECT_LE(r.r_star, 1e-6);
  const auto m = robustness_markovianity(dephasing_channel(0.3), dephasing_channel(cplx(0.0, 0.9)));
  EXPECT_GT(m.r_star, 1e-3);
  EXPECT_EQ(m.verdict.kind, MemoryKind::ClassicalNonMarkovian);
}

TEST(Robustness, MarkovianPairHasZeroMarkovianityRobustness) {
  const auto m = robustness_markovianity(channel_two_level(0.8), channel_two_level(std::polar(0.4, 1.0)));
  EXPECT_LE(m.r_star, 1e-6);
  EXPECT_EQ(m.verdict.kind, MemoryKind::Markovian);
}

TEST(RobustnessProperty, SoundOnMarkovianPairs) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const cplx c1 = random_disk(rng), c2 = c1 * std::polar(u(rng), 2 * kPi * u(rng));
    const auto r = robustness_quantum_memory(channel_two_level(c1), channel_two_level(c2));
    EXPECT_LE(r.r_star, 1e-6) << c1 << " " << c2;
  }
  for (int trial = 0; trial < 10; ++trial) {
    ThreeLevelDecay s1;
    s1.d = random_disk(rng);
    s1.G = (1 - std::norm(s1.d)) * u(rng);
    ThreeLevelDecay s2;
    s2.d = s1.d * std::polar(u(rng), 2 * kPi * u(rng));
    // G2 within [G1, G1 + |d1|^2 - |d2|^2]
    s2.G = s1.G + u(rng) * (std::norm(s1.d) - std::norm(s2.d));
    ASSERT_EQ(classify_three_level(s1, s2).kind, MemoryKind::Markovian);
    const auto r = robustness_quantum_memory(channel_three_level(s1.d, s1.G, 0.4), channel_three_level(s2.d, s2.G, 1.1));
    EXPECT_LE(r.r_star, 1e-6);
  }
}

TEST(RobustnessProperty, MixingMonotone) {
  const auto [e1, e2] = ga2_pair(5.9, 7.0);
  const double s = robustness_quantum_memory(e1, e2).s_star;
  const ChoiOperator g0 = channel_two_level(0.0);
  for (double lambda : {0.25, 0.5, 0.75}) {
    const ChoiOperator mixed(2, 2, lambda * e2.matrix() + (1 - lambda) * g0.matrix());
    EXPECT_GE(robustness_quantum_memory(e1, mixed).s_star, lambda * s - 1e-6);
  }
}

TEST(RobustnessProperty, DualMatchesPrimal) {
  const auto [e1, e2] = ga2_pair(5.9, 6.4);
  const auto sol = sdp::solve(build_ppt_membership(e1, e2).problem);
  ASSERT_EQ(sol.status, sdp::SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, sol.dual_objective, 1e-6);
}

TEST(RobustnessProperty, GraphConvexity) {
  // two Markovian pairs; the mixed pair must stay inside the PPT future
  const ChoiOperator e1 = channel_two_level(0.9), g1 = channel_two_level(std::polar(0.5, 0.7));
  const ChoiOperator m1 = channel_two_level(std::polar(0.6, 2.0)), n1 = channel_two_level(std::polar(0.2, -1.0));
  for (double lambda : {0.25, 0.5, 0.75}) {
    const ChoiOperator a(2, 2, lambda * e1.matrix() + (1 - lambda) * m1.matrix());
    const ChoiOperator b(2, 2, lambda * g1.matrix() + (1 - lambda) * n1.matrix());
    MembershipOptions opt;
    opt.mixing = false;
    const auto sol = sdp::solve(build_ppt_membership(a, b, opt).problem);
    EXPECT_EQ(sol.status, sdp::SolveStatus::Optimal) << "lambda = " << lambda;
    EXPECT_GE(robustness_quantum_memory(a, b).s_star, 1.0 - 1e-6);
  }
}

TEST(Robustness, HeisenbergSeparation) {
  const HeisenbergParams j{-1.0, -2.0, -3.0};
  bool separated = false, detected = false;
  for (int i = 1; i <= 12 && !(separated && detected); ++i) {
    for (int k = 1; k <= 12; ++k) {
      const double t1 = 0.25 * i, t2 = t1 + 0.25 * k;
      const ChoiOperator e1 = heisenberg_channel(t1, j), e2 = heisenberg_channel(t2, j);
      const double rq = robustness_quantum_memory(e1, e2).r_star;
      if (rq > 1e-4) detected = true;
      if (rq < 1e-6 && robustness_markovianity(e1, e2).r_star > 0.05) separated = true;
    }
  }
  EXPECT_TRUE(separated);
  EXPECT_TRUE(detected);
}

TEST(Seesaw, MarkovianPairSinglePart) {
  SeesawOptions opt;
  opt.parts = 1;
  opt.restarts = 1;
  const auto r = seesaw_lower_bound(channel_two_level(0.8), channel_two_level(std::polar(0.5, 0.3)), opt);
  EXPECT_GE(r.s_lower, 1.0 - 1e-6);
  EXPECT_LT(r.recombination_error, 1e-8);
}

TEST(Seesaw, DephasingPairTwoParts) {
  SeesawOptions opt;
  opt.parts = 2;
  const ChoiOperator e1 = dephasing_channel(0.3), e2 = dephasing_channel(cplx(0.0, 0.9));
  const auto r = seesaw_lower_bound(e1, e2, opt);
  EXPECT_GE(r.s_lower, 1.0 - 1e-6);
  EXPECT_NO_THROW(r.certificate.instrument.validate(1e-7));
  EXPECT_LT(r.recombination_error, 1e-8);
}

TEST(Seesaw, SandwichOnGiantAtomPair) {
  const auto [e1, e2] = ga2_pair(5.9, 7.0);
  SeesawOptions opt;
  opt.restarts = 2;
  const auto lower = seesaw_lower_bound(e1, e2, opt);
  const double upper = robustness_quantum_memory(e1, e2).s_star;
  EXPECT_LE(lower.s_lower, upper + 1e-6);
  EXPECT_GT(lower.s_lower, 0.0);
  // certificate is re-verified independently of the solver
  EXPECT_NEAR(certified_mixing(lower.certificate.recombine(), e2), lower.s_lower, 1e-9);
}

TEST(CertifiedMixing, Examples) {
  EXPECT_EQ(certified_mixing(ChoiOperator::identity(2), ChoiOperator::identity(2)), 1.0);
  EXPECT_NEAR(certified_mixing(channel_two_level(0.0), ChoiOperator::identity(2)), 0.0, 1e-12);
  EXPECT_EQ(classical_memory_size_bound(2), 272);
}
