#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qmem/channel.hpp"
#include "qmem/criteria.hpp"
#include "qmem/sdp.hpp"
#include "qmem/symmetry.hpp"
#include "qmem/witness_pair.hpp"

namespace qmem {

struct MembershipOptions {
  bool mixing = true;            // max s with s E2 + (1-s) G in the PPT future of E1
  bool facial_reduction = true;  // restrict X to range(E1) (x) D' (x) B
  bool symmetry = true;          // block-diagonalize over diagonal-phase charges when covariant
  double regularization = 0.0;   // replace E1 by (1-eps) E1 + eps 1/d
};

// PPT-relaxed classical future of E1 as a standard-form SDP. Factor order of X is
// (A, D, D', B); the reduced variable acts on span(isometry) (x) D' (x) B.
struct MembershipProgram {
  sdp::SdpProblem problem;
  int d = 0;
  ChoiOperator e1;  // after regularization
  ChoiOperator e2;
  Mat isometry;     // d^2 x r, columns span the A D factor used by X
  PhaseSymmetry symmetry;
  bool mixing = true;
  int s_block = -1;
  std::vector<int> group_sizes;  // partial-trace group, target group, transpose group
  std::vector<int> tag_group;    // per equality
  std::vector<int> tag_p, tag_q;
  std::vector<bool> tag_imag;
};

enum MembershipGroup { kTraceGroup = 0, kTargetGroup = 1, kTransposeGroup = 2 };

MembershipProgram build_ppt_membership(const ChoiOperator& e1, const ChoiOperator& e2_target,
                                       const MembershipOptions& options = {});

enum class RobustnessKind { QuantumMemory, Markovianity };

struct RobustnessOptions {
  sdp::SolverOptions solver;
  bool extract_witness = false;
  bool facial_reduction = true;
  bool symmetry = true;
  double witness_regularization = 1e-7;
  double threshold = 1e-6;  // classical iff s* >= 1 - threshold
};

struct RobustnessResult {
  double s_star = 1.0;
  double r_star = 0.0;
  MemoryVerdict verdict;
  std::optional<WitnessPair> dual_witness;
  sdp::SolveStatus status = sdp::SolveStatus::Optimal;
  double duality_gap = 0.0;
};

// r* = 1/s* - 1 from the PPT relaxation; a lower bound on the true robustness.
RobustnessResult robustness_quantum_memory(const ChoiOperator& e1, const ChoiOperator& e2,
                                           const RobustnessOptions& options = {});

// max s with s E2 + (1-s) G = link(E1, K) over channels K, G.
RobustnessResult robustness_markovianity(const ChoiOperator& e1, const ChoiOperator& e2,
                                         const RobustnessOptions& options = {});

// Largest s with F - s E2 PSD, the mixing weight certified by an explicit future channel F.
double certified_mixing(const ChoiOperator& future, const ChoiOperator& e2);

struct SeesawOptions {
  int parts = 0;  // 0 selects 4 for d = 2 and 9 for d = 3
  int iterations = 30;
  int restarts = 8;
  std::uint64_t seed = 1;
  double stall_tol = 1e-9;
  sdp::SolverOptions solver;
};

struct SeesawResult {
  double s_lower = 0.0;
  ClassicalDecomposition certificate;
  double recombination_error = 0.0;
  bool stalled = false;
  int restarts_run = 0;
};

SeesawResult seesaw_lower_bound(const ChoiOperator& e1, const ChoiOperator& e2, const SeesawOptions& options = {});

// Upper bound on the number of instrument parts ever needed, d^4 (d^4 + 1).
constexpr long classical_memory_size_bound(long d) { return d * d * d * d * (d * d * d * d + 1); }

}  // namespace qmem
