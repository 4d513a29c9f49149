#pragma once

#include <array>
#include <string>
#include <vector>

#include "qmem/channel.hpp"
#include "qmem/programs.hpp"
#include "qmem/witness_pair.hpp"

namespace qmem {

// Certificate W1 (x) 1_{D'B}/d + N (x) 1_B + Phi_{DD'} (x) W2 = Q + R^{T_AD} on A D D' B,
// with Tr_D'(N) = 0. The shift is the smallest t with (Q + t 1) PSD completing the identity;
// the witness is valid when shift <= tolerance.
struct WitnessCertificate {
  Mat q;
  Mat r;
  Mat n;
  double shift = 0.0;
  double residual = 0.0;
};

struct VerifyResult {
  bool valid = false;
  double min_value = 0.0;  // min of the witness over normalized PPT-classical operators
  WitnessCertificate certificate;
  sdp::SolveStatus status = sdp::SolveStatus::NumericalTrouble;
  std::string message;
};

struct VerifyOptions {
  double tol = 1e-8;
  bool symmetry = true;
  sdp::SolverOptions solver;
};

VerifyResult verify_witness(const WitnessPair& w, const VerifyOptions& options = {});

double evaluate_witness(const WitnessPair& w, const ChoiOperator& e1, const ChoiOperator& e2);

// W_alpha = sum_ij w_ij rho_i (x) O_j, so that tr(W_alpha E) = sum_ij w_ij tr(O_j E[rho_i^T]).
struct RestrictedBasis {
  int dim = 0;
  std::vector<Mat> preparations;
  std::vector<Mat> observables;
  // mask[alpha](i, j) != 0 marks an allowed coefficient
  std::array<Eigen::MatrixXi, 2> mask;
  bool operator_basis = false;  // preparations are raw operators, not states

  void validate() const;
};

struct WitnessCoefficients {
  std::array<Eigen::MatrixXd, 2> w;
  double normalization = 0.0;

  double coefficient_sum() const { return w[0].sum() + w[1].sum(); }
};

enum class Normalization { TraceSum, CoeffSum };

// Pauli operators {1, X, Y, Z} as both preparations and observables, full mask.
RestrictedBasis pauli_basis();
// 11 three-level states g, s, e, (g+e), (s+e), (g-e), (s-e), (g+ie), (g-ie), (s+ie), (s-ie)
// (normalized), used as preparations and as projective observables, full mask.
RestrictedBasis three_level_state_basis();

WitnessPair assemble_from_coefficients(const WitnessCoefficients& coeffs, const RestrictedBasis& basis);

// tr(W1) + tr(W2) of the assembled witness.
double trace_sum(const WitnessCoefficients& coeffs, const RestrictedBasis& basis);

WitnessPair extract_witness_from_dual(const MembershipProgram& program, const sdp::SdpSolution& solution);

struct SearchOptions {
  sdp::SolverOptions solver;
  bool symmetry = true;
};

struct SearchResult {
  WitnessCoefficients coefficients;
  double value = 0.0;  // witness value on the probed pair
  sdp::SolveStatus status = sdp::SolveStatus::NumericalTrouble;
  int orbit_count = 0;
  std::string message;
};

SearchResult restricted_witness_search(const ChoiOperator& e1, const ChoiOperator& e2, const RestrictedBasis& basis,
                                       Normalization normalization, double value,
                                       const SearchOptions& options = {});

}  // namespace qmem
