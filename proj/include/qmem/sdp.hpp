#pragma once

#include <string>
#include <vector>

#include "qmem/linalg.hpp"

namespace qmem::sdp {

// One entry of a Hermitian coefficient matrix on a block. For row != col the entry also
// implies the conjugate entry at (col, row); for row == col only the real part is used.
// Duplicate entries accumulate.
struct Coef {
  int block = 0;
  int row = 0;
  int col = 0;
  cplx value;
};

// Coefficient list representing Re(coef * X_block[row, col]) as a trace functional.
Coef re_term(int block, int row, int col, cplx coef);

struct Block {
  std::string name;
  int dim = 0;
};

struct Constraint {
  std::vector<Coef> terms;
  double rhs = 0.0;
};

// minimize (or maximize) sum_k tr(C_k X_k) s.t. sum_k tr(A_ik X_k) = b_i, X_k PSD.
struct SdpProblem {
  std::vector<Block> blocks;
  std::vector<Constraint> equalities;
  std::vector<Coef> objective;
  bool maximize = false;

  int add_block(std::string name, int dim);
  int total_dimension() const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalTrouble };
std::string to_string(SolveStatus s);

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-7;
  int max_iterations = 200;
  bool verbose = false;  // per-iteration log on stderr
};

// Dual: maximize b^T y s.t. S = C_min - sum_i y_i A_i PSD, where C_min is the objective
// of the equivalent minimization (negated when maximize is set).
struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalTrouble;
  std::vector<Mat> primal_blocks;
  Eigen::VectorXd dual_multipliers;
  std::vector<Mat> dual_slacks;
  double objective_value = 0.0;  // primal objective in the problem's own sense
  double dual_objective = 0.0;   // same sense as objective_value
  double duality_gap = 0.0;      // relative
  double primal_residual = 0.0;  // relative
  double dual_residual = 0.0;    // relative
  int iterations = 0;
  std::string message;
};

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

// Evaluates sum_k tr(A_k X_k) for a coefficient list.
double evaluate(const std::vector<Coef>& terms, const std::vector<Mat>& blocks);

}  // namespace qmem::sdp
