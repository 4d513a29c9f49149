#pragma once

#include <vector>

#include "qmem/channel.hpp"

namespace qmem {

// Diagonal phase group acting on a d-level system. modulus 0 is the full torus
// U(1)^d; modulus m > 0 restricts every phase to m-th roots of unity.
struct PhaseSymmetry {
  bool active = false;
  int modulus = 0;
};

using Charge = std::vector<int>;

// Charge of a product basis state; signs[k] = +1 for a ket factor, -1 for a conjugated factor.
Charge product_charge(const std::vector<int>& levels, const std::vector<int>& signs, int d, int modulus);

// Largest diagonal phase group (torus, then Z4, then Z2) under which every Choi operator
// is covariant; inactive when none applies.
PhaseSymmetry detect_covariance(const std::vector<ChoiOperator>& chois, double tol = 1e-12);

}  // namespace qmem
