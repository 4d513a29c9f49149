#pragma once

#include <optional>

#include "qmem/linalg.hpp"

namespace qmem {

// Linear functional tr(W1 E1) + tr(W2 E2) on pairs of Choi operators; W1 acts on A (x) D,
// W2 on A (x) B.
struct WitnessPair {
  int dim = 0;
  Mat w1;
  Mat w2;
};

}  // namespace qmem
