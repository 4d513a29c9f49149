#pragma once

#include <string>
#include <vector>

#include "qmem/channel.hpp"
#include "qmem/dynamics.hpp"

namespace qmem {

enum class MemoryKind { Markovian, ClassicalNonMarkovian, QuantumMemory };

std::string to_string(MemoryKind k);
MemoryKind memory_kind_from_string(const std::string& s);

struct MemoryVerdict {
  MemoryKind kind = MemoryKind::Markovian;
  double margin = 0.0;
};

MemoryVerdict classify_two_level(cplx c1, cplx c2);
// Markovian iff G2 >= G1 and G1 + |d1|^2 >= G2 + |d2|^2; otherwise quantum iff |d2| > |d1|.
MemoryVerdict classify_three_level(const ThreeLevelDecay& s1, const ThreeLevelDecay& s2);
MemoryVerdict classify_dephasing(cplx a1, cplx a2);

// Instrument on the earlier channel plus one transition channel per outcome.
struct ClassicalDecomposition {
  SubchannelDecomposition instrument;
  std::vector<ChoiOperator> transitions;

  // sum_i link(instrument_i, transition_i)
  ChoiOperator recombine() const;
};

struct DephasingInstrument {
  cplx gamma;
  cplx delta;
  ClassicalDecomposition decomposition;
};

DephasingInstrument dephasing_instrument(cplx a1, cplx a2);

// K with link(C[c1], K) = C[c2]; CPTP iff |c2| <= |c1|.
ChoiOperator markovian_transition_two_level(cplx c1, cplx c2);

// Jump-resolved instrument on E1 with transitions reproducing E2; requires |d2| <= |d1|.
ClassicalDecomposition three_level_classical_decomposition(const ThreeLevelDecay& s1, const ThreeLevelDecay& s2);

// Instrument parts become U o I_i o pre, transitions post o K_i o U^dagger.
ClassicalDecomposition transform_decomposition(const ClassicalDecomposition& decomp, const ChoiOperator& pre,
                                               const Mat& unitary, const ChoiOperator& post);

}  // namespace qmem
