#include "qmem/criteria.hpp"

#include <cmath>
#include <stdexcept>

namespace qmem {

std::string to_string(MemoryKind k) {
  switch (k) {
    case MemoryKind::Markovian:
      return "Markovian";
    case MemoryKind::ClassicalNonMarkovian:
      return "ClassicalNonMarkovian";
    case MemoryKind::QuantumMemory:
      return "QuantumMemory";
  }
  return "unknown";
}

MemoryKind memory_kind_from_string(const std::string& s) {
  if (s == "Markovian") return MemoryKind::Markovian;
  if (s == "ClassicalNonMarkovian") return MemoryKind::ClassicalNonMarkovian;
  if (s == "QuantumMemory") return MemoryKind::QuantumMemory;
  throw std::invalid_argument("unknown memory kind: " + s);
}

MemoryVerdict classify_two_level(cplx c1, cplx c2) {
  const double margin = std::abs(c1) - std::abs(c2);
  return {margin >= 0.0 ? MemoryKind::Markovian : MemoryKind::QuantumMemory, margin};
}

MemoryVerdict classify_three_level(const ThreeLevelDecay& s1, const ThreeLevelDecay& s2) {
  const double slack_ground = s2.G - s1.G;
  const double slack_excited = (s1.G + std::norm(s1.d)) - (s2.G + std::norm(s2.d));
  const double margin = std::min(slack_ground, slack_excited);
  if (margin >= 0.0) return {MemoryKind::Markovian, margin};
  return {std::abs(s2.d) > std::abs(s1.d) ? MemoryKind::QuantumMemory : MemoryKind::ClassicalNonMarkovian, margin};
}

MemoryVerdict classify_dephasing(cplx a1, cplx a2) {
  const double margin = std::abs(a1) - std::abs(a2);
  return {margin >= 0.0 ? MemoryKind::Markovian : MemoryKind::ClassicalNonMarkovian, margin};
}

ChoiOperator ClassicalDecomposition::recombine() const {
  if (transitions.size() != instrument.parts.size())
    throw std::invalid_argument("one transition channel per instrument part required");
  const auto& p0 = instrument.parts.front();
  Mat sum = Mat::Zero(p0.dim_in() * transitions.front().dim_out(), p0.dim_in() * transitions.front().dim_out());
  for (std::size_t i = 0; i < transitions.size(); ++i)
    sum += link_product(instrument.parts[i], transitions[i]).matrix();
  return ChoiOperator(p0.dim_in(), transitions.front().dim_out(), sum);
}

namespace {

// Point on |z| = 1/2 with |a - z| = 1/2.
cplx half_circle_point(cplx a) {
  const double r = std::abs(a);
  if (r < 1e-15) return 0.5;
  const double h = std::sqrt(std::max(0.0, 0.25 - 0.25 * r * r));
  const cplx dir = a / r;
  const cplx p1 = 0.5 * a + kI * h * dir;
  const cplx p2 = 0.5 * a - kI * h * dir;
  if (std::abs(p1.imag() - p2.imag()) > 1e-15) return p1.imag() > p2.imag() ? p1 : p2;
  return p1.real() >= p2.real() ? p1 : p2;
}

ChoiOperator coherence_block(double diag, cplx off) {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = diag;
  m(3, 3) = diag;
  m(0, 3) = off;
  m(3, 0) = std::conj(off);
  return ChoiOperator(2, 2, m);
}

}  // namespace

DephasingInstrument dephasing_instrument(cplx a1, cplx a2) {
  if (std::abs(a1) > 1.0 + 1e-12 || std::abs(a2) > 1.0 + 1e-12)
    throw std::invalid_argument("dephasing parameters must lie in the unit disk");
  DephasingInstrument out;
  out.gamma = half_circle_point(a1);
  out.delta = half_circle_point(a2);
  const cplx g2 = a1 - out.gamma;
  const cplx d2 = a2 - out.delta;
  auto& dec = out.decomposition;
  dec.instrument.parent = dephasing_channel(a1);
  dec.instrument.parts = {coherence_block(0.5, out.gamma), coherence_block(0.5, g2)};
  dec.transitions = {dephasing_channel(out.delta / out.gamma), dephasing_channel(d2 / g2)};
  return out;
}

ChoiOperator markovian_transition_two_level(cplx c1, cplx c2) {
  if (c1 == cplx(0.0)) throw std::invalid_argument("c1 must be nonzero");
  const cplx ratio = c2 / c1;
  const double a = std::norm(ratio);
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = 1.0;
  m(0, 3) = std::conj(ratio);
  m(3, 0) = ratio;
  m(2, 2) = 1.0 - a;
  m(3, 3) = a;
  return ChoiOperator(2, 2, m);
}

ClassicalDecomposition three_level_classical_decomposition(const ThreeLevelDecay& s1, const ThreeLevelDecay& s2) {
  const double a1 = std::norm(s1.d), a2 = std::norm(s2.d);
  if (a2 > a1 + 1e-12) throw std::invalid_argument("|d2| > |d1|: no classical decomposition exists");
  const double g1 = s1.G, r1 = 1.0 - a1 - s1.G, decayed = std::max(a1 - a2, 0.0);
  // Distribute G2 over the ground jump, the no-jump branch and the metastable jump, in that order.
  double need = s2.G;
  const double from_ground = std::min(need, g1);
  need -= from_ground;
  const double from_coherent = std::min(need, decayed);
  need -= from_coherent;
  const double from_meta = std::min(need, r1);
  if (need - from_meta > 1e-12) throw std::invalid_argument("target ground population exceeds what E1 can supply");
  auto fraction = [](double x, double total) { return total > 1e-300 ? std::min(x / total, 1.0) : 1.0; };
  auto replace = [](double p_ground) {
    Mat sigma = Mat::Zero(3, 3);
    sigma(0, 0) = p_ground;
    sigma(1, 1) = 1.0 - p_ground;
    return ChoiOperator(3, 3, kron(Mat::Identity(3, 3), sigma));
  };

  ClassicalDecomposition out;
  out.instrument.parent = channel_three_level(s1);
  Mat coherent = channel_three_level(s1.d, 0.0, s1.phi_s).matrix();
  coherent(7, 7) = 0.0;
  Mat ground = Mat::Zero(9, 9), meta = Mat::Zero(9, 9);
  ground(6, 6) = g1;
  meta(7, 7) = r1;
  out.instrument.parts = {ChoiOperator(3, 3, coherent), ChoiOperator(3, 3, ground), ChoiOperator(3, 3, meta)};
  const cplx ratio = a1 > 0.0 ? s2.d / s1.d : cplx(0.0);
  const double g_coherent = a1 > 0.0 ? from_coherent / a1 : 0.0;
  out.transitions = {channel_three_level(ratio, std::min(g_coherent, 1.0 - std::norm(ratio)), s2.phi_s - s1.phi_s),
                     replace(fraction(from_ground, g1)), replace(fraction(from_meta, r1))};
  return out;
}

ClassicalDecomposition transform_decomposition(const ClassicalDecomposition& decomp, const ChoiOperator& pre,
                                               const Mat& unitary, const ChoiOperator& post) {
  const ChoiOperator u = unitary_channel(unitary);
  const ChoiOperator u_inv = unitary_channel(unitary.adjoint());
  ClassicalDecomposition out;
  out.instrument.parent = link_product(link_product(pre, decomp.instrument.parent), u);
  for (const auto& part : decomp.instrument.parts) out.instrument.parts.push_back(link_product(link_product(pre, part), u));
  for (const auto& k : decomp.transitions) out.transitions.push_back(link_product(link_product(u_inv, k), post));
  return out;
}

}  // namespace qmem
