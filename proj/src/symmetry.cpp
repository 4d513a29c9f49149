#include "qmem/symmetry.hpp"

#include <stdexcept>

namespace qmem {

Charge product_charge(const std::vector<int>& levels, const std::vector<int>& signs, int d, int modulus) {
  Charge q(static_cast<std::size_t>(d), 0);
  for (std::size_t k = 0; k < levels.size(); ++k) q[static_cast<std::size_t>(levels[k])] += signs[k];
  if (modulus > 0)
    for (auto& v : q) v = ((v % modulus) + modulus) % modulus;
  return q;
}

namespace {

bool covariant(const ChoiOperator& e, int modulus, double tol) {
  const int din = e.dim_in();
  const int dout = e.dim_out();
  if (din != dout) return false;
  const int d = din;
  const Mat& m = e.matrix();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int r = 0; r < d * d; ++r)
    for (int c = 0; c < d * d; ++c) {
      if (std::abs(m(r, c)) <= tol * scale) continue;
      const Charge qr = product_charge({r / d, r % d}, {-1, 1}, d, modulus);
      const Charge qc = product_charge({c / d, c % d}, {-1, 1}, d, modulus);
      if (qr != qc) return false;
    }
  return true;
}

}  // namespace

PhaseSymmetry detect_covariance(const std::vector<ChoiOperator>& chois, double tol) {
  if (chois.empty()) return {};
  for (int modulus : {0, 4, 2}) {
    bool all = true;
    for (const auto& e : chois)
      if (!covariant(e, modulus, tol)) {
        all = false;
        break;
      }
    if (all) return {true, modulus};
  }
  return {};
}

}  // namespace qmem
