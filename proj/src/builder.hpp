#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmem/sdp.hpp"
#include "qmem/symmetry.hpp"

namespace qmem::detail {

// Hermitian matrix variable split into charge sectors, one PSD block per sector.
struct Var {
  int n = 0;
  std::vector<int> sector;
  std::vector<int> local;
  std::vector<int> block;  // per sector
  std::vector<int> size;   // per sector

  bool allowed(int i, int j) const { return sector[i] == sector[j]; }

  // Reassembles the full matrix from solver blocks.
  Mat assemble(const std::vector<Mat>& blocks) const {
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (allowed(i, j)) m(i, j) = blocks[block[sector[i]]](local[i], local[j]);
    return m;
  }
};

inline Var add_var(sdp::SdpProblem& p, const std::string& name, const std::vector<Charge>& charges) {
  Var v;
  v.n = static_cast<int>(charges.size());
  v.sector.resize(charges.size());
  v.local.resize(charges.size());
  std::map<Charge, int> index;
  for (std::size_t i = 0; i < charges.size(); ++i) {
    auto it = index.find(charges[i]);
    int s;
    if (it == index.end()) {
      s = static_cast<int>(v.size.size());
      index.emplace(charges[i], s);
      v.size.push_back(0);
    } else {
      s = it->second;
    }
    v.sector[i] = s;
    v.local[i] = v.size[s]++;
  }
  for (std::size_t s = 0; s < v.size.size(); ++s)
    v.block.push_back(p.add_block(v.size.size() == 1 ? name : name + "[" + std::to_string(s) + "]", v.size[s]));
  return v;
}

inline Var add_plain_var(sdp::SdpProblem& p, const std::string& name, int n) {
  return add_var(p, name, std::vector<Charge>(static_cast<std::size_t>(n), Charge{}));
}

struct Term {
  const Var* var;
  int i;
  int j;
  cplx coef;
};

using Expr = std::vector<Term>;

// Appends Re(expr) = rhs, skipping structurally vanishing rows. Returns false when skipped.
inline bool add_real_constraint(sdp::SdpProblem& p, const Expr& expr, double rhs) {
  sdp::Constraint con;
  con.rhs = rhs;
  for (const auto& t : expr) {
    if (std::abs(t.coef) < 1e-15) continue;
    if (!t.var->allowed(t.i, t.j)) continue;
    const int s = t.var->sector[t.i];
    sdp::Coef c = sdp::re_term(t.var->block[s], t.var->local[t.i], t.var->local[t.j], t.coef);
    if (std::abs(c.value) < 1e-15) continue;
    con.terms.push_back(c);
  }
  if (con.terms.empty()) {
    if (std::abs(rhs) > 1e-9) throw std::logic_error("constraint vanishes by symmetry but has nonzero right-hand side");
    return false;
  }
  p.equalities.push_back(std::move(con));
  return true;
}

// Records which Hermitian matrix entry a real constraint encodes.
struct Tag {
  int group = -1;
  int p = 0;
  int q = 0;
  bool imag = false;
};

// Adds Hermitian matrix equation expr(p, q) = rhs(p, q) for p <= q.
template <class ExprFn>
void add_hermitian_equation(sdp::SdpProblem& prob, std::vector<Tag>& tags, int group, int n, ExprFn&& expr_at,
                            const Mat& rhs) {
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      Expr e = expr_at(p, q);
      if (add_real_constraint(prob, e, rhs(p, q).real())) tags.push_back({group, p, q, false});
      if (p == q) continue;
      for (auto& t : e) t.coef *= -kI;
      if (add_real_constraint(prob, e, rhs(p, q).imag())) tags.push_back({group, p, q, true});
    }
}

// Rebuilds the Hermitian multiplier of a tagged group from dual multipliers.
inline Mat group_multiplier(const std::vector<Tag>& tags, const Eigen::VectorXd& y, int group, int n) {
  Mat m = Mat::Zero(n, n);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    if (t.group != group) continue;
    const double v = y(static_cast<Eigen::Index>(i));
    if (t.p == t.q) {
      m(t.p, t.p) += v;
    } else if (t.imag) {
      m(t.q, t.p) += cplx(0.0, -0.5 * v);
    } else {
      m(t.q, t.p) += 0.5 * v;
    }
  }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) m(p, q) = std::conj(m(q, p));
  return m;
}

}  // namespace qmem::detail
