#include "qmem/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "builder.hpp"

namespace qmem {

using detail::Expr;
using detail::Tag;
using detail::Var;

namespace {

// Index of (a, k, k', b) on A D D' B.
int pair_index(int d, int a, int k, int kp, int b) { return ((a * d + k) * d + kp) * d + b; }

// W1 (x) 1_{D'B} / d on A D D' B.
Mat lift_first(const Mat& w1, int d) { return kron(w1, Mat::Identity(d * d, d * d)) / static_cast<double>(d); }

// Phi_{DD'} (x) W2 on A D D' B, W2 acting on A B.
Mat lift_second(const Mat& w2, int d) {
  const int n = d * d * d * d;
  Mat out = Mat::Zero(n, n);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int a2 = 0; a2 < d; ++a2)
        for (int b2 = 0; b2 < d; ++b2) {
          const cplx v = w2(a * d + b, a2 * d + b2);
          if (v == cplx(0.0)) continue;
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) out(pair_index(d, a, k, k, b), pair_index(d, a2, l, l, b2)) = v;
        }
  return out;
}

// tr(B X) as an expression over the upper triangle.
Expr trace_expr(const Var& x, const Mat& b) {
  Expr e;
  for (int p = 0; p < x.n; ++p) {
    if (b(p, p) != cplx(0.0)) e.push_back({&x, p, p, b(p, p)});
    for (int q = p + 1; q < x.n; ++q)
      if (b(p, q) != cplx(0.0)) e.push_back({&x, q, p, 2.0 * b(p, q)});
  }
  return e;
}

std::vector<sdp::Coef> to_coefs(const Expr& expr) {
  std::vector<sdp::Coef> out;
  for (const auto& t : expr) {
    if (!t.var->allowed(t.i, t.j)) continue;
    const int s = t.var->sector[t.i];
    out.push_back(sdp::re_term(t.var->block[s], t.var->local[t.i], t.var->local[t.j], t.coef));
  }
  return out;
}

struct LinearData {
  Mat op;  // on A D D' B
  double rhs = 0.0;
};

// min tr(L0 X) over X, Y PSD with Y = X^{T_AD}, Tr_B X = F (x) 1_D', and tr(op_i X) = rhs_i.
// The dual is the certificate program L0 + sum_i z_i op_i + N (x) 1_B = Q + R^{T_AD}.
struct PairProgram {
  sdp::SdpProblem problem;
  Var x;
  Var y;
  int first_linear = 0;
};

PairProgram build_pair_program(int d, const Mat& l0, const std::vector<LinearData>& linear, int modulus,
                               bool symmetric) {
  PairProgram prog;
  const int n = d * d * d * d;
  std::vector<Charge> xq(static_cast<std::size_t>(n)), yq(static_cast<std::size_t>(n));
  if (symmetric)
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < d; ++k)
        for (int kp = 0; kp < d; ++kp)
          for (int b = 0; b < d; ++b) {
            const auto i = static_cast<std::size_t>(pair_index(d, a, k, kp, b));
            xq[i] = product_charge({a, k, kp, b}, {-1, 1, -1, 1}, d, modulus);
            yq[i] = product_charge({a, k, kp, b}, {1, -1, -1, 1}, d, modulus);
          }
  auto& prob = prog.problem;
  prog.x = detail::add_var(prob, "X", xq);
  prog.y = detail::add_var(prob, "Y", yq);
  const Var& X = prog.x;
  const Var& Y = prog.y;
  std::vector<Tag> tags;
  const int dd = d * d;

  detail::add_hermitian_equation(
      prob, tags, 0, n,
      [&](int p, int q) {
        const int u = p / dd, s = p % dd, v = q / dd, t = q % dd;
        return Expr{{&Y, p, q, 1.0}, {&X, v * dd + s, u * dd + t, -1.0}};
      },
      Mat::Zero(n, n));

  // Tr_B X - Tr_{D'B} X (x) 1_D' / d = 0; the last D' diagonal entry is implied.
  const int m = d * d * d;
  detail::add_hermitian_equation(
      prob, tags, 1, m,
      [&](int p, int q) {
        Expr e;
        const int u = p / d, k = p % d, v = q / d, l = q % d;
        if (k == l && k == d - 1) return e;
        for (int b = 0; b < d; ++b) e.push_back({&X, p * d + b, q * d + b, 1.0});
        if (k == l)
          for (int j = 0; j < d; ++j)
            for (int b = 0; b < d; ++b) e.push_back({&X, (u * d + j) * d + b, (v * d + j) * d + b, -1.0 / d});
        return e;
      },
      Mat::Zero(m, m));

  prog.first_linear = static_cast<int>(prob.equalities.size());
  for (const auto& lin : linear)
    if (!detail::add_real_constraint(prob, trace_expr(X, lin.op), lin.rhs))
      throw std::logic_error("witness direction vanishes on the symmetric subspace");
  prob.objective = to_coefs(trace_expr(X, l0));
  prob.maximize = false;
  return prog;
}

Mat checked_square(const Mat& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw std::invalid_argument(std::string(what) + " has wrong shape");
  return m;
}

int witness_dim(const WitnessPair& w) {
  if (w.dim < 1) throw std::invalid_argument("witness dimension must be positive");
  const int dd = w.dim * w.dim;
  checked_square(w.w1, dd, "W1");
  checked_square(w.w2, dd, "W2");
  if (hermiticity_defect(w.w1) > 1e-10 || hermiticity_defect(w.w2) > 1e-10)
    throw std::invalid_argument("witness operators must be Hermitian");
  return w.dim;
}

}  // namespace

VerifyResult verify_witness(const WitnessPair& w, const VerifyOptions& options) {
  const int d = witness_dim(w);
  const int n = d * d * d * d;
  const Mat l0 = lift_first(w.w1, d) + lift_second(w.w2, d);
  const PhaseSymmetry sym =
      options.symmetry
          ? detect_covariance({ChoiOperator(d, d, hermitian_part(w.w1)), ChoiOperator(d, d, hermitian_part(w.w2))})
          : PhaseSymmetry{};
  const PairProgram prog = build_pair_program(d, l0, {{Mat::Identity(n, n), 1.0}}, sym.modulus, sym.active);
  const sdp::SdpSolution sol = sdp::solve(prog.problem, options.solver);

  VerifyResult res;
  res.status = sol.status;
  res.min_value = sol.objective_value;
  res.message = sol.message;
  if (sol.status != sdp::SolveStatus::Optimal && sol.status != sdp::SolveStatus::MaxIter) return res;

  const double shift_mult = sol.dual_multipliers(prog.first_linear);
  const Mat q_slack = prog.x.assemble(sol.dual_slacks);
  const Mat r = prog.y.assemble(sol.dual_slacks);
  const Mat r_gamma = partial_transpose(r, {d, d, d, d}, {0, 1});
  auto& cert = res.certificate;
  cert.q = q_slack + shift_mult * Mat::Identity(n, n);
  cert.r = r;
  const Mat n_full = cert.q + r_gamma - l0;
  cert.n = partial_trace(n_full, {d * d * d, d}, 1) / static_cast<double>(d);
  cert.residual = (l0 + kron(cert.n, Mat::Identity(d, d)) - cert.q - r_gamma).cwiseAbs().maxCoeff();
  cert.shift = std::max({0.0, -min_eigenvalue(cert.q), -min_eigenvalue(cert.r)});
  res.valid = res.min_value >= -options.tol && sol.status == sdp::SolveStatus::Optimal;
  return res;
}

double evaluate_witness(const WitnessPair& w, const ChoiOperator& e1, const ChoiOperator& e2) {
  const int d = witness_dim(w);
  if (e1.dim_in() != d || e1.dim_out() != d || e2.dim_in() != d || e2.dim_out() != d)
    throw std::invalid_argument("channel dimensions do not match the witness");
  return (w.w1 * e1.matrix()).trace().real() + (w.w2 * e2.matrix()).trace().real();
}

void RestrictedBasis::validate() const {
  if (dim < 1) throw std::invalid_argument("basis dimension must be positive");
  if (preparations.empty() || observables.empty()) throw std::invalid_argument("basis must not be empty");
  for (const auto& rho : preparations) {
    checked_square(rho, dim, "preparation");
    if (hermiticity_defect(rho) > 1e-10) throw std::invalid_argument("preparation must be Hermitian");
    if (!operator_basis) {
      if (std::abs(rho.trace() - cplx(1.0)) > 1e-10) throw std::invalid_argument("preparation must have unit trace");
      if (min_eigenvalue(rho) < -1e-10) throw std::invalid_argument("preparation must be positive semidefinite");
    }
  }
  for (const auto& o : observables) {
    checked_square(o, dim, "observable");
    if (hermiticity_defect(o) > 1e-10) throw std::invalid_argument("observable must be Hermitian");
  }
  bool any = false;
  for (const auto& m : mask) {
    if (m.rows() != static_cast<int>(preparations.size()) || m.cols() != static_cast<int>(observables.size()))
      throw std::invalid_argument("mask shape does not match the basis");
    any = any || m.any();
  }
  if (!any) throw std::invalid_argument("mask must not be empty");
}

RestrictedBasis pauli_basis() {
  RestrictedBasis b;
  b.dim = 2;
  b.operator_basis = true;
  Mat id = Mat::Identity(2, 2), x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, -kI, kI, 0;
  z << 1, 0, 0, -1;
  b.preparations = {id, x, y, z};
  b.observables = b.preparations;
  b.mask = {Eigen::MatrixXi::Ones(4, 4), Eigen::MatrixXi::Ones(4, 4)};
  return b;
}

RestrictedBasis three_level_state_basis() {
  const double h = 1.0 / std::sqrt(2.0);
  auto ket = [](cplx g, cplx s, cplx e) {
    Vec v(3);
    v << g, s, e;
    return v;
  };
  const std::vector<Vec> kets = {ket(1, 0, 0),      ket(0, 1, 0),       ket(0, 0, 1),       ket(h, 0, h),
                                 ket(0, h, h),      ket(h, 0, -h),      ket(0, h, -h),      ket(h, 0, h * kI),
                                 ket(h, 0, -h * kI), ket(0, h, h * kI), ket(0, h, -h * kI)};
  RestrictedBasis b;
  b.dim = 3;
  for (const auto& v : kets) b.preparations.push_back(v * v.adjoint());
  b.observables = b.preparations;
  const int k = static_cast<int>(kets.size());
  b.mask = {Eigen::MatrixXi::Ones(k, k), Eigen::MatrixXi::Ones(k, k)};
  return b;
}

WitnessPair assemble_from_coefficients(const WitnessCoefficients& coeffs, const RestrictedBasis& basis) {
  basis.validate();
  const int d = basis.dim;
  WitnessPair w{d, Mat::Zero(d * d, d * d), Mat::Zero(d * d, d * d)};
  for (int alpha = 0; alpha < 2; ++alpha) {
    const auto& c = coeffs.w[static_cast<std::size_t>(alpha)];
    if (c.rows() != basis.mask[alpha].rows() || c.cols() != basis.mask[alpha].cols())
      throw std::invalid_argument("coefficient shape does not match the basis");
    Mat& target = alpha == 0 ? w.w1 : w.w2;
    for (int i = 0; i < c.rows(); ++i)
      for (int j = 0; j < c.cols(); ++j) {
        if (c(i, j) == 0.0) continue;
        if (!basis.mask[alpha](i, j)) throw std::invalid_argument("coefficient outside the mask");
        target += c(i, j) * kron(basis.preparations[static_cast<std::size_t>(i)],
                                 basis.observables[static_cast<std::size_t>(j)]);
      }
  }
  return w;
}

double trace_sum(const WitnessCoefficients& coeffs, const RestrictedBasis& basis) {
  double total = 0.0;
  for (int alpha = 0; alpha < 2; ++alpha) {
    const auto& c = coeffs.w[static_cast<std::size_t>(alpha)];
    for (int i = 0; i < c.rows(); ++i)
      for (int j = 0; j < c.cols(); ++j)
        total += c(i, j) * (basis.preparations[static_cast<std::size_t>(i)].trace() *
                            basis.observables[static_cast<std::size_t>(j)].trace())
                               .real();
  }
  return total;
}

WitnessPair extract_witness_from_dual(const MembershipProgram& program, const sdp::SdpSolution& solution) {
  const int d = program.d;
  const auto m = static_cast<Eigen::Index>(program.tag_group.size());
  if (solution.dual_multipliers.size() != m) throw std::invalid_argument("solution does not belong to the program");
  if (program.mixing && solution.objective_value >= 1.0 - 1e-6)
    throw std::runtime_error("no violation to witness: optimal mixing weight is 1");
  std::vector<Tag> tags(program.tag_group.size());
  for (std::size_t i = 0; i < tags.size(); ++i)
    tags[i] = {program.tag_group[i], program.tag_p[i], program.tag_q[i], program.tag_imag[i]};
  const int r = static_cast<int>(program.isometry.cols());
  const Mat lambda = detail::group_multiplier(tags, solution.dual_multipliers, kTraceGroup, r * d);
  const Mat omega = detail::group_multiplier(tags, solution.dual_multipliers, kTargetGroup, d * d);
  if (omega.cwiseAbs().maxCoeff() < 1e-10) throw std::runtime_error("degenerate dual: target multiplier vanishes");
  const Mat lift = kron(program.isometry, Mat::Identity(d, d));
  const Mat l = -(lift * lambda * lift.adjoint());
  WitnessPair w;
  w.dim = d;
  w.w1 = hermitian_part(partial_trace(l, {d * d, d}, 1));
  w.w2 = hermitian_part(-omega);
  return w;
}

namespace {

// Signed permutation induced on a list of operators by conjugation with u; empty when not closed.
std::vector<std::pair<int, double>> induced_permutation(const std::vector<Mat>& ops, const Mat& u) {
  std::vector<std::pair<int, double>> out;
  for (const auto& op : ops) {
    const Mat image = u * op * u.adjoint();
    int found = -1;
    double sign = 0.0;
    for (std::size_t j = 0; j < ops.size() && found < 0; ++j)
      for (double s : {1.0, -1.0})
        if ((image - s * ops[j]).cwiseAbs().maxCoeff() < 1e-12) {
          found = static_cast<int>(j);
          sign = s;
          break;
        }
    if (found < 0) return {};
    out.emplace_back(found, sign);
  }
  return out;
}

// Union-find over coefficients with relative signs; a coefficient tied to its own negative is forced to zero.
struct SignedUnion {
  std::vector<int> parent;
  std::vector<double> sign;  // value = sign * value(parent)
  std::vector<bool> zero;

  explicit SignedUnion(int n) : parent(static_cast<std::size_t>(n)), sign(static_cast<std::size_t>(n), 1.0),
                                zero(static_cast<std::size_t>(n), false) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  std::pair<int, double> find(int i) {
    const auto k = static_cast<std::size_t>(i);
    if (parent[k] == i) return {i, 1.0};
    auto [root, s] = find(parent[k]);
    parent[k] = root;
    sign[k] *= s;
    return {root, sign[k]};
  }

  // Records value(j) = s * value(i).
  void unite(int i, int j, double s) {
    auto [ri, si] = find(i);
    auto [rj, sj] = find(j);
    if (ri == rj) {
      if (sj != s * si) zero[static_cast<std::size_t>(ri)] = true;
      return;
    }
    parent[static_cast<std::size_t>(rj)] = ri;
    sign[static_cast<std::size_t>(rj)] = s * si * sj;
    if (zero[static_cast<std::size_t>(rj)]) zero[static_cast<std::size_t>(ri)] = true;
  }
};

// Indices of a maximal subset of directions that stay linearly independent after removing
// the N (x) 1_B component with Tr_D'(N) = 0.
std::vector<std::size_t> independent_directions(const std::vector<LinearData>& dirs, int d) {
  if (dirs.empty()) return {};
  const int n = d * d * d * d;
  Eigen::MatrixXd cols(2 * n * n, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const Mat& z = dirs[k].op;
    const Mat tb = partial_trace(z, {d * d * d, d}, 1);
    const Mat traceless = tb - kron(partial_trace(tb, {d * d, d}, 1), Mat::Identity(d, d)) / static_cast<double>(d);
    const Mat reduced = z - kron(traceless, Mat::Identity(d, d)) / static_cast<double>(d);
    const auto col = static_cast<Eigen::Index>(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cols(2 * (i * n + j), col) = reduced(i, j).real();
        cols(2 * (i * n + j) + 1, col) = reduced(i, j).imag();
      }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols);
  qr.setThreshold(1e-9);
  const auto rank = qr.rank();
  std::vector<std::size_t> keep;
  for (Eigen::Index r = 0; r < rank; ++r) keep.push_back(static_cast<std::size_t>(qr.colsPermutation().indices()(r)));
  std::sort(keep.begin(), keep.end());
  return keep;
}

}  // namespace

SearchResult restricted_witness_search(const ChoiOperator& e1, const ChoiOperator& e2, const RestrictedBasis& basis,
                                       Normalization normalization, double value, const SearchOptions& options) {
  basis.validate();
  const int d = basis.dim;
  if (e1.dim_in() != d || e1.dim_out() != d || e2.dim_in() != d || e2.dim_out() != d)
    throw std::invalid_argument("channel dimensions do not match the basis");
  const int np = static_cast<int>(basis.preparations.size());
  const int no = static_cast<int>(basis.observables.size());
  const int per = np * no;
  auto index = [&](int alpha, int i, int j) { return alpha * per + i * no + j; };

  // Symmetry generators: a phase of order m on one level.
  PhaseSymmetry sym = options.symmetry ? detect_covariance({e1, e2}) : PhaseSymmetry{};
  int modulus = sym.modulus == 2 ? 2 : 4;
  std::vector<std::vector<std::pair<int, double>>> prep_maps, obs_maps;
  if (sym.active) {
    const cplx omega = std::polar(1.0, 2.0 * M_PI / modulus);
    for (int level = 0; level < d; ++level) {
      Mat u = Mat::Identity(d, d);
      u(level, level) = omega;
      auto pm = induced_permutation(basis.preparations, u.conjugate());
      auto om = induced_permutation(basis.observables, u);
      if (pm.empty() || om.empty()) continue;
      bool ok = true;
      for (int alpha = 0; alpha < 2 && ok; ++alpha)
        for (int i = 0; i < np && ok; ++i)
          for (int j = 0; j < no && ok; ++j) {
            const auto [pi, ps] = pm[static_cast<std::size_t>(i)];
            const auto [oj, os] = om[static_cast<std::size_t>(j)];
            if (basis.mask[alpha](i, j) != basis.mask[alpha](pi, oj)) ok = false;
            if (normalization == Normalization::CoeffSum && basis.mask[alpha](i, j) && ps * os < 0) ok = false;
          }
      if (!ok) continue;
      prep_maps.push_back(std::move(pm));
      obs_maps.push_back(std::move(om));
    }
  }
  const bool symmetric = !prep_maps.empty();

  SignedUnion uf(2 * per);
  for (std::size_t g = 0; g < prep_maps.size(); ++g)
    for (int alpha = 0; alpha < 2; ++alpha)
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < no; ++j) {
          if (!basis.mask[alpha](i, j)) continue;
          const auto [pi, ps] = prep_maps[g][static_cast<std::size_t>(i)];
          const auto [oj, os] = obs_maps[g][static_cast<std::size_t>(j)];
          uf.unite(index(alpha, i, j), index(alpha, pi, oj), ps * os);
        }

  // Orbit directions and data.
  struct Orbit {
    std::vector<std::pair<int, double>> members;
    Mat op;
    double f = 0.0;
    double g = 0.0;
  };
  std::map<int, int> orbit_of_root;
  std::vector<Orbit> orbits;
  const ChoiOperator* pair[2] = {&e1, &e2};
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < no; ++j) {
        if (!basis.mask[alpha](i, j)) continue;
        const auto [root, s] = uf.find(index(alpha, i, j));
        if (uf.zero[static_cast<std::size_t>(root)]) continue;
        auto [it, fresh] = orbit_of_root.emplace(root, static_cast<int>(orbits.size()));
        if (fresh) orbits.push_back({{}, Mat::Zero(d * d * d * d, d * d * d * d), 0.0, 0.0});
        Orbit& o = orbits[static_cast<std::size_t>(it->second)];
        const Mat& rho = basis.preparations[static_cast<std::size_t>(i)];
        const Mat& obs = basis.observables[static_cast<std::size_t>(j)];
        const Mat local = kron(rho, obs);
        o.members.emplace_back(index(alpha, i, j), s);
        o.op += s * (alpha == 0 ? lift_first(local, d) : lift_second(local, d));
        o.f += s * (local * pair[alpha]->matrix()).trace().real();
        o.g += s * (normalization == Normalization::CoeffSum ? 1.0 : (rho.trace() * obs.trace()).real());
      }
  if (orbits.empty()) throw std::invalid_argument("no free coefficients remain on the mask");

  std::size_t pivot = 0;
  for (std::size_t k = 1; k < orbits.size(); ++k)
    if (std::abs(orbits[k].g) > std::abs(orbits[pivot].g)) pivot = k;
  const double gp = orbits[pivot].g;
  if (std::abs(gp) < 1e-12) throw std::invalid_argument("infeasible normalization: it vanishes on every coefficient");

  const Mat l0 = (value / gp) * orbits[pivot].op;
  std::vector<LinearData> candidates;
  std::vector<std::size_t> candidate_orbits;
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    if (k == pivot) continue;
    const double ratio = orbits[k].g / gp;
    candidates.push_back({orbits[k].op - ratio * orbits[pivot].op, orbits[k].f - ratio * orbits[pivot].f});
    candidate_orbits.push_back(k);
  }
  // Directions that differ only by an N (x) 1_B term are interchangeable; keep an independent subset.
  std::vector<LinearData> linear;
  std::vector<std::size_t> free_orbits;
  for (std::size_t k : independent_directions(candidates, d)) {
    linear.push_back(candidates[k]);
    free_orbits.push_back(candidate_orbits[k]);
  }
  const PairProgram prog = build_pair_program(d, l0, linear, modulus, symmetric);
  const sdp::SdpSolution sol = sdp::solve(prog.problem, options.solver);

  SearchResult res;
  res.status = sol.status;
  res.orbit_count = static_cast<int>(orbits.size());
  res.message = sol.message;
  if (sol.dual_multipliers.size() != static_cast<Eigen::Index>(prog.problem.equalities.size())) {
    res.value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  std::vector<double> z(orbits.size(), 0.0);
  double constrained = 0.0;
  for (std::size_t k = 0; k < free_orbits.size(); ++k) {
    const std::size_t o = free_orbits[k];
    z[o] = -sol.dual_multipliers(prog.first_linear + static_cast<Eigen::Index>(k));
    constrained += orbits[o].g * z[o];
  }
  z[pivot] = (value - constrained) / gp;
  res.coefficients.normalization = value;
  res.coefficients.w = {Eigen::MatrixXd::Zero(np, no), Eigen::MatrixXd::Zero(np, no)};
  for (std::size_t o = 0; o < orbits.size(); ++o)
    for (const auto& [k, s] : orbits[o].members) res.coefficients.w[static_cast<std::size_t>(k / per)]((k % per) / no, k % no) = s * z[o];
  res.value = evaluate_witness(assemble_from_coefficients(res.coefficients, basis), e1, e2);
  return res;
}

}  // namespace qmem
