#include "qmem/programs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "builder.hpp"
#include "qmem/witness.hpp"

namespace qmem {

using detail::Expr;
using detail::Tag;
using detail::Term;
using detail::Var;

namespace {

int check_pair(const ChoiOperator& e1, const ChoiOperator& e2) {
  const int d = e1.dim_in();
  if (e1.dim_out() != d || e2.dim_in() != d || e2.dim_out() != d)
    throw std::invalid_argument("channel pair must act on a common dimension");
  return d;
}

Charge negate(const Charge& q, int modulus) {
  Charge out(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    out[k] = -q[k];
    if (modulus > 0) out[k] = ((out[k] % modulus) + modulus) % modulus;
  }
  return out;
}

Charge add(const Charge& a, const Charge& b, int modulus) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Charge out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k] = a[k] + b[k];
    if (modulus > 0) out[k] = ((out[k] % modulus) + modulus) % modulus;
  }
  return out;
}

// Charges of Choi-type indices (in, out) -> -e_in + e_out.
std::vector<Charge> choi_charges(int d, const PhaseSymmetry& sym) {
  std::vector<Charge> q(static_cast<std::size_t>(d * d));
  if (!sym.active) return q;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) q[static_cast<std::size_t>(a * d + b)] = product_charge({a, b}, {-1, 1}, d, sym.modulus);
  return q;
}

void push_tag(MembershipProgram& prog, const Tag& t) {
  prog.tag_group.push_back(t.group);
  prog.tag_p.push_back(t.p);
  prog.tag_q.push_back(t.q);
  prog.tag_imag.push_back(t.imag);
}

double clamp_unit(double s) { return std::clamp(s, 0.0, 1.0); }

double robustness_from_s(double s) { return s > 0.0 ? 1.0 / s - 1.0 : std::numeric_limits<double>::infinity(); }

}  // namespace

MembershipProgram build_ppt_membership(const ChoiOperator& e1_in, const ChoiOperator& e2,
                                       const MembershipOptions& options) {
  const int d = check_pair(e1_in, e2);
  MembershipProgram prog;
  prog.d = d;
  prog.mixing = options.mixing;
  const int dd = d * d;
  Mat e1m = e1_in.matrix();
  if (options.regularization > 0.0)
    e1m = (1.0 - options.regularization) * e1m + options.regularization / d * Mat::Identity(dd, dd);
  prog.e1 = ChoiOperator(d, d, e1m);
  prog.e2 = e2;
  prog.symmetry = options.symmetry ? detect_covariance({prog.e1, e2}) : PhaseSymmetry{};
  const auto& sym = prog.symmetry;
  const int mod = sym.modulus;
  const auto ad_charge = choi_charges(d, sym);

  // Basis for the A D factor, each vector carrying a definite charge.
  std::vector<Vec> basis;
  std::vector<Charge> basis_charge;
  if (options.facial_reduction) {
    std::map<Charge, std::vector<int>> sectors;
    for (int i = 0; i < dd; ++i) sectors[ad_charge[static_cast<std::size_t>(i)]].push_back(i);
    const double top = std::max(e1m.cwiseAbs().maxCoeff(), 1e-300);
    for (const auto& [q, idx] : sectors) {
      const int k = static_cast<int>(idx.size());
      Mat sub(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = e1m(idx[i], idx[j]);
      Eigen::SelfAdjointEigenSolver<Mat> es(sub);
      for (int c = k - 1; c >= 0; --c) {
        if (es.eigenvalues()(c) <= 1e-10 * top) continue;
        Vec v = Vec::Zero(dd);
        for (int i = 0; i < k; ++i) v(idx[i]) = es.eigenvectors()(i, c);
        basis.push_back(v);
        basis_charge.push_back(q);
      }
    }
  } else {
    for (int i = 0; i < dd; ++i) {
      Vec v = Vec::Zero(dd);
      v(i) = 1.0;
      basis.push_back(v);
      basis_charge.push_back(ad_charge[static_cast<std::size_t>(i)]);
    }
  }
  const int r = static_cast<int>(basis.size());
  prog.isometry = Mat(dd, r);
  for (int u = 0; u < r; ++u) prog.isometry.col(u) = basis[static_cast<std::size_t>(u)];
  const Mat& iso = prog.isometry;
  const Mat e1_red = iso.adjoint() * e1m * iso;

  // X indices (u, d', b); Y = X^T over the u factor.
  const int nx = r * dd;
  std::vector<Charge> xq(static_cast<std::size_t>(nx)), yq(static_cast<std::size_t>(nx));
  for (int u = 0; u < r; ++u)
    for (int x = 0; x < dd; ++x) {
      const Charge& qx = ad_charge[static_cast<std::size_t>(x)];
      xq[static_cast<std::size_t>(u * dd + x)] = add(basis_charge[static_cast<std::size_t>(u)], qx, mod);
      yq[static_cast<std::size_t>(u * dd + x)] = add(negate(basis_charge[static_cast<std::size_t>(u)], mod), qx, mod);
    }
  auto& prob = prog.problem;
  const Var X = detail::add_var(prob, "X", xq);
  const Var Y = detail::add_var(prob, "Y", yq);
  Var G, S;
  if (options.mixing) {
    G = detail::add_var(prob, "G", ad_charge);
    S = detail::add_plain_var(prob, "s", 1);
    prog.s_block = S.block[0];
    prob.objective.push_back(sdp::re_term(prog.s_block, 0, 0, 1.0));
    prob.maximize = true;
  }
  std::vector<Tag> tags;

  // Tr_B X = E1 (x) 1_D'
  {
    Mat rhs = Mat::Zero(r * d, r * d);
    for (int u = 0; u < r; ++u)
      for (int v = 0; v < r; ++v)
        for (int k = 0; k < d; ++k) rhs(u * d + k, v * d + k) = e1_red(u, v);
    detail::add_hermitian_equation(
        prob, tags, kTraceGroup, r * d,
        [&](int p, int q) {
          Expr e;
          for (int b = 0; b < d; ++b) e.push_back({&X, p * d + b, q * d + b, 1.0});
          return e;
        },
        rhs);
  }
  // <Phi|X|Phi>_{DD'} = s E2 + G'
  {
    // Without mixing, Tr_B of this block is implied by the trace group; drop the b = b' = d-1 entries.
    Mat rhs = options.mixing ? Mat(Mat::Zero(dd, dd)) : e2.matrix();
    if (!options.mixing)
      for (int a = 0; a < d; ++a)
        for (int a2 = 0; a2 < d; ++a2) rhs(a * d + d - 1, a2 * d + d - 1) = 0.0;
    detail::add_hermitian_equation(
        prob, tags, kTargetGroup, dd,
        [&](int p, int q) {
          const int a = p / d, b = p % d, a2 = q / d, b2 = q % d;
          Expr e;
          if (!options.mixing && b == d - 1 && b2 == d - 1) return e;
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l)
              for (int u = 0; u < r; ++u) {
                const cplx cu = iso(a * d + k, u);
                if (cu == cplx(0.0)) continue;
                for (int v = 0; v < r; ++v) {
                  const cplx cv = std::conj(iso(a2 * d + l, v));
                  if (cv == cplx(0.0)) continue;
                  e.push_back({&X, (u * d + k) * d + b, (v * d + l) * d + b2, cu * cv});
                }
              }
          if (options.mixing) {
            e.push_back({&S, 0, 0, -e2(p, q)});
            e.push_back({&G, p, q, -1.0});
          }
          return e;
        },
        rhs);
  }
  // Y = X^{T_u}
  detail::add_hermitian_equation(
      prob, tags, kTransposeGroup, nx,
      [&](int p, int q) {
        const int u = p / dd, x = p % dd, v = q / dd, y = q % dd;
        return Expr{{&Y, p, q, 1.0}, {&X, v * dd + x, u * dd + y, -1.0}};
      },
      Mat::Zero(nx, nx));
  prog.group_sizes = {r * d, dd, nx};
  for (const auto& t : tags) push_tag(prog, t);
  return prog;
}

double certified_mixing(const ChoiOperator& future, const ChoiOperator& e2) {
  const Mat& f = future.matrix();
  const Mat& t = e2.matrix();
  const double tol = 1e-12;
  auto ok = [&](double s) { return min_eigenvalue(f - s * t) >= -tol; };
  if (!ok(0.0)) return 0.0;
  if (ok(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

namespace {

MemoryVerdict quantum_verdict(double s, double threshold) {
  if (s >= 1.0 - threshold) return {MemoryKind::ClassicalNonMarkovian, s - 1.0 + threshold};
  return {MemoryKind::QuantumMemory, s - 1.0};
}

MemoryVerdict markov_verdict(double s, double threshold) {
  if (s >= 1.0 - threshold) return {MemoryKind::Markovian, s - 1.0 + threshold};
  return {MemoryKind::ClassicalNonMarkovian, s - 1.0};
}

}  // namespace

RobustnessResult robustness_quantum_memory(const ChoiOperator& e1, const ChoiOperator& e2,
                                           const RobustnessOptions& options) {
  check_pair(e1, e2);
  MembershipOptions mo;
  mo.facial_reduction = options.facial_reduction;
  mo.symmetry = options.symmetry;
  const MembershipProgram prog = build_ppt_membership(e1, e2, mo);
  const sdp::SdpSolution sol = sdp::solve(prog.problem, options.solver);
  RobustnessResult res;
  res.status = sol.status;
  res.duality_gap = sol.duality_gap;
  res.s_star = clamp_unit(sol.objective_value);
  if (res.s_star >= 1.0 - 1e-9) res.s_star = 1.0;
  res.r_star = robustness_from_s(res.s_star);
  res.verdict = quantum_verdict(res.s_star, options.threshold);
  if (options.extract_witness && res.s_star < 1.0 - options.threshold) {
    MembershipOptions full;
    full.facial_reduction = false;
    full.symmetry = options.symmetry;
    full.regularization = options.witness_regularization;
    const MembershipProgram wprog = build_ppt_membership(e1, e2, full);
    const sdp::SdpSolution wsol = sdp::solve(wprog.problem, options.solver);
    if (wsol.status == sdp::SolveStatus::Optimal) res.dual_witness = extract_witness_from_dual(wprog, wsol);
  }
  return res;
}

RobustnessResult robustness_markovianity(const ChoiOperator& e1, const ChoiOperator& e2,
                                         const RobustnessOptions& options) {
  const int d = check_pair(e1, e2);
  const int dd = d * d;
  const PhaseSymmetry sym = options.symmetry ? detect_covariance({e1, e2}) : PhaseSymmetry{};
  const auto q = choi_charges(d, sym);
  sdp::SdpProblem prob;
  const Var K = detail::add_var(prob, "K", q);
  const Var G = detail::add_var(prob, "G", q);
  const Var S = detail::add_plain_var(prob, "s", 1);
  prob.objective.push_back(sdp::re_term(S.block[0], 0, 0, 1.0));
  prob.maximize = true;
  std::vector<Tag> tags;
  const Mat& m1 = e1.matrix();
  detail::add_hermitian_equation(
      prob, tags, 0, dd,
      [&](int p, int qq) {
        const int a = p / d, c = p % d, a2 = qq / d, c2 = qq % d;
        Expr e;
        for (int b = 0; b < d; ++b)
          for (int b2 = 0; b2 < d; ++b2) {
            const cplx w = m1(a * d + b, a2 * d + b2);
            if (w != cplx(0.0)) e.push_back({&K, b * d + c, b2 * d + c2, w});
          }
        e.push_back({&S, 0, 0, -e2(p, qq)});
        e.push_back({&G, p, qq, -1.0});
        return e;
      },
      Mat::Zero(dd, dd));
  detail::add_hermitian_equation(
      prob, tags, 1, d,
      [&](int b, int b2) {
        Expr e;
        for (int c = 0; c < d; ++c) e.push_back({&K, b * d + c, b2 * d + c, 1.0});
        return e;
      },
      Mat::Identity(d, d));
  const sdp::SdpSolution sol = sdp::solve(prob, options.solver);
  RobustnessResult res;
  res.status = sol.status;
  res.duality_gap = sol.duality_gap;
  res.s_star = clamp_unit(sol.objective_value);
  if (res.s_star >= 1.0 - 1e-9) res.s_star = 1.0;
  res.r_star = robustness_from_s(res.s_star);
  res.verdict = markov_verdict(res.s_star, options.threshold);
  return res;
}

namespace {

Mat haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat qm = qr.householderQ() * Mat::Identity(d, d);
  const Mat rm = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cplx diag = rm(j, j);
    if (std::abs(diag) > 0) qm.col(j) *= diag / std::abs(diag);
  }
  return qm;
}

struct SeesawState {
  std::vector<Mat> instrument;  // d^2 x d^2 Choi parts
  std::vector<Mat> channels;
  double s = 0.0;
};

// Fix channels, optimize the instrument (restricted to range(E1)) and s.
bool optimize_instrument(const ChoiOperator& e1, const ChoiOperator& e2, const Mat& iso, SeesawState& st,
                         const sdp::SolverOptions& so) {
  const int d = e1.dim_in(), dd = d * d, r = static_cast<int>(iso.cols());
  const int n = static_cast<int>(st.channels.size());
  sdp::SdpProblem prob;
  std::vector<Var> parts;
  for (int i = 0; i < n; ++i) parts.push_back(detail::add_plain_var(prob, "I" + std::to_string(i), r));
  const Var G = detail::add_plain_var(prob, "G", dd);
  const Var S = detail::add_plain_var(prob, "s", 1);
  prob.objective.push_back(sdp::re_term(S.block[0], 0, 0, 1.0));
  prob.maximize = true;
  std::vector<Tag> tags;
  const Mat e1_red = iso.adjoint() * e1.matrix() * iso;
  detail::add_hermitian_equation(
      prob, tags, 0, r,
      [&](int p, int q) {
        Expr e;
        for (const auto& v : parts) e.push_back({&v, p, q, 1.0});
        return e;
      },
      e1_red);
  // sum_i link(U I_i U^dagger, K_i) - s E2 - G = 0
  detail::add_hermitian_equation(
      prob, tags, 1, dd,
      [&](int p, int q) {
        const int a = p / d, c = p % d, a2 = q / d, c2 = q % d;
        Expr e;
        for (int i = 0; i < n; ++i) {
          const Mat& k = st.channels[static_cast<std::size_t>(i)];
          for (int u = 0; u < r; ++u)
            for (int v = 0; v < r; ++v) {
              cplx w = 0.0;
              for (int b = 0; b < d; ++b)
                for (int b2 = 0; b2 < d; ++b2)
                  w += iso(a * d + b, u) * std::conj(iso(a2 * d + b2, v)) * k(b * d + c, b2 * d + c2);
              if (std::abs(w) > 1e-15) e.push_back({&parts[static_cast<std::size_t>(i)], u, v, w});
            }
        }
        e.push_back({&S, 0, 0, -e2(p, q)});
        e.push_back({&G, p, q, -1.0});
        return e;
      },
      Mat::Zero(dd, dd));
  const sdp::SdpSolution sol = sdp::solve(prob, so);
  if (sol.status != sdp::SolveStatus::Optimal) return false;
  for (int i = 0; i < n; ++i) {
    const Mat red = parts[static_cast<std::size_t>(i)].assemble(sol.primal_blocks);
    st.instrument[static_cast<std::size_t>(i)] = hermitian_part(iso * red * iso.adjoint());
  }
  st.s = sol.objective_value;
  return true;
}

// Fix the instrument, optimize channels and s.
bool optimize_channels(const ChoiOperator& e2, SeesawState& st, const sdp::SolverOptions& so) {
  const int d = e2.dim_in(), dd = d * d;
  const int n = static_cast<int>(st.instrument.size());
  sdp::SdpProblem prob;
  std::vector<Var> ks;
  for (int i = 0; i < n; ++i) ks.push_back(detail::add_plain_var(prob, "K" + std::to_string(i), dd));
  const Var G = detail::add_plain_var(prob, "G", dd);
  const Var S = detail::add_plain_var(prob, "s", 1);
  prob.objective.push_back(sdp::re_term(S.block[0], 0, 0, 1.0));
  prob.maximize = true;
  std::vector<Tag> tags;
  detail::add_hermitian_equation(
      prob, tags, 0, dd,
      [&](int p, int q) {
        const int a = p / d, c = p % d, a2 = q / d, c2 = q % d;
        Expr e;
        for (int i = 0; i < n; ++i) {
          const Mat& inst = st.instrument[static_cast<std::size_t>(i)];
          for (int b = 0; b < d; ++b)
            for (int b2 = 0; b2 < d; ++b2) {
              const cplx w = inst(a * d + b, a2 * d + b2);
              if (std::abs(w) > 1e-15) e.push_back({&ks[static_cast<std::size_t>(i)], b * d + c, b2 * d + c2, w});
            }
        }
        e.push_back({&S, 0, 0, -e2(p, q)});
        e.push_back({&G, p, q, -1.0});
        return e;
      },
      Mat::Zero(dd, dd));
  for (int i = 0; i < n; ++i)
    detail::add_hermitian_equation(
        prob, tags, 1 + i, d,
        [&](int b, int b2) {
          Expr e;
          for (int c = 0; c < d; ++c) e.push_back({&ks[static_cast<std::size_t>(i)], b * d + c, b2 * d + c, 1.0});
          return e;
        },
        Mat::Identity(d, d));
  const sdp::SdpSolution sol = sdp::solve(prob, so);
  if (sol.status != sdp::SolveStatus::Optimal) return false;
  for (int i = 0; i < n; ++i)
    st.channels[static_cast<std::size_t>(i)] = hermitian_part(ks[static_cast<std::size_t>(i)].assemble(sol.primal_blocks));
  st.s = sol.objective_value;
  return true;
}

Mat psd_projection(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(m));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

struct Certified {
  double s = 0.0;
  ClassicalDecomposition decomposition;
  double error = 0.0;
};

Certified certify(const ChoiOperator& e1, const ChoiOperator& e2, const SeesawState& st) {
  const int d = e1.dim_in();
  Certified c;
  c.decomposition.instrument.parent = e1;
  double err = 0.0;
  Mat sum = Mat::Zero(d * d, d * d);
  for (std::size_t i = 0; i < st.instrument.size(); ++i) {
    const Mat part = psd_projection(st.instrument[i]);
    err = std::max(err, (part - st.instrument[i]).cwiseAbs().maxCoeff());
    sum += part;
    c.decomposition.instrument.parts.emplace_back(d, d, part);
    const Mat k = psd_projection(st.channels[i]);
    err = std::max(err, (k - st.channels[i]).cwiseAbs().maxCoeff());
    c.decomposition.transitions.emplace_back(d, d, k);
    err = std::max(err, is_cptp(c.decomposition.transitions.back(), 1.0).trace_deviation);
  }
  err = std::max(err, (sum - e1.matrix()).cwiseAbs().maxCoeff());
  c.error = err;
  c.s = certified_mixing(c.decomposition.recombine(), e2);
  return c;
}

}  // namespace

SeesawResult seesaw_lower_bound(const ChoiOperator& e1, const ChoiOperator& e2, const SeesawOptions& options) {
  const int d = check_pair(e1, e2);
  const int n = options.parts > 0 ? options.parts : (d == 2 ? 4 : d * d);
  const Mat iso = range_basis(e1.matrix());
  std::mt19937_64 rng(options.seed);
  SeesawResult best;
  best.s_lower = -1.0;
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    SeesawState st;
    st.instrument.assign(static_cast<std::size_t>(n), e1.matrix() / n);
    for (int i = 0; i < n; ++i) st.channels.push_back(unitary_channel(haar_unitary(d, rng)).matrix());
    double last = -1.0;
    bool stalled = false;
    Certified restart_best;
    restart_best.s = -1.0;
    for (int it = 0; it < options.iterations; ++it) {
      if (!optimize_instrument(e1, e2, iso, st, options.solver)) break;
      if (!optimize_channels(e2, st, options.solver)) break;
      const Certified c = certify(e1, e2, st);
      if (c.error <= 1e-8 && c.s > restart_best.s) restart_best = c;
      if (st.s - last < options.stall_tol) {
        stalled = true;
        break;
      }
      last = st.s;
      if (st.s >= 1.0 - 1e-9) break;
    }
    best.restarts_run = restart + 1;
    if (restart_best.s > best.s_lower) {
      best.s_lower = restart_best.s;
      best.certificate = restart_best.decomposition;
      best.recombination_error = restart_best.error;
      best.stalled = stalled;
    }
    if (best.s_lower >= 1.0 - 1e-9) break;
  }
  if (best.s_lower < 0.0) best.s_lower = 0.0;
  return best;
}

}  // namespace qmem
