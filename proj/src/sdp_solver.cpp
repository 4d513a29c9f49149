#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmem/sdp.hpp"

namespace qmem::sdp {

Coef re_term(int block, int row, int col, cplx coef) {
  if (row == col) return {block, row, col, cplx(coef.real(), 0.0)};
  return {block, row, col, 0.5 * std::conj(coef)};
}

int SdpProblem::add_block(std::string name, int dim) {
  if (dim <= 0) throw std::invalid_argument("block dimension must be positive");
  blocks.push_back({std::move(name), dim});
  return static_cast<int>(blocks.size()) - 1;
}

int SdpProblem::total_dimension() const {
  int n = 0;
  for (const auto& b : blocks) n += b.dim;
  return n;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::MaxIter:
      return "MaxIter";
    case SolveStatus::NumericalTrouble:
      return "NumericalTrouble";
  }
  return "unknown";
}

double evaluate(const std::vector<Coef>& terms, const std::vector<Mat>& blocks) {
  double v = 0.0;
  for (const auto& t : terms) {
    const Mat& x = blocks.at(static_cast<std::size_t>(t.block));
    if (t.row == t.col)
      v += t.value.real() * x(t.row, t.row).real();
    else
      v += 2.0 * std::real(t.value * x(t.col, t.row));
  }
  return v;
}

namespace {

// Fully expanded Hermitian entry: A(a, b) = v.
struct Full {
  int a;
  int b;
  cplx v;
};

struct BlockUse {
  int constraint;
  std::vector<Full> entries;
  bool dense = false;
};

using Blocks = std::vector<Mat>;

class Solver {
 public:
  Solver(const SdpProblem& p, const SolverOptions& o) : prob_(p), opt_(o) {
    nb_ = static_cast<int>(p.blocks.size());
    m_ = static_cast<int>(p.equalities.size());
    if (nb_ == 0) throw std::invalid_argument("problem has no blocks");
    dims_.resize(static_cast<std::size_t>(nb_));
    for (int k = 0; k < nb_; ++k) dims_[k] = p.blocks[k].dim;
    uses_.resize(static_cast<std::size_t>(nb_));
    b_ = Eigen::VectorXd(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& con = p.equalities[static_cast<std::size_t>(i)];
      b_(i) = con.rhs;
      std::vector<std::vector<Full>> per(static_cast<std::size_t>(nb_));
      for (const auto& t : con.terms) expand(t, per);
      for (int k = 0; k < nb_; ++k) {
        auto& lst = per[static_cast<std::size_t>(k)];
        if (lst.empty()) continue;
        BlockUse u;
        u.constraint = i;
        u.entries = std::move(lst);
        u.dense = static_cast<int>(u.entries.size()) > 2 * dims_[k];
        uses_[static_cast<std::size_t>(k)].push_back(std::move(u));
      }
    }
    c_.resize(static_cast<std::size_t>(nb_));
    for (int k = 0; k < nb_; ++k) c_[k] = Mat::Zero(dims_[k], dims_[k]);
    const double sign = p.maximize ? -1.0 : 1.0;
    {
      std::vector<std::vector<Full>> per(static_cast<std::size_t>(nb_));
      for (const auto& t : p.objective) expand(t, per);
      for (int k = 0; k < nb_; ++k)
        for (const auto& e : per[static_cast<std::size_t>(k)]) c_[k](e.a, e.b) += sign * e.v;
    }
  }

  SdpSolution run() {
    SdpSolution sol;
    n_total_ = 0;
    for (int d : dims_) n_total_ += d;

    if (m_ > 0 && !constraints_independent()) {
      sol.status = SolveStatus::NumericalTrouble;
      sol.message = "equality constraints are linearly dependent";
      return sol;
    }

    const double norm_b = b_.size() ? b_.norm() : 0.0;
    double norm_c = 0.0;
    for (const auto& c : c_) norm_c += c.squaredNorm();
    norm_c = std::sqrt(norm_c);

    Blocks x(static_cast<std::size_t>(nb_)), s(static_cast<std::size_t>(nb_));
    initial_point(x, s);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);

    SdpSolution best;
    double best_score = std::numeric_limits<double>::infinity();
    // Early termination falls back to the best iterate when it is within 10x of the tolerances.
    auto finish = [&](SolveStatus status, const char* message) {
      if (best_score <= 10.0) {
        best.status = SolveStatus::Optimal;
        best.message = "converged to reduced accuracy";
        return best;
      }
      sol.status = status;
      sol.message = message;
      return sol;
    };

    int iter = 0;
    for (; iter <= opt_.max_iterations; ++iter) {
      const Eigen::VectorXd ax = apply_a(x);
      const Eigen::VectorXd rp = b_ - ax;
      Blocks rd = adjoint_a(y);
      double rd_norm = 0.0;
      for (int k = 0; k < nb_; ++k) {
        rd[k] = c_[k] - rd[k] - s[k];
        rd_norm += rd[k].squaredNorm();
      }
      rd_norm = std::sqrt(rd_norm);
      const double pobj = inner(c_, x);
      const double dobj = b_.dot(y);
      const double mu = inner(x, s) / n_total_;
      const double pinf = rp.size() ? rp.norm() / (1.0 + norm_b) : 0.0;
      const double dinf = rd_norm / (1.0 + norm_c);
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      fill(sol, x, s, y, pobj, dobj, gap, pinf, dinf, iter);
      const double score =
          std::max({pinf / opt_.feasibility_tol, dinf / opt_.feasibility_tol, gap / opt_.gap_tol});
      if (score < best_score) {
        best_score = score;
        best = sol;
      }
      if (opt_.verbose)
        std::fprintf(stderr, "%3d pobj % .10e dobj % .10e pinf %.2e dinf %.2e gap %.2e mu %.2e |x| %.2e |s| %.2e\n", iter, pobj,
                     dobj, pinf, dinf, gap, mu, max_norm(x), max_norm(s));

      if (pinf <= opt_.feasibility_tol && dinf <= opt_.feasibility_tol && gap <= opt_.gap_tol) {
        sol.status = SolveStatus::Optimal;
        return sol;
      }
      if (dobj > 1e9 * (1.0 + std::abs(pobj)) && dinf < 1e-6) {
        sol.status = SolveStatus::Infeasible;
        sol.message = "primal infeasible (dual objective unbounded)";
        return sol;
      }
      if (-pobj > 1e9 && pinf < 1e-6) {
        sol.status = SolveStatus::Infeasible;
        sol.message = "dual infeasible (primal objective unbounded)";
        return sol;
      }
      if (max_norm(x) > 1e12 || y.lpNorm<Eigen::Infinity>() > 1e14) {
        sol.status = SolveStatus::Infeasible;
        sol.message = "iterates diverged";
        return sol;
      }
      if (iter == opt_.max_iterations) break;

      Blocks sinv(static_cast<std::size_t>(nb_));
      bool ok = true;
      for (int k = 0; k < nb_; ++k) {
        Eigen::LLT<Mat> llt(s[k]);
        if (llt.info() != Eigen::Success) {
          ok = false;
          break;
        }
        sinv[k] = llt.solve(Mat::Identity(dims_[k], dims_[k]));
        sinv[k] = hermitian_part(sinv[k]);
      }
      if (!ok) return finish(SolveStatus::NumericalTrouble, "dual slack lost definiteness");

      Eigen::MatrixXd mm = schur(x, sinv);
      SchurFactor mchol;
      if (!factor(mm, mchol)) return finish(SolveStatus::NumericalTrouble, "Schur complement factorization failed");

      // Predictor
      Blocks zero_corr;
      Blocks dx, ds;
      Eigen::VectorXd dy;
      direction(x, sinv, rp, rd, 0.0, zero_corr, mchol, dx, dy, ds);
      const double ap_aff = std::min(1.0, max_step(x, dx));
      const double ad_aff = std::min(1.0, max_step(s, ds));
      double mu_aff = 0.0;
      for (int k = 0; k < nb_; ++k)
        mu_aff += std::real(((x[k] + ap_aff * dx[k]) * (s[k] + ad_aff * ds[k])).trace());
      mu_aff /= n_total_;
      double sigma = std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3);
      sigma = std::clamp(sigma, 0.0, 1.0);

      // Corrector
      Blocks corr(static_cast<std::size_t>(nb_));
      for (int k = 0; k < nb_; ++k) corr[k] = dx[k] * ds[k] * sinv[k];
      direction(x, sinv, rp, rd, sigma * mu, corr, mchol, dx, dy, ds);
      const double ap = std::min(1.0, 0.98 * max_step(x, dx));
      const double ad = std::min(1.0, 0.98 * max_step(s, ds));
      if (ap < 1e-10 && ad < 1e-10) return finish(SolveStatus::NumericalTrouble, "step length collapsed");
      for (int k = 0; k < nb_; ++k) {
        x[k] = hermitian_part(x[k] + ap * dx[k]);
        s[k] = hermitian_part(s[k] + ad * ds[k]);
      }
      y += ad * dy;
    }
    return finish(SolveStatus::MaxIter, "iteration limit reached");
  }

 private:
  void expand(const Coef& t, std::vector<std::vector<Full>>& per) const {
    if (t.block < 0 || t.block >= nb_) throw std::invalid_argument("coefficient refers to unknown block");
    const int n = dims_[t.block];
    if (t.row < 0 || t.col < 0 || t.row >= n || t.col >= n)
      throw std::invalid_argument("coefficient index outside block");
    auto& lst = per[static_cast<std::size_t>(t.block)];
    if (t.row == t.col) {
      if (t.value.real() != 0.0) lst.push_back({t.row, t.row, cplx(t.value.real(), 0.0)});
    } else if (t.value != cplx(0.0)) {
      lst.push_back({t.row, t.col, t.value});
      lst.push_back({t.col, t.row, std::conj(t.value)});
    }
  }

  static double inner(const Blocks& a, const Blocks& b) {
    double v = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) v += std::real((a[k].conjugate().cwiseProduct(b[k])).sum());
    return v;
  }

  static double max_norm(const Blocks& a) {
    double v = 0.0;
    for (const auto& m : a) v = std::max(v, m.cwiseAbs().maxCoeff());
    return v;
  }

  void initial_point(Blocks& x, Blocks& s) const {
    std::vector<double> anorm(static_cast<std::size_t>(m_), 0.0);
    double amax = 0.0;
    for (int k = 0; k < nb_; ++k)
      for (const auto& u : uses_[static_cast<std::size_t>(k)])
        for (const auto& e : u.entries) anorm[static_cast<std::size_t>(u.constraint)] += std::norm(e.v);
    for (auto& a : anorm) {
      a = std::sqrt(a);
      amax = std::max(amax, a);
    }
    double cmax = 0.0;
    for (const auto& c : c_) cmax = std::max(cmax, c.norm());
    for (int k = 0; k < nb_; ++k) {
      const double n = dims_[k];
      double xi = std::max(10.0, std::sqrt(n));
      for (int i = 0; i < m_; ++i) xi = std::max(xi, n * (1.0 + std::abs(b_(i))) / (1.0 + anorm[static_cast<std::size_t>(i)]));
      const double eta = std::max({10.0, std::sqrt(n), amax, cmax});
      x[k] = xi * Mat::Identity(dims_[k], dims_[k]);
      s[k] = eta * Mat::Identity(dims_[k], dims_[k]);
    }
  }

  // Re tr(A_i Z) for every constraint; Z need not be Hermitian.
  Eigen::VectorXd apply_a(const Blocks& z) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    for (int k = 0; k < nb_; ++k)
      for (const auto& u : uses_[static_cast<std::size_t>(k)]) {
        cplx acc = 0.0;
        for (const auto& e : u.entries) acc += e.v * z[k](e.b, e.a);
        out(u.constraint) += acc.real();
      }
    return out;
  }

  Blocks adjoint_a(const Eigen::VectorXd& y) const {
    Blocks out(static_cast<std::size_t>(nb_));
    for (int k = 0; k < nb_; ++k) {
      out[k] = Mat::Zero(dims_[k], dims_[k]);
      for (const auto& u : uses_[static_cast<std::size_t>(k)]) {
        const double w = y(u.constraint);
        if (w == 0.0) continue;
        for (const auto& e : u.entries) out[k](e.a, e.b) += w * e.v;
      }
    }
    return out;
  }

  // M_ij = Re tr(A_i X A_j S^-1)
  Eigen::MatrixXd schur(const Blocks& x, const Blocks& sinv) const {
    Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(m_, m_);
    for (int k = 0; k < nb_; ++k) {
      const auto& uses = uses_[static_cast<std::size_t>(k)];
      const Mat& xk = x[k];
      const Mat& sk = sinv[k];
      const int n = dims_[k];
      for (std::size_t jj = 0; jj < uses.size(); ++jj) {
        const auto& uj = uses[jj];
        if (!uj.dense) continue;
        Mat aj = Mat::Zero(n, n);
        for (const auto& e : uj.entries) aj(e.a, e.b) += e.v;
        const Mat g = xk * aj * sk;
        for (std::size_t ii = 0; ii < uses.size(); ++ii) {
          const auto& ui = uses[ii];
          if (ui.dense && ii > jj) continue;
          cplx acc = 0.0;
          for (const auto& e : ui.entries) acc += e.v * g(e.b, e.a);
          add_sym(mm, ui.constraint, uj.constraint, acc.real());
        }
      }
      for (std::size_t ii = 0; ii < uses.size(); ++ii) {
        const auto& ui = uses[ii];
        if (ui.dense) continue;
        for (std::size_t jj = ii; jj < uses.size(); ++jj) {
          const auto& uj = uses[jj];
          if (uj.dense) continue;
          cplx acc = 0.0;
          for (const auto& ei : ui.entries)
            for (const auto& ej : uj.entries) acc += ei.v * ej.v * xk(ei.b, ej.a) * sk(ej.b, ei.a);
          add_sym(mm, ui.constraint, uj.constraint, acc.real());
        }
      }
    }
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < i; ++j) mm(i, j) = mm(j, i);
    return mm;
  }

  static void add_sym(Eigen::MatrixXd& mm, int i, int j, double v) {
    if (i <= j)
      mm(i, j) += v;
    else
      mm(j, i) += v;
  }

  // Cholesky of the Schur complement, with pivoted LDLT when it is numerically semidefinite.
  struct SchurFactor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    bool pivoted = false;
    Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
      if (pivoted) return ldlt.solve(r);
      return llt.solve(r);
    }
  };

  bool factor(const Eigen::MatrixXd& mm, SchurFactor& f) const {
    f.llt.compute(mm);
    f.pivoted = f.llt.info() != Eigen::Success;
    if (!f.pivoted) return true;
    f.ldlt.compute(mm);
    return f.ldlt.info() == Eigen::Success;
  }

  bool constraints_independent() const {
    Blocks id(static_cast<std::size_t>(nb_));
    for (int k = 0; k < nb_; ++k) id[k] = Mat::Identity(dims_[k], dims_[k]);
    Eigen::MatrixXd gram = schur(id, id);
    const Eigen::VectorXd scale = gram.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    gram = scale.asDiagonal() * gram * scale.asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> chol(gram);
    if (chol.info() != Eigen::Success) return false;
    const Eigen::MatrixXd& l = chol.matrixLLT();
    return l.diagonal().minCoeff() > 1e-7;
  }

  // HKM direction with target sigma_mu and second-order correction corr (may be empty).
  void direction(const Blocks& x, const Blocks& sinv, const Eigen::VectorXd& rp, const Blocks& rd, double sigma_mu,
                 const Blocks& corr, const SchurFactor& mchol, Blocks& dx, Eigen::VectorXd& dy,
                 Blocks& ds) const {
    Blocks z0(static_cast<std::size_t>(nb_));
    for (int k = 0; k < nb_; ++k) {
      z0[k] = sigma_mu * sinv[k] - x[k] - x[k] * rd[k] * sinv[k];
      if (!corr.empty()) z0[k] -= corr[k];
    }
    const Eigen::VectorXd rhs = rp - apply_a(z0);
    dy = m_ > 0 ? Eigen::VectorXd(mchol.solve(rhs)) : Eigen::VectorXd();
    Blocks aty = adjoint_a(dy);
    dx.resize(static_cast<std::size_t>(nb_));
    ds.resize(static_cast<std::size_t>(nb_));
    for (int k = 0; k < nb_; ++k) {
      ds[k] = hermitian_part(rd[k] - aty[k]);
      Mat d = sigma_mu * sinv[k] - x[k] - x[k] * ds[k] * sinv[k];
      if (!corr.empty()) d -= corr[k];
      dx[k] = hermitian_part(d);
    }
    // Iterative refinement of A(dx) = rp against an ill-conditioned Schur factor.
    for (int pass = 0; pass < 3 && m_ > 0; ++pass) {
      const Eigen::VectorXd err = rp - apply_a(dx);
      if (err.norm() <= 1e-14 * (1.0 + rp.norm())) break;
      const Eigen::VectorXd fix = mchol.solve(err);
      dy += fix;
      const Blocks atf = adjoint_a(fix);
      for (int k = 0; k < nb_; ++k) {
        ds[k] -= hermitian_part(atf[k]);
        dx[k] += hermitian_part(x[k] * atf[k] * sinv[k]);
      }
    }
  }

  // Largest alpha with v + alpha dv PSD (infinity when unbounded).
  double max_step(const Blocks& v, const Blocks& dv) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb_; ++k) {
      Eigen::LLT<Mat> llt(v[k]);
      if (llt.info() != Eigen::Success) return 0.0;
      const Mat linv = llt.matrixL().solve(Mat::Identity(dims_[k], dims_[k]));
      const Mat g = hermitian_part(linv * dv[k] * linv.adjoint());
      double lmin;
      if (dims_[k] == 1) {
        lmin = g(0, 0).real();
      } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
        lmin = es.eigenvalues().minCoeff();
      }
      if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
  }

  void fill(SdpSolution& sol, const Blocks& x, const Blocks& s, const Eigen::VectorXd& y, double pobj, double dobj,
            double gap, double pinf, double dinf, int iter) const {
    const double sign = prob_.maximize ? -1.0 : 1.0;
    sol.primal_blocks = x;
    sol.dual_slacks = s;
    sol.dual_multipliers = y;
    sol.objective_value = sign * pobj;
    sol.dual_objective = sign * dobj;
    sol.duality_gap = gap;
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    sol.iterations = iter;
  }

  const SdpProblem& prob_;
  SolverOptions opt_;
  int nb_ = 0;
  int m_ = 0;
  int n_total_ = 0;
  std::vector<int> dims_;
  std::vector<std::vector<BlockUse>> uses_;
  Eigen::VectorXd b_;
  Blocks c_;
};

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  Solver solver(problem, options);
  return solver.run();
}

}  // namespace qmem::sdp
