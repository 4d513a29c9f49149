#include "qmem/linalg.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qmem {

namespace {

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("subsystem dimensions must be positive");
    p *= d;
  }
  return p;
}

std::vector<int> digits(int idx, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    out[k] = idx % dims[k];
    idx /= dims[k];
  }
  return out;
}

int compose(const std::vector<int>& dig, const std::vector<int>& dims) {
  int idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + dig[k];
  return idx;
}

void check_factors(const Mat& m, const std::vector<int>& dims, const std::vector<int>& which) {
  const int n = product(dims);
  if (m.rows() != n || m.cols() != n)
    throw std::invalid_argument("matrix dimension does not match subsystem dimensions");
  for (int k : which)
    if (k < 0 || k >= static_cast<int>(dims.size()))
      throw std::invalid_argument("invalid subsystem index");
}

}  // namespace

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double hermiticity_defect(const Mat& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat max_entangled(int d) {
  Mat phi = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) phi(i * d + i, j * d + j) = 1.0;
  return phi;
}

Mat unit_op(int d, int i, int j) {
  Mat m = Mat::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

Mat partial_trace(const Mat& m, const std::vector<int>& dims, int traced) {
  return partial_trace(m, dims, std::vector<int>{traced});
}

Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& traced) {
  check_factors(m, dims, traced);
  std::vector<bool> is_traced(dims.size(), false);
  for (int k : traced) is_traced[k] = true;
  std::vector<int> kept_dims;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!is_traced[k]) kept_dims.push_back(dims[k]);
  const int nk = kept_dims.empty() ? 1 : product(kept_dims);
  Mat out = Mat::Zero(nk, nk);
  const int n = static_cast<int>(m.rows());
  for (int r = 0; r < n; ++r) {
    const auto dr = digits(r, dims);
    for (int c = 0; c < n; ++c) {
      const auto dc = digits(c, dims);
      bool diag = true;
      std::vector<int> kr, kc;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (is_traced[k]) {
          if (dr[k] != dc[k]) {
            diag = false;
            break;
          }
        } else {
          kr.push_back(dr[k]);
          kc.push_back(dc[k]);
        }
      }
      if (!diag) continue;
      const int ir = kept_dims.empty() ? 0 : compose(kr, kept_dims);
      const int ic = kept_dims.empty() ? 0 : compose(kc, kept_dims);
      out(ir, ic) += m(r, c);
    }
  }
  return out;
}

Mat partial_transpose(const Mat& m, const std::vector<int>& dims, const std::vector<int>& transposed) {
  check_factors(m, dims, transposed);
  const int n = static_cast<int>(m.rows());
  Mat out(n, n);
  for (int r = 0; r < n; ++r) {
    const auto dr = digits(r, dims);
    for (int c = 0; c < n; ++c) {
      auto nr = dr;
      auto nc = digits(c, dims);
      for (int k : transposed) std::swap(nr[k], nc[k]);
      out(compose(nr, dims), compose(nc, dims)) = m(r, c);
    }
  }
  return out;
}

Mat range_basis(const Mat& hermitian, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
  const auto& ev = es.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<int> keep;
  for (Eigen::Index k = ev.size() - 1; k >= 0; --k)
    if (ev(k) > rel_tol * top) keep.push_back(static_cast<int>(k));
  Mat out(hermitian.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  return out;
}

}  // namespace qmem
