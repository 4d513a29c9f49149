#include "qmem/channel.hpp"

#include <stdexcept>

namespace qmem {

ChoiOperator::ChoiOperator(int dim_in, int dim_out, const Mat& matrix) : dim_in_(dim_in), dim_out_(dim_out) {
  if (dim_in <= 0 || dim_out <= 0) throw std::invalid_argument("Choi dimensions must be positive");
  const int n = dim_in * dim_out;
  if (matrix.rows() != n || matrix.cols() != n)
    throw std::invalid_argument("Choi matrix size does not match dim_in * dim_out");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if (hermiticity_defect(matrix) > 1e-12 * scale) throw std::invalid_argument("Choi matrix is not Hermitian");
  matrix_ = hermitian_part(matrix);
}

ChoiOperator ChoiOperator::identity(int d) { return ChoiOperator(d, d, max_entangled(d)); }

void SubchannelDecomposition::validate(double tol) const {
  if (parts.empty()) throw std::invalid_argument("decomposition needs at least one part");
  Mat sum = Mat::Zero(parent.matrix().rows(), parent.matrix().cols());
  for (const auto& p : parts) {
    if (p.dim_in() != parent.dim_in() || p.dim_out() != parent.dim_out())
      throw std::invalid_argument("decomposition part dimension mismatch");
    if (min_eigenvalue(p.matrix()) < -tol) throw std::invalid_argument("decomposition part is not PSD");
    sum += p.matrix();
  }
  if ((sum - parent.matrix()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("decomposition parts do not sum to the parent");
}

ChoiOperator choi_from_action(const MapAction& action) {
  const int d = action.dim;
  if (d <= 0 || static_cast<int>(action.images.size()) != d * d)
    throw std::invalid_argument("map action needs d*d images");
  const Eigen::Index dout = action.images.front().rows();
  Mat m = Mat::Zero(d * dout, d * dout);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Mat& img = action.image(i, j);
      if (img.rows() != dout || img.cols() != dout) throw std::invalid_argument("image dimension mismatch");
      m.block(i * dout, j * dout, dout, dout) = img;
    }
  return ChoiOperator(d, static_cast<int>(dout), m);
}

MapAction action_from_choi(const ChoiOperator& choi) {
  const int d = choi.dim_in();
  const int dout = choi.dim_out();
  MapAction a;
  a.dim = d;
  a.images.reserve(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a.images.push_back(choi.matrix().block(i * dout, j * dout, dout, dout));
  return a;
}

Mat apply_channel(const ChoiOperator& choi, const Mat& state) {
  const int d = choi.dim_in();
  const int dout = choi.dim_out();
  if (state.rows() != d || state.cols() != d) throw std::invalid_argument("state dimension mismatch");
  Mat out = Mat::Zero(dout, dout);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (state(i, j) != cplx(0.0)) out += state(i, j) * choi.matrix().block(i * dout, j * dout, dout, dout);
  return out;
}

ChoiOperator link_product(const ChoiOperator& first, const ChoiOperator& second) {
  if (first.dim_out() != second.dim_in()) throw std::invalid_argument("link product dimension mismatch");
  const int da = first.dim_in();
  const int db = first.dim_out();
  const int dc = second.dim_out();
  Mat out = Mat::Zero(da * dc, da * dc);
  const Mat& f = first.matrix();
  const Mat& s = second.matrix();
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2)
      for (int b = 0; b < db; ++b)
        for (int b2 = 0; b2 < db; ++b2) {
          const cplx w = f(a * db + b, a2 * db + b2);
          if (w == cplx(0.0)) continue;
          out.block(a * dc, a2 * dc, dc, dc) += w * s.block(b * dc, b2 * dc, dc, dc);
        }
  return ChoiOperator(da, dc, out);
}

CptpReport is_cptp(const ChoiOperator& choi, double tol) {
  CptpReport r;
  r.min_eigenvalue = min_eigenvalue(choi.matrix());
  const Mat tb = partial_trace(choi.matrix(), {choi.dim_in(), choi.dim_out()}, 1);
  r.trace_deviation = (tb - Mat::Identity(choi.dim_in(), choi.dim_in())).cwiseAbs().maxCoeff();
  r.ok = r.min_eigenvalue >= -tol && r.trace_deviation <= tol;
  return r;
}

ChoiOperator unitary_channel(const Mat& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("unitary must be square");
  const int d = static_cast<int>(u.rows());
  if ((u.adjoint() * u - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("matrix is not unitary");
  Vec v = Vec::Zero(d * d);
  for (int i = 0; i < d; ++i) v.segment(i * d, d) = u.col(i);
  return ChoiOperator(d, d, v * v.adjoint());
}

}  // namespace qmem
