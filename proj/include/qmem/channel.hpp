#pragma once

#include <string>
#include <vector>

#include "qmem/linalg.hpp"

namespace qmem {

// Choi operator E = sum_ij |i><j| (x) E[|i><j|], rows indexed by (input, output).
class ChoiOperator {
 public:
  ChoiOperator() = default;
  ChoiOperator(int dim_in, int dim_out, const Mat& matrix);

  static ChoiOperator identity(int d);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const Mat& matrix() const { return matrix_; }
  cplx operator()(int row, int col) const { return matrix_(row, col); }

 private:
  int dim_in_ = 0;
  int dim_out_ = 0;
  Mat matrix_;
};

// images[i * dim + j] is the image of |i><j|.
struct MapAction {
  int dim = 0;
  std::vector<Mat> images;

  const Mat& image(int i, int j) const { return images.at(static_cast<std::size_t>(i * dim + j)); }
};

struct CptpReport {
  bool ok = false;
  double min_eigenvalue = 0.0;
  double trace_deviation = 0.0;
};

// Completely positive parts summing to a parent channel.
struct SubchannelDecomposition {
  std::vector<ChoiOperator> parts;
  ChoiOperator parent;

  // Throws std::invalid_argument when a part is not PSD or the parts do not sum to the parent.
  void validate(double tol = 1e-9) const;
};

ChoiOperator choi_from_action(const MapAction& action);
MapAction action_from_choi(const ChoiOperator& choi);

// rho -> Tr_A[(rho^T (x) 1) E]; accepts any d x d operator.
Mat apply_channel(const ChoiOperator& choi, const Mat& state);

// Choi operator of second o first.
ChoiOperator link_product(const ChoiOperator& first, const ChoiOperator& second);

CptpReport is_cptp(const ChoiOperator& choi, double tol = 1e-9);

// Choi operator of rho -> U rho U^dagger.
ChoiOperator unitary_channel(const Mat& u);

}  // namespace qmem
