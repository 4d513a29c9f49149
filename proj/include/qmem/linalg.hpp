#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qmem {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

Mat kron(const Mat& a, const Mat& b);
Mat hermitian_part(const Mat& m);
double hermiticity_defect(const Mat& m);
double min_eigenvalue(const Mat& hermitian);

// Unnormalized projector onto sum_i |ii>, dimension d*d.
Mat max_entangled(int d);

// |i><j| on a d-dimensional space.
Mat unit_op(int d, int i, int j);

// Factors are indexed left to right; the leftmost factor is the most significant digit.
Mat partial_trace(const Mat& m, const std::vector<int>& dims, int traced);
Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& traced);
Mat partial_transpose(const Mat& m, const std::vector<int>& dims, const std::vector<int>& transposed);

// Orthonormal basis of the range of a Hermitian PSD matrix (columns), eigenvalues below
// rel_tol * max eigenvalue are treated as zero.
Mat range_basis(const Mat& hermitian, double rel_tol = 1e-10);

}  // namespace qmem
