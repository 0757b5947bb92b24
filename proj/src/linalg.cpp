#include "poa/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>

namespace poa::linalg {

Vector min_norm_solve(const Matrix& A, const Vector& b, double rel_threshold) {
  if (A.cols() == 0) return Vector(0);
  if (A.rows() == 0) return Vector::Zero(A.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(rel_threshold);
  cod.compute(A);
  return cod.solve(b);
}

Matrix null_space(const Matrix& A, double rel_threshold) {
  const Eigen::Index n = A.cols();
  if (n == 0) return Matrix(0, 0);
  if (A.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cutoff = rel_threshold * std::max(1.0, sv.size() ? sv[0] : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Matrix select_columns(const Matrix& M, const std::vector<std::size_t>& cols) {
  Matrix out(M.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = M.col(static_cast<Eigen::Index>(cols[j]));
  return out;
}

}  // namespace poa::linalg
