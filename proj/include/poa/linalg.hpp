#pragma once

#include <vector>

#include "poa/model.hpp"

namespace poa::linalg {

// Minimal-norm least-squares solution of A z = b. Singular values below
// rel_threshold * max|pivot| are treated as zero.
Vector min_norm_solve(const Matrix& A, const Vector& b,
                      double rel_threshold = 1e-12);

// Orthonormal basis (columns) of the null space of A.
Matrix null_space(const Matrix& A, double rel_threshold = 1e-10);

// Columns of M selected by `cols`, in order.
Matrix select_columns(const Matrix& M, const std::vector<std::size_t>& cols);

}  // namespace poa::linalg
