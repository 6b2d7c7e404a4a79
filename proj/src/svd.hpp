#pragma once

#include <cstddef>
#include <vector>

#include "matrix.hpp"

namespace askl {

// Thin singular value decomposition M = U * diag(s) * V^T with
// r = min(rows, cols) columns in U and V and s sorted nonincreasing.
// Columns of U are completed to an orthonormal set even when some
// singular values are exactly zero.
struct svd_result {
    matrix u;                        // rows x r
    std::vector<double> singular_values;  // length r, nonincreasing, >= 0
    matrix v;                        // cols x r
};

// One-sided Jacobi. Throws numeric_error (carrying the relative residual)
// if the rotation sweeps do not converge within max_sweeps.
svd_result thin_svd_with_sweeps(const matrix& m, std::size_t max_sweeps);

inline svd_result thin_svd(const matrix& m) { return thin_svd_with_sweeps(m, 100); }

}  // namespace askl
