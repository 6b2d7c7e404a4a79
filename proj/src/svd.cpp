#include "svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace askl {
namespace {

constexpr double kPairTolerance = 1e-12;

double column_dot(const matrix& a, std::size_t p, std::size_t q) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, p) * a(i, q);
    return s;
}

// Largest |a_p . a_q| / (|a_p| |a_q|) over column pairs; 0 for an
// already-orthogonal (or <2 column) matrix.
double max_relative_offdiag(const matrix& a) {
    double worst = 0.0;
    for (std::size_t p = 0; p + 1 < a.cols(); ++p) {
        double app = column_dot(a, p, p);
        if (app == 0.0) continue;
        for (std::size_t q = p + 1; q < a.cols(); ++q) {
            double aqq = column_dot(a, q, q);
            if (aqq == 0.0) continue;
            double apq = column_dot(a, p, q);
            worst = std::max(worst, std::fabs(apq) / std::sqrt(app * aqq));
        }
    }
    return worst;
}

void rotate_columns(matrix& a, std::size_t p, std::size_t q, double c, double s) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double ap = a(i, p);
        double aq = a(i, q);
        a(i, p) = c * ap - s * aq;
        a(i, q) = s * ap + c * aq;
    }
}

// Orthogonalizes columns of a (rows >= cols) in place, accumulating the
// right rotations into v. Throws when the sweeps run out.
void jacobi_orthogonalize(matrix& a, matrix& v, std::size_t max_sweeps) {
    std::size_t n = a.cols();
    for (std::size_t sweep = 0;; ++sweep) {
        double residual = max_relative_offdiag(a);
        if (residual <= kPairTolerance) return;
        if (sweep >= max_sweeps)
            throw numeric_error(
                "thin_svd: Jacobi sweeps did not converge after " +
                    std::to_string(max_sweeps) +
                    " sweeps (relative off-diagonal residual " +
                    std::to_string(residual) + ")",
                residual);
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = column_dot(a, p, p);
                double aqq = column_dot(a, q, q);
                if (app == 0.0 || aqq == 0.0) continue;
                double apq = column_dot(a, p, q);
                if (std::fabs(apq) <= kPairTolerance * std::sqrt(app * aqq)) continue;
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                rotate_columns(a, p, q, c, s);
                rotate_columns(v, p, q, c, s);
            }
        }
    }
}

// Fills any columns of u whose singular value is zero with unit vectors
// orthonormal to all other columns, drawn from the standard basis.
void complete_orthonormal(matrix& u, const std::vector<double>& sigma) {
    std::size_t m = u.rows();
    std::size_t r = u.cols();
    std::size_t next_basis = 0;
    for (std::size_t j = 0; j < r; ++j) {
        if (sigma[j] != 0.0) continue;
        for (; next_basis < m; ++next_basis) {
            std::vector<double> cand(m, 0.0);
            cand[next_basis] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t k = 0; k < r; ++k) {
                    if (k == j) continue;
                    if (sigma[k] == 0.0 && k > j) continue;  // not filled yet
                    double dot = 0.0;
                    for (std::size_t i = 0; i < m; ++i) dot += cand[i] * u(i, k);
                    for (std::size_t i = 0; i < m; ++i) cand[i] -= dot * u(i, k);
                }
            }
            double norm = 0.0;
            for (double x : cand) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (std::size_t i = 0; i < m; ++i) u(i, j) = cand[i] / norm;
                ++next_basis;
                break;
            }
        }
    }
}

svd_result decompose_tall(const matrix& input, std::size_t max_sweeps) {
    matrix a = input;  // rows >= cols
    std::size_t n = a.cols();
    matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    jacobi_orthogonalize(a, v, max_sweeps);

    std::vector<double> sigma(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(column_dot(a, j, j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    svd_result out;
    out.u = matrix(a.rows(), n);
    out.v = matrix(n, n);
    out.singular_values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t src = order[j];
        out.singular_values[j] = sigma[src];
        if (sigma[src] > 0.0)
            for (std::size_t i = 0; i < a.rows(); ++i) out.u(i, j) = a(i, src) / sigma[src];
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
    }
    complete_orthonormal(out.u, out.singular_values);
    return out;
}

}  // namespace

svd_result thin_svd_with_sweeps(const matrix& m, std::size_t max_sweeps) {
    if (m.rows() == 0 || m.cols() == 0)
        throw argument_error("thin_svd: matrix must be non-empty");
    if (!all_finite(m)) throw argument_error("thin_svd: matrix has non-finite entries");

    if (m.rows() >= m.cols()) return decompose_tall(m, max_sweeps);

    // Wide input: decompose the transpose and swap the factors.
    svd_result t = decompose_tall(transpose(m), max_sweeps);
    svd_result out;
    out.u = std::move(t.v);
    out.v = std::move(t.u);
    out.singular_values = std::move(t.singular_values);
    return out;
}

}  // namespace askl
