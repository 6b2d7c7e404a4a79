#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matrix.hpp"

namespace askl {

// Frequency matrices and phases defining a spectral feature map. omega and
// omega_prime are d x D; phases have length D and lie in [0, 2*pi).
struct frequency_pack {
    matrix omega;
    matrix omega_prime;
    std::vector<double> phase_b;
    std::vector<double> phase_b_prime;

    std::size_t d() const { return omega.rows(); }
    std::size_t feature_count() const { return omega.cols(); }
};

enum class map_mode {
    stationary_cos,        // sqrt(2/D) cos(Omega^T x + b), length D
    non_stationary_cos,    // (1/sqrt(2D)) [cos(Omega^T x + b) + cos(Omega'^T x + b')], length D
    non_stationary_sin_cos // (1/sqrt(4D)) [cos + cos; sin + sin], phase-free, length 2D
};

// Feature vector length for a mode at feature count D.
inline std::size_t feature_dim(map_mode mode, std::size_t D) {
    return mode == map_mode::non_stationary_sin_cos ? 2 * D : D;
}

// Draws omega, omega_prime i.i.d. N(0, gamma^2) and phases uniform on
// [0, 2*pi), deterministically from the seed.
frequency_pack init_frequencies(std::size_t d, std::size_t D, double gamma,
                                std::uint64_t seed);

// Copies the primary frequencies and phases over the primed ones, producing
// the degenerate pack under which non-stationary maps reduce to stationary.
frequency_pack tie_pack(frequency_pack pack);

std::vector<double> feature_map(std::span<const double> x, const frequency_pack& pack,
                                map_mode mode);

// Monte Carlo kernel value; equals the inner product of the sin-cos maps
// of x and x2 exactly.
double kernel_estimate(std::span<const double> x, std::span<const double> x2,
                       const frequency_pack& pack);

// Stacks feature_map of every row of X (n x d) as columns: feature-dim x n.
matrix feature_matrix(const matrix& X, const frequency_pack& pack, map_mode mode);

}  // namespace askl
