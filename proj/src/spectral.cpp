#include "spectral.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "rng.hpp"

namespace askl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_dim(std::span<const double> x, const frequency_pack& pack, const char* op) {
    if (x.size() != pack.d())
        throw argument_error(std::string(op) + ": input length " + std::to_string(x.size()) +
                             " does not match pack dimension " + std::to_string(pack.d()));
}

// z = M^T x for a d x D matrix M.
std::vector<double> project(const matrix& m, std::span<const double> x) {
    std::vector<double> z(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double xi = x[i];
        if (xi == 0.0) continue;
        const double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) z[j] += row[j] * xi;
    }
    return z;
}

}  // namespace

frequency_pack init_frequencies(std::size_t d, std::size_t D, double gamma,
                                std::uint64_t seed) {
    if (d < 1 || D < 1) throw argument_error("init_frequencies: d and D must be >= 1");
    if (!(gamma > 0.0)) throw argument_error("init_frequencies: gamma must be positive");

    rng gen(derive_seed(seed, 0x66726571));  // frequency stream
    frequency_pack pack;
    pack.omega = matrix(d, D);
    pack.omega_prime = matrix(d, D);
    pack.phase_b.resize(D);
    pack.phase_b_prime.resize(D);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < D; ++j) pack.omega(i, j) = gamma * gen.next_gaussian();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < D; ++j) pack.omega_prime(i, j) = gamma * gen.next_gaussian();
    for (std::size_t j = 0; j < D; ++j) pack.phase_b[j] = gen.next_uniform(kTwoPi);
    for (std::size_t j = 0; j < D; ++j) pack.phase_b_prime[j] = gen.next_uniform(kTwoPi);
    return pack;
}

frequency_pack tie_pack(frequency_pack pack) {
    pack.omega_prime = pack.omega;
    pack.phase_b_prime = pack.phase_b;
    return pack;
}

std::vector<double> feature_map(std::span<const double> x, const frequency_pack& pack,
                                map_mode mode) {
    check_dim(x, pack, "feature_map");
    std::size_t D = pack.feature_count();
    std::vector<double> z = project(pack.omega, x);

    if (mode == map_mode::stationary_cos) {
        double norm = std::sqrt(2.0 / static_cast<double>(D));
        std::vector<double> out(D);
        for (std::size_t j = 0; j < D; ++j) out[j] = norm * std::cos(z[j] + pack.phase_b[j]);
        return out;
    }

    std::vector<double> z2 = project(pack.omega_prime, x);
    if (mode == map_mode::non_stationary_cos) {
        double norm = 1.0 / std::sqrt(2.0 * static_cast<double>(D));
        std::vector<double> out(D);
        for (std::size_t j = 0; j < D; ++j)
            out[j] = norm * (std::cos(z[j] + pack.phase_b[j]) +
                             std::cos(z2[j] + pack.phase_b_prime[j]));
        return out;
    }

    // non_stationary_sin_cos: phase-free cosine block then sine block.
    double norm = 1.0 / std::sqrt(4.0 * static_cast<double>(D));
    std::vector<double> out(2 * D);
    for (std::size_t j = 0; j < D; ++j) {
        out[j] = norm * (std::cos(z[j]) + std::cos(z2[j]));
        out[D + j] = norm * (std::sin(z[j]) + std::sin(z2[j]));
    }
    return out;
}

double kernel_estimate(std::span<const double> x, std::span<const double> x2,
                       const frequency_pack& pack) {
    check_dim(x, pack, "kernel_estimate");
    check_dim(x2, pack, "kernel_estimate");
    std::size_t D = pack.feature_count();
    std::vector<double> zx = project(pack.omega, x);
    std::vector<double> zx_p = project(pack.omega_prime, x);
    std::vector<double> zy = project(pack.omega, x2);
    std::vector<double> zy_p = project(pack.omega_prime, x2);

    double sum = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
        sum += std::cos(zx[j] - zy_p[j]) + std::cos(zx_p[j] - zy[j]) +
               std::cos(zx[j] - zy[j]) + std::cos(zx_p[j] - zy_p[j]);
    }
    return sum / (4.0 * static_cast<double>(D));
}

matrix feature_matrix(const matrix& X, const frequency_pack& pack, map_mode mode) {
    if (X.cols() != pack.d())
        throw argument_error("feature_matrix: X has " + std::to_string(X.cols()) +
                             " columns, pack dimension is " + std::to_string(pack.d()));
    std::size_t n = X.rows();
    std::size_t dim = feature_dim(mode, pack.feature_count());
    matrix out(dim, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> phi =
            feature_map(std::span<const double>(X.row(i), X.cols()), pack, mode);
        for (std::size_t j = 0; j < dim; ++j) out(j, i) = phi[j];
    }
    return out;
}

}  // namespace askl
