#include "optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "svd.hpp"

namespace askl {
namespace {

void check_batch(const batch& b, const char* op) {
    if (b.size() < 1) throw argument_error(std::string(op) + ": empty batch");
    if (b.labels.size() != b.size())
        throw argument_error(std::string(op) + ": label count does not match batch size");
}

}  // namespace

matrix grad_w(const batch& b, const matrix& w, const matrix& features, loss_kind kind) {
    check_batch(b, "grad_w");
    std::size_t m = b.size();
    std::size_t dim = w.rows();
    std::size_t k = w.cols();
    if (features.rows() != dim || features.cols() != m)
        throw argument_error("grad_w: features must be feature-dim x batch-size");

    matrix grad(dim, k);
    std::vector<double> f(k);
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(f.begin(), f.end(), 0.0);
        for (std::size_t j = 0; j < dim; ++j) {
            double phi = features(j, i);
            if (phi == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) f[c] += w(j, c) * phi;
        }
        std::vector<double> g = loss_gradient(kind, f, b.labels[i]);
        for (std::size_t j = 0; j < dim; ++j) {
            double phi = features(j, i);
            if (phi == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) grad(j, c) += phi * g[c];
        }
    }
    return scale(grad, 1.0 / static_cast<double>(m));
}

matrix svt_prox(const matrix& q, double tau) {
    if (!(tau >= 0.0)) throw argument_error("svt_prox: tau must be nonnegative");
    if (!all_finite(q)) throw argument_error("svt_prox: matrix has non-finite entries");
    if (tau == 0.0) return q;

    svd_result svd = thin_svd(q);
    std::size_t r = svd.singular_values.size();
    matrix shrunk_u(q.rows(), r);
    for (std::size_t j = 0; j < r; ++j) {
        double s = std::max(svd.singular_values[j] - tau, 0.0);
        for (std::size_t i = 0; i < q.rows(); ++i) shrunk_u(i, j) = svd.u(i, j) * s;
    }
    return multiply_a_bt(shrunk_u, svd.v);
}

matrix grad_omega(const batch& b, const matrix& w, const frequency_pack& pack,
                  double lambda2, freq_select which, loss_kind kind, map_mode mode) {
    check_batch(b, "grad_omega");
    if (mode == map_mode::non_stationary_sin_cos)
        throw argument_error("grad_omega: the sin-cos map is not trained");
    if (mode == map_mode::stationary_cos && which == freq_select::prime)
        throw argument_error("grad_omega: stationary mode has no prime frequency block");

    std::size_t m = b.size();
    std::size_t d = pack.d();
    std::size_t D = pack.feature_count();
    if (b.inputs.cols() != d)
        throw argument_error("grad_omega: batch inputs do not match pack dimension");
    if (w.rows() != D) throw argument_error("grad_omega: W rows must equal feature count");

    const matrix& freq = which == freq_select::primary ? pack.omega : pack.omega_prime;
    const std::vector<double>& phase =
        which == freq_select::primary ? pack.phase_b : pack.phase_b_prime;
    double sine_scale = mode == map_mode::stationary_cos
                            ? -std::sqrt(2.0 / static_cast<double>(D))
                            : -1.0 / std::sqrt(2.0 * static_cast<double>(D));

    matrix grad(d, D);
    std::vector<double> f(w.cols());
    for (std::size_t i = 0; i < m; ++i) {
        std::span<const double> x(b.inputs.row(i), d);
        std::vector<double> phi = feature_map(x, pack, mode);

        std::fill(f.begin(), f.end(), 0.0);
        for (std::size_t j = 0; j < D; ++j)
            for (std::size_t c = 0; c < w.cols(); ++c) f[c] += w(j, c) * phi[j];
        std::vector<double> g = loss_gradient(kind, f, b.labels[i]);

        // s_j = d(phi_j)/d(z_j) evaluated at z = freq^T x + phase.
        std::vector<double> s(D);
        for (std::size_t j = 0; j < D; ++j) {
            double z = phase[j];
            for (std::size_t a = 0; a < d; ++a) z += freq(a, j) * x[a];
            s[j] = sine_scale * std::sin(z);
        }

        // coef_j = s_j * ((W g)_j + 2 lambda2 phi_j); grad += x coef^T.
        std::vector<double> coef(D);
        for (std::size_t j = 0; j < D; ++j) {
            double wg = 0.0;
            for (std::size_t c = 0; c < w.cols(); ++c) wg += w(j, c) * g[c];
            coef[j] = s[j] * (wg + 2.0 * lambda2 * phi[j]);
        }
        for (std::size_t a = 0; a < d; ++a) {
            double xa = x[a];
            if (xa == 0.0) continue;
            double* row = grad.row(a);
            for (std::size_t j = 0; j < D; ++j) row[j] += xa * coef[j];
        }
    }
    return scale(grad, 1.0 / static_cast<double>(m));
}

matrix sgd_step(const matrix& param, const matrix& grad, double eta) {
    check_same_shape(param, grad, "sgd_step");
    if (!(eta > 0.0)) throw argument_error("sgd_step: eta must be positive");
    return subtract(param, scale(grad, eta));
}

std::pair<matrix, adam_state> adam_step(const adam_state& state, const matrix& param,
                                        const matrix& grad, double eta) {
    check_same_shape(param, grad, "adam_step");
    check_same_shape(state.first_moment, param, "adam_step");
    check_same_shape(state.second_moment, param, "adam_step");
    if (!(eta > 0.0)) throw argument_error("adam_step: eta must be positive");

    adam_state next = state;
    next.step_count = state.step_count + 1;
    double t = static_cast<double>(next.step_count);
    double corr1 = 1.0 - std::pow(state.beta1, t);
    double corr2 = 1.0 - std::pow(state.beta2, t);

    matrix out = param;
    for (std::size_t i = 0; i < param.rows(); ++i) {
        for (std::size_t j = 0; j < param.cols(); ++j) {
            double g = grad(i, j);
            double m = state.beta1 * state.first_moment(i, j) + (1.0 - state.beta1) * g;
            double v = state.beta2 * state.second_moment(i, j) + (1.0 - state.beta2) * g * g;
            next.first_moment(i, j) = m;
            next.second_moment(i, j) = v;
            double m_hat = m / corr1;
            double v_hat = v / corr2;
            out(i, j) = param(i, j) - eta * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
    return {std::move(out), std::move(next)};
}

}  // namespace askl
