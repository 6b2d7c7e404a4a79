#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "losses.hpp"
#include "matrix.hpp"
#include "spectral.hpp"

namespace askl {

// One mini-batch: inputs are rows, one label per row.
struct batch {
    matrix inputs;  // m x d
    std::vector<label> labels;

    std::size_t size() const { return inputs.rows(); }
};

// State for a bias-corrected Adam update of one parameter matrix.
struct adam_state {
    matrix first_moment;
    matrix second_moment;
    std::int64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static adam_state for_parameter(std::size_t rows, std::size_t cols) {
        adam_state s;
        s.first_moment = matrix(rows, cols);
        s.second_moment = matrix(rows, cols);
        return s;
    }
};

// Which frequency matrix a gradient is taken with respect to.
enum class freq_select { primary, prime };

// Mean over the batch of phi(x_i) * dloss/df(x_i)^T, with f = W^T phi(x).
// features holds phi(x_i) as column i.
matrix grad_w(const batch& b, const matrix& w, const matrix& features, loss_kind kind);

// Singular value soft-thresholding: U diag(max(sigma - tau, 0)) V^T.
// Minimizes (1/2)||W - Q||_F^2 + tau ||W||_*.
matrix svt_prox(const matrix& q, double tau);

// Gradient of mean loss plus lambda2 * (mean squared feature norm) with
// respect to the selected frequency matrix. mode must be a cosine map;
// stationary mode has a single frequency block, so only primary is valid
// there and the sine diagonal carries the stationary map's sqrt(2/D) scale.
matrix grad_omega(const batch& b, const matrix& w, const frequency_pack& pack,
                  double lambda2, freq_select which, loss_kind kind,
                  map_mode mode = map_mode::non_stationary_cos);

// param - eta * grad.
matrix sgd_step(const matrix& param, const matrix& grad, double eta);

// Standard bias-corrected Adam step; returns the updated parameter and state.
std::pair<matrix, adam_state> adam_step(const adam_state& state, const matrix& param,
                                        const matrix& grad, double eta);

}  // namespace askl
