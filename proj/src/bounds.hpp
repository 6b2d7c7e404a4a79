#pragma once

#include <cstddef>

#include "matrix.hpp"
#include "spectral.hpp"

namespace askl {

// Computable pieces of the excess-risk bound for a delivered model. The
// confidence term's hidden constant is fixed at 1; reports label it as
// indicative, not certified.
struct bound_report {
    double b_nuclear = 0.0;    // ||W||_* of the delivered model
    double rademacher = 0.0;   // empirical complexity estimate
    double excess_risk = 0.0;  // 4*sqrt(2)*L*rademacher + sqrt(log(1/delta)/n)
    double lipschitz = 0.0;
    double delta = 0.0;
    std::size_t n = 0;
    std::size_t outputs = 0;
};

// B = ||W||_* and the complexity estimate
// (B/n) * sqrt((K/D) * sum_i sum_j (cos((omega_j - omega'_j)^T x_i) + 1) / 2),
// which equals (B/n) * sqrt(K * sum_i <psi(x_i), psi(x_i)>). Fills b_nuclear,
// rademacher, n, outputs.
bound_report rademacher_estimate(const matrix& w, const frequency_pack& pack,
                                 const matrix& x, std::size_t outputs);

double excess_risk_value(double rademacher, double lipschitz, std::size_t n, double delta);

// rademacher_estimate plus the excess-risk value in one report.
bound_report make_bound_report(const matrix& w, const frequency_pack& pack,
                               const matrix& x, std::size_t outputs, double lipschitz,
                               double delta);

// Documented default Lipschitz constants: 2 for the multiclass hinge; for
// squared loss callers estimate from residuals (the CLI uses 2 * max |f - y|
// over the evaluation set).
inline constexpr double kHingeLipschitz = 2.0;

struct trained_model;
struct dataset;

// 2 * max_i ||f(x_i) - y_i||_2 over data: a residual-based estimate of the
// squared loss's Lipschitz constant on the region the model reaches.
double squared_loss_lipschitz(const trained_model& model, const dataset& data);

}  // namespace askl
