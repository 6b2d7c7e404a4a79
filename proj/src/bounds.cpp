#include "bounds.hpp"

#include <cmath>
#include <numeric>
#include <span>

#include "errors.hpp"
#include "model.hpp"
#include "svd.hpp"

namespace askl {

bound_report rademacher_estimate(const matrix& w, const frequency_pack& pack,
                                 const matrix& x, std::size_t outputs) {
    if (x.rows() < 1) throw argument_error("rademacher_estimate: need at least one row");
    if (x.cols() != pack.d())
        throw argument_error("rademacher_estimate: X columns do not match pack dimension");
    if (w.rows() != pack.feature_count())
        throw argument_error("rademacher_estimate: W rows do not match feature count");
    if (outputs != w.cols())
        throw argument_error("rademacher_estimate: output count does not match W");

    svd_result svd = thin_svd(w);
    double b = std::accumulate(svd.singular_values.begin(), svd.singular_values.end(), 0.0);

    std::size_t n = x.rows();
    std::size_t d = pack.d();
    std::size_t D = pack.feature_count();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        for (std::size_t j = 0; j < D; ++j) {
            double z = 0.0;
            for (std::size_t a = 0; a < d; ++a)
                z += (pack.omega(a, j) - pack.omega_prime(a, j)) * xi[a];
            sum += 0.5 * (std::cos(z) + 1.0);
        }
    }

    bound_report report;
    report.b_nuclear = b;
    report.n = n;
    report.outputs = outputs;
    report.rademacher =
        (b / static_cast<double>(n)) *
        std::sqrt(static_cast<double>(outputs) / static_cast<double>(D) * sum);
    return report;
}

double excess_risk_value(double rademacher, double lipschitz, std::size_t n, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw argument_error("excess_risk_value: delta must lie in (0, 1)");
    if (!(lipschitz > 0.0))
        throw argument_error("excess_risk_value: Lipschitz constant must be positive");
    if (n < 1) throw argument_error("excess_risk_value: n must be >= 1");
    return 4.0 * std::sqrt(2.0) * lipschitz * rademacher +
           std::sqrt(std::log(1.0 / delta) / static_cast<double>(n));
}

bound_report make_bound_report(const matrix& w, const frequency_pack& pack,
                               const matrix& x, std::size_t outputs, double lipschitz,
                               double delta) {
    bound_report report = rademacher_estimate(w, pack, x, outputs);
    report.lipschitz = lipschitz;
    report.delta = delta;
    report.excess_risk = excess_risk_value(report.rademacher, lipschitz, report.n, delta);
    return report;
}

double squared_loss_lipschitz(const trained_model& model, const dataset& data) {
    if (data.size() == 0)
        throw argument_error("squared_loss_lipschitz: empty dataset");
    double worst = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<double> f =
            predict(model, std::span<const double>(data.x.row(i), data.dim()));
        const label& y = data.labels[i];
        if (!y.is_class() && y.target().size() != f.size())
            throw argument_error(
                "squared_loss_lipschitz: target length does not match model outputs");
        double ss = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            double target = y.is_class() ? (y.class_index() == k ? 1.0 : 0.0)
                                         : y.target()[k];
            double r = f[k] - target;
            ss += r * r;
        }
        worst = std::max(worst, std::sqrt(ss));
    }
    return 2.0 * worst;
}

}  // namespace askl
