#include "losses.hpp"

#include <algorithm>
#include <string>

namespace askl {
namespace {

// Index of the largest competitor f[j], j != c; lowest index wins ties.
std::size_t best_competitor(std::span<const double> f, std::size_t c) {
    std::size_t best = c == 0 ? 1 : 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (j == c) continue;
        if (f[j] > f[best]) best = j;
    }
    return best;
}

void check_hinge(std::span<const double> f, const label& y) {
    if (f.size() < 2) throw argument_error("hinge loss requires K >= 2 outputs");
    if (!y.is_class()) throw argument_error("hinge loss requires a class label");
    if (y.class_index() >= f.size())
        throw argument_error("hinge loss: class index " + std::to_string(y.class_index()) +
                             " out of range for K=" + std::to_string(f.size()));
}

void check_squared(std::span<const double> f, const label& y) {
    if (y.is_class()) {
        if (y.class_index() >= f.size())
            throw argument_error("squared loss: class index out of range");
    } else if (y.target().size() != f.size()) {
        throw argument_error("squared loss: target length " +
                             std::to_string(y.target().size()) + " does not match K=" +
                             std::to_string(f.size()));
    }
}

// Squared loss accepts class labels by treating them as one-hot targets.
double target_at(const label& y, std::size_t k) {
    if (y.is_class()) return y.class_index() == k ? 1.0 : 0.0;
    return y.target()[k];
}

}  // namespace

double loss_value(loss_kind kind, std::span<const double> f, const label& y) {
    if (kind == loss_kind::multiclass_hinge) {
        check_hinge(f, y);
        std::size_t c = y.class_index();
        double margin = f[c] - f[best_competitor(f, c)];
        return std::max(0.0, 1.0 - margin);
    }
    check_squared(f, y);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        double r = f[k] - target_at(y, k);
        s += r * r;
    }
    return s;
}

std::vector<double> loss_gradient(loss_kind kind, std::span<const double> f, const label& y) {
    if (kind == loss_kind::multiclass_hinge) {
        check_hinge(f, y);
        std::size_t c = y.class_index();
        std::size_t j = best_competitor(f, c);
        std::vector<double> g(f.size(), 0.0);
        if (f[c] - f[j] < 1.0) {
            g[j] = 1.0;
            g[c] = -1.0;
        }
        return g;
    }
    check_squared(f, y);
    std::vector<double> g(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) g[k] = 2.0 * (f[k] - target_at(y, k));
    return g;
}

}  // namespace askl
