#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace askl {

enum class loss_kind {
    multiclass_hinge,  // one-hot labels, K >= 2
    squared            // any real target vector
};

// A supervised label: either a class index (classification, encoded one-hot
// where needed) or a real target vector (regression).
class label {
public:
    static label of_class(std::size_t index) {
        label l;
        l.is_class_ = true;
        l.class_index_ = index;
        return l;
    }
    static label of_target(std::vector<double> target) {
        label l;
        l.is_class_ = false;
        l.target_ = std::move(target);
        return l;
    }

    bool is_class() const { return is_class_; }
    std::size_t class_index() const {
        if (!is_class_) throw argument_error("label: not a class label");
        return class_index_;
    }
    const std::vector<double>& target() const {
        if (is_class_) throw argument_error("label: not a target label");
        return target_;
    }

private:
    bool is_class_ = true;
    std::size_t class_index_ = 0;
    std::vector<double> target_;
};

// Value of the loss at estimator output f.
double loss_value(loss_kind kind, std::span<const double> f, const label& y);

// (Sub)gradient of the loss with respect to f. Hinge at a satisfied or
// exactly-met margin returns zero; argmax ties break to the lowest index.
std::vector<double> loss_gradient(loss_kind kind, std::span<const double> f, const label& y);

}  // namespace askl
