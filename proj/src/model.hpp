#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "data.hpp"
#include "matrix.hpp"
#include "optim.hpp"
#include "spectral.hpp"

namespace askl {

enum class variant_kind { sk, nsk, skl, nskl, askl_variant };
enum class kernel_kind { stationary, non_stationary };
enum class weight_reg { squared_frobenius, trace_norm };
enum class optimizer_kind { adam, sgd };

// One row of the variant matrix: which kernel family, whether frequencies
// are trained, and which regularizers apply.
struct variant {
    kernel_kind kernel;
    bool train_frequencies;
    weight_reg regularizer;
    bool feature_regularizer;

    static variant preset(variant_kind kind);
};

const char* variant_name(variant_kind kind);
variant_kind variant_from_name(const std::string& name);

inline map_mode variant_map_mode(const variant& v) {
    return v.kernel == kernel_kind::stationary ? map_mode::stationary_cos
                                               : map_mode::non_stationary_cos;
}

struct train_config {
    variant_kind kind = variant_kind::askl_variant;
    std::size_t feature_count = 2000;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double sigma = 1.0;   // Gaussian init width; frequencies drawn N(0, (1/sigma)^2)
    double eta = 1e-3;
    std::size_t batch_size = 32;
    std::size_t epochs = 30;
    std::uint64_t seed = 0;
    std::size_t checkpoint_every = 200;
    optimizer_kind optimizer = optimizer_kind::adam;
    bool freeze_frequencies = false;  // overrides the variant's train_frequencies
    bool debug_checks = false;        // per-iteration SVT nuclear-norm assertion
};

void validate(const train_config& config);

struct trained_model {
    matrix w;  // feature_count x K
    frequency_pack pack;
    variant_kind kind = variant_kind::askl_variant;
    task_kind task = task_kind::classification;
    std::size_t output_dim = 0;
    std::vector<double> class_values;
    std::optional<standardization_spec> standardization;

    map_mode mode() const { return variant_map_mode(variant::preset(kind)); }
};

struct trace_record {
    std::int64_t iteration = 0;
    double objective = 0.0;
    double test_metric = 0.0;  // NaN when fit had no eval set
    double nuclear_norm_w = 0.0;
    double feature_frobenius_sq = 0.0;
};

struct trace_log {
    std::vector<trace_record> records;
};

std::vector<double> predict(const trained_model& model, std::span<const double> x);

// Argmax with lowest index on ties.
std::size_t predict_class(const trained_model& model, std::span<const double> x);

// Mean loss + lambda1-weighted W regularizer + lambda2 * mean squared
// feature norm (when the variant's feature regularizer is on).
double objective(const matrix& w, const frequency_pack& pack, const dataset& data,
                 const train_config& config);

struct eval_metrics {
    task_kind task = task_kind::classification;
    double value = 0.0;  // accuracy fraction, or RMSE in standardized units
    std::size_t count = 0;
};

eval_metrics evaluate(const trained_model& model, const dataset& data);

struct fit_result {
    trained_model model;
    trace_log trace;
};

// Mini-batch proximal training per the variant: W from zeros, frequencies
// from init_frequencies(d, D, 1/sigma, seed), seeded epoch shuffles,
// checkpoint records every checkpoint_every iterations.
fit_result fit(const dataset& train, const train_config& config,
               const dataset* eval_set = nullptr);

// Same loop but starting from a caller-supplied pack (tests exercise
// specific frequency configurations through this entry).
fit_result fit_from_pack(const dataset& train, const train_config& config,
                         frequency_pack pack, const dataset* eval_set = nullptr);

}  // namespace askl
