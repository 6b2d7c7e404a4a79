#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "losses.hpp"
#include "matrix.hpp"

namespace askl {

enum class task_kind { classification, regression };

// Feature z-scoring statistics and the regression target affine map, all
// computed from a training set only.
struct standardization_spec {
    bool zscore_features = true;
    std::vector<double> feature_means;
    std::vector<double> feature_stds;          // 1.0 where constant_feature is set
    std::vector<std::uint8_t> constant_feature;
    bool has_target_affine = false;            // regression only
    double target_scale = 1.0;                 // maps train target range onto [0, 100]
    double target_offset = 0.0;
};

struct dataset {
    matrix x;                  // n x d
    std::vector<label> labels;
    task_kind task = task_kind::classification;
    std::size_t output_dim = 0;        // K: class count, or target length
    std::string name;
    std::vector<double> class_values;  // original label values, index -> value
    std::optional<standardization_spec> standardization;

    std::size_t size() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }
};

// Parses LIBSVM text: `<label> <index>:<value> ...` per line, 1-based
// strictly increasing indices, zeros implied. Classification labels are
// remapped to contiguous [0, K) in ascending order of the original values,
// with the originals kept in class_values.
dataset parse_libsvm(std::istream& in, task_kind task, std::size_t d_hint = 0,
                     const std::string& name = "");

dataset load_libsvm_file(const std::string& path, task_kind task, std::size_t d_hint = 0);

void serialize_libsvm(const dataset& ds, std::ostream& out);

// Rows of ds selected by idx, in order. Task metadata is inherited.
dataset subset(const dataset& ds, std::span<const std::size_t> idx);

standardization_spec standardize_fit(const dataset& train, bool zscore_features);

dataset standardize_apply(const standardization_spec& spec, const dataset& ds);

// Fits on train, transforms both sets with the same spec.
struct standardize_result {
    dataset train;
    dataset applied;
    standardization_spec spec;
};
standardize_result standardize(const dataset& train, const dataset& apply_to,
                               bool zscore_features = true);

// Seeded permutation split; train gets ceil(n * (1 - test_fraction)) rows.
std::pair<dataset, dataset> split(const dataset& ds, double test_fraction,
                                  std::uint64_t seed);

// k disjoint, exhaustive folds with sizes differing by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed);

}  // namespace askl
