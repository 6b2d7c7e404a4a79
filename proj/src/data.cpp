#include "data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace askl {
namespace {

double parse_double(const std::string& tok, std::size_t line_no, const char* what) {
    double value = 0.0;
    auto [rest, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || rest != tok.data() + tok.size())
        throw parse_error("line " + std::to_string(line_no) + ": bad " + what + " '" + tok +
                          "'");
    return value;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct raw_row {
    double label_value;
    std::vector<std::pair<std::size_t, double>> entries;
};

}  // namespace

dataset parse_libsvm(std::istream& in, task_kind task, std::size_t d_hint,
                     const std::string& name) {
    std::vector<raw_row> rows;
    std::size_t max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string tok;
        if (!(tokens >> tok)) continue;  // blank line

        raw_row row;
        row.label_value = parse_double(tok, line_no, "label");
        std::size_t prev_index = 0;
        while (tokens >> tok) {
            std::size_t colon = tok.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
                throw parse_error("line " + std::to_string(line_no) +
                                  ": expected <index>:<value>, got '" + tok + "'");
            double index_value = parse_double(tok.substr(0, colon), line_no, "index");
            double feature = parse_double(tok.substr(colon + 1), line_no, "feature value");
            if (index_value < 1 || index_value != std::floor(index_value))
                throw parse_error("line " + std::to_string(line_no) +
                                  ": feature index must be a positive integer");
            std::size_t index = static_cast<std::size_t>(index_value);
            if (index <= prev_index)
                throw parse_error("line " + std::to_string(line_no) +
                                  ": feature indices must be strictly increasing");
            if (!std::isfinite(feature))
                throw parse_error("line " + std::to_string(line_no) +
                                  ": feature value must be finite");
            prev_index = index;
            max_index = std::max(max_index, index);
            row.entries.emplace_back(index, feature);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error("no data rows found");

    dataset ds;
    ds.task = task;
    ds.name = name;
    std::size_t d = std::max(d_hint, max_index);
    if (d == 0) throw parse_error("no feature indices found and no dimension hint given");
    ds.x = matrix(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (auto& [index, value] : rows[i].entries) ds.x(i, index - 1) = value;

    if (task == task_kind::classification) {
        std::map<double, std::size_t> mapping;
        for (const raw_row& row : rows) mapping.emplace(row.label_value, 0);
        std::size_t next = 0;
        for (auto& [value, idx] : mapping) idx = next++;
        ds.output_dim = mapping.size();
        ds.class_values.reserve(mapping.size());
        for (auto& [value, idx] : mapping) ds.class_values.push_back(value);
        ds.labels.reserve(rows.size());
        for (const raw_row& row : rows)
            ds.labels.push_back(label::of_class(mapping.at(row.label_value)));
    } else {
        ds.output_dim = 1;
        ds.labels.reserve(rows.size());
        for (const raw_row& row : rows)
            ds.labels.push_back(label::of_target({row.label_value}));
    }
    return ds;
}

dataset load_libsvm_file(const std::string& path, task_kind task, std::size_t d_hint) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dataset file: " + path);
    try {
        dataset ds = parse_libsvm(in, task, d_hint, path);
        return ds;
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

void serialize_libsvm(const dataset& ds, std::ostream& out) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
        double label_value = ds.task == task_kind::classification
                                 ? ds.class_values[ds.labels[i].class_index()]
                                 : ds.labels[i].target()[0];
        out << format_value(label_value);
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            double v = ds.x(i, j);
            if (v == 0.0) continue;
            out << ' ' << (j + 1) << ':' << format_value(v);
        }
        out << '\n';
    }
}

dataset subset(const dataset& ds, std::span<const std::size_t> idx) {
    dataset out;
    out.task = ds.task;
    out.output_dim = ds.output_dim;
    out.name = ds.name;
    out.class_values = ds.class_values;
    out.standardization = ds.standardization;
    out.x = matrix(idx.size(), ds.dim());
    out.labels.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= ds.size()) throw argument_error("subset: row index out of range");
        for (std::size_t j = 0; j < ds.dim(); ++j) out.x(i, j) = ds.x(idx[i], j);
        out.labels.push_back(ds.labels[idx[i]]);
    }
    return out;
}

standardization_spec standardize_fit(const dataset& train, bool zscore_features) {
    if (train.size() == 0) throw argument_error("standardize: empty training set");
    std::size_t n = train.size();
    std::size_t d = train.dim();

    standardization_spec spec;
    spec.zscore_features = zscore_features;
    spec.feature_means.assign(d, 0.0);
    spec.feature_stds.assign(d, 1.0);
    spec.constant_feature.assign(d, 0);
    if (zscore_features) {
        for (std::size_t j = 0; j < d; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += train.x(i, j);
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double c = train.x(i, j) - mean;
                var += c * c;
            }
            var /= static_cast<double>(n);
            spec.feature_means[j] = mean;
            if (var == 0.0) {
                spec.constant_feature[j] = 1;
                spec.feature_stds[j] = 1.0;
            } else {
                spec.feature_stds[j] = std::sqrt(var);
            }
        }
    }

    if (train.task == task_kind::regression) {
        double lo = train.labels[0].target()[0];
        double hi = lo;
        for (const label& l : train.labels) {
            lo = std::min(lo, l.target()[0]);
            hi = std::max(hi, l.target()[0]);
        }
        if (hi == lo)
            throw argument_error("standardize: degenerate target range (max equals min)");
        spec.has_target_affine = true;
        spec.target_scale = 100.0 / (hi - lo);
        spec.target_offset = -lo * spec.target_scale;
    }
    return spec;
}

dataset standardize_apply(const standardization_spec& spec, const dataset& ds) {
    if (spec.feature_means.size() != ds.dim())
        throw argument_error("standardize_apply: spec dimension does not match dataset");
    dataset out = ds;
    if (spec.zscore_features) {
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = 0; j < out.dim(); ++j)
                out.x(i, j) = (out.x(i, j) - spec.feature_means[j]) / spec.feature_stds[j];
    }
    if (ds.task == task_kind::regression && spec.has_target_affine) {
        for (label& l : out.labels) {
            double y = l.target()[0];
            l = label::of_target({spec.target_scale * y + spec.target_offset});
        }
    }
    out.standardization = spec;
    return out;
}

standardize_result standardize(const dataset& train, const dataset& apply_to,
                               bool zscore_features) {
    standardization_spec spec = standardize_fit(train, zscore_features);
    return {standardize_apply(spec, train), standardize_apply(spec, apply_to), spec};
}

std::pair<dataset, dataset> split(const dataset& ds, double test_fraction,
                                  std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw argument_error("split: test_fraction must be in (0, 1)");
    std::size_t n = ds.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng gen(derive_seed(seed, 0x73706c69));  // split stream
    shuffle(perm, gen);

    std::size_t train_n = static_cast<std::size_t>(
        std::ceil(static_cast<double>(n) * (1.0 - test_fraction)));
    if (train_n == 0 || train_n == n)
        throw argument_error("split: both sides must be nonempty");
    std::span<const std::size_t> all(perm);
    return {subset(ds, all.subspan(0, train_n)), subset(ds, all.subspan(train_n))};
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed) {
    if (k < 2) throw argument_error("make_folds: need at least 2 folds");
    if (n < k) throw argument_error("make_folds: fewer rows than folds");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng gen(derive_seed(seed, 0x666f6c64));  // fold stream
    shuffle(perm, gen);

    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t begin = f * n / k;
        std::size_t end = (f + 1) * n / k;
        folds[f].assign(perm.begin() + begin, perm.begin() + end);
    }
    return folds;
}

}  // namespace askl
