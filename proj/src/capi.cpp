#include "askl.h"

#include <cstring>
#include <exception>
#include <limits>
#include <string>

#include <json.hpp>

#include "bounds.hpp"
#include "data.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "serialize.hpp"

struct askl_dataset {
    askl::dataset value;
};
struct askl_config {
    askl::run_config value;
};
struct askl_model {
    askl::trained_model value;
};
struct askl_trace {
    askl::trace_log value;
};

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const std::string& message) { g_last_error = message; }

askl_status classify(const std::exception& e) {
    if (dynamic_cast<const askl::parse_error*>(&e)) return ASKL_ERR_PARSE;
    if (dynamic_cast<const askl::io_error*>(&e)) return ASKL_ERR_IO;
    if (dynamic_cast<const askl::numeric_error*>(&e)) return ASKL_ERR_NUMERIC;
    if (dynamic_cast<const askl::argument_error*>(&e)) return ASKL_ERR_ARGUMENT;
    return ASKL_ERR_INTERNAL;
}

template <typename Fn>
askl_status guarded(Fn&& fn) {
    try {
        fn();
        return ASKL_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return classify(e);
    } catch (...) {
        set_error("unknown failure");
        return ASKL_ERR_INTERNAL;
    }
}

askl_status require(bool condition, const char* message) {
    if (condition) return ASKL_OK;
    set_error(message);
    return ASKL_ERR_ARGUMENT;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

askl::task_kind from_c(askl_task task) {
    return task == ASKL_TASK_CLASSIFICATION ? askl::task_kind::classification
                                            : askl::task_kind::regression;
}

askl_task to_c(askl::task_kind task) {
    return task == askl::task_kind::classification ? ASKL_TASK_CLASSIFICATION
                                                   : ASKL_TASK_REGRESSION;
}

}  // namespace

extern "C" {

const char* askl_version(void) { return "0.1.0"; }

const char* askl_last_error(void) { return g_last_error.c_str(); }

void askl_string_free(char* s) { delete[] s; }

askl_status askl_dataset_load(const char* path, askl_task task, askl_dataset** out) {
    if (askl_status s = require(path && out, "askl_dataset_load: NULL argument")) return s;
    return guarded([&] {
        *out = new askl_dataset{askl::load_libsvm_file(path, from_c(task))};
    });
}

askl_status askl_dataset_load_registry(const char* registry_path, const char* name,
                                       askl_dataset** out) {
    if (askl_status s =
            require(registry_path && name && out, "askl_dataset_load_registry: NULL argument"))
        return s;
    return guarded([&] {
        auto registry = askl::load_registry(registry_path);
        auto it = registry.find(name);
        if (it == registry.end())
            throw askl::argument_error(std::string("dataset not in registry: ") + name);
        askl::dataset ds = askl::load_libsvm_file(it->second.path, it->second.task);
        ds.name = name;
        *out = new askl_dataset{std::move(ds)};
    });
}

askl_status askl_dataset_info(const askl_dataset* ds, uint64_t* n, uint64_t* d,
                              uint64_t* outputs, askl_task* task) {
    if (askl_status s = require(ds != nullptr, "askl_dataset_info: NULL dataset")) return s;
    if (n) *n = ds->value.size();
    if (d) *d = ds->value.dim();
    if (outputs) *outputs = ds->value.output_dim;
    if (task) *task = to_c(ds->value.task);
    return ASKL_OK;
}

askl_status askl_dataset_split(const askl_dataset* ds, double test_fraction, uint64_t seed,
                               askl_dataset** train, askl_dataset** test) {
    if (askl_status s =
            require(ds && train && test, "askl_dataset_split: NULL argument"))
        return s;
    return guarded([&] {
        auto [tr, te] = askl::split(ds->value, test_fraction, seed);
        *train = new askl_dataset{std::move(tr)};
        *test = new askl_dataset{std::move(te)};
    });
}

askl_status askl_dataset_standardize(const askl_dataset* train, const askl_dataset* apply_to,
                                     int zscore_features, askl_dataset** train_out,
                                     askl_dataset** apply_out) {
    if (askl_status s = require(train && apply_to && train_out && apply_out,
                                "askl_dataset_standardize: NULL argument"))
        return s;
    return guarded([&] {
        askl::standardize_result r =
            askl::standardize(train->value, apply_to->value, zscore_features != 0);
        *train_out = new askl_dataset{std::move(r.train)};
        *apply_out = new askl_dataset{std::move(r.applied)};
    });
}

askl_status askl_dataset_apply_model_standardization(const askl_model* model,
                                                     const askl_dataset* ds,
                                                     askl_dataset** out) {
    if (askl_status s = require(model && ds && out,
                                "askl_dataset_apply_model_standardization: NULL argument"))
        return s;
    return guarded([&] {
        if (!model->value.standardization) {
            *out = new askl_dataset{ds->value};  // nothing to apply
            return;
        }
        *out = new askl_dataset{
            askl::standardize_apply(*model->value.standardization, ds->value)};
    });
}

void askl_dataset_free(askl_dataset* ds) { delete ds; }

askl_status askl_config_from_json(const char* json_text, askl_config** out) {
    if (askl_status s = require(json_text && out, "askl_config_from_json: NULL argument"))
        return s;
    return guarded([&] { *out = new askl_config{askl::config_from_json(json_text)}; });
}

askl_status askl_config_to_json(const askl_config* config, char** json_out) {
    if (askl_status s = require(config && json_out, "askl_config_to_json: NULL argument"))
        return s;
    return guarded([&] { *json_out = copy_string(askl::config_to_json(config->value)); });
}

void askl_config_free(askl_config* config) { delete config; }

askl_status askl_fit(const askl_dataset* train, const askl_config* config,
                     const askl_dataset* eval_set, askl_model** out_model,
                     askl_trace** out_trace) {
    if (askl_status s = require(train && config && out_model, "askl_fit: NULL argument"))
        return s;
    return guarded([&] {
        askl::fit_result r = askl::fit(train->value, config->value.train,
                                       eval_set ? &eval_set->value : nullptr);
        *out_model = new askl_model{std::move(r.model)};
        if (out_trace) *out_trace = new askl_trace{std::move(r.trace)};
    });
}

askl_status askl_evaluate(const askl_model* model, const askl_dataset* ds, double* metric) {
    if (askl_status s = require(model && ds && metric, "askl_evaluate: NULL argument"))
        return s;
    return guarded([&] { *metric = askl::evaluate(model->value, ds->value).value; });
}

askl_status askl_predict(const askl_model* model, const double* x, uint64_t d,
                         double* out_f, uint64_t outputs) {
    if (askl_status s = require(model && x && out_f, "askl_predict: NULL argument")) return s;
    return guarded([&] {
        if (d != model->value.pack.d())
            throw askl::argument_error("askl_predict: input length mismatch");
        if (outputs != model->value.w.cols())
            throw askl::argument_error("askl_predict: output length mismatch");
        std::vector<double> f =
            askl::predict(model->value, std::span<const double>(x, d));
        std::memcpy(out_f, f.data(), f.size() * sizeof(double));
    });
}

askl_status askl_model_save(const askl_model* model, const char* path) {
    if (askl_status s = require(model && path, "askl_model_save: NULL argument")) return s;
    return guarded([&] { askl::save_model(model->value, path); });
}

askl_status askl_model_load(const char* path, askl_model** out) {
    if (askl_status s = require(path && out, "askl_model_load: NULL argument")) return s;
    return guarded([&] { *out = new askl_model{askl::load_model(path)}; });
}

askl_status askl_model_info(const askl_model* model, uint64_t* d, uint64_t* feature_count,
                            uint64_t* outputs, askl_task* task, char** variant_name) {
    if (askl_status s = require(model != nullptr, "askl_model_info: NULL model")) return s;
    if (d) *d = model->value.pack.d();
    if (feature_count) *feature_count = model->value.pack.feature_count();
    if (outputs) *outputs = model->value.output_dim;
    if (task) *task = to_c(model->value.task);
    if (variant_name) *variant_name = copy_string(askl::variant_name(model->value.kind));
    return ASKL_OK;
}

void askl_model_free(askl_model* model) { delete model; }

askl_status askl_trace_record_count(const askl_trace* trace, uint64_t* count) {
    if (askl_status s = require(trace && count, "askl_trace_record_count: NULL argument"))
        return s;
    *count = trace->value.records.size();
    return ASKL_OK;
}

askl_status askl_trace_record(const askl_trace* trace, uint64_t index, int64_t* iteration,
                              double* objective, double* test_metric,
                              double* nuclear_norm_w, double* feature_frobenius_sq) {
    if (askl_status s = require(trace != nullptr, "askl_trace_record: NULL trace")) return s;
    if (index >= trace->value.records.size()) {
        set_error("askl_trace_record: index out of range");
        return ASKL_ERR_ARGUMENT;
    }
    const askl::trace_record& r = trace->value.records[index];
    if (iteration) *iteration = r.iteration;
    if (objective) *objective = r.objective;
    if (test_metric) *test_metric = r.test_metric;
    if (nuclear_norm_w) *nuclear_norm_w = r.nuclear_norm_w;
    if (feature_frobenius_sq) *feature_frobenius_sq = r.feature_frobenius_sq;
    return ASKL_OK;
}

askl_status askl_trace_to_csv(const askl_trace* trace, char** csv_out) {
    if (askl_status s = require(trace && csv_out, "askl_trace_to_csv: NULL argument"))
        return s;
    return guarded([&] { *csv_out = copy_string(askl::trace_to_csv(trace->value)); });
}

askl_status askl_trace_save(const askl_trace* trace, const char* path) {
    if (askl_status s = require(trace && path, "askl_trace_save: NULL argument")) return s;
    return guarded([&] { askl::save_trace(trace->value, path); });
}

askl_status askl_trace_load(const char* path, askl_trace** out) {
    if (askl_status s = require(path && out, "askl_trace_load: NULL argument")) return s;
    return guarded([&] { *out = new askl_trace{askl::load_trace(path)}; });
}

void askl_trace_free(askl_trace* trace) { delete trace; }

askl_status askl_bound_report(const askl_model* model, const askl_dataset* ds,
                              double lipschitz, double delta, char** json_out) {
    if (askl_status s =
            require(model && ds && json_out, "askl_bound_report: NULL argument"))
        return s;
    return guarded([&] {
        askl::bound_report report =
            askl::make_bound_report(model->value.w, model->value.pack, ds->value.x,
                                    model->value.output_dim, lipschitz, delta);
        *json_out = copy_string(askl::bound_report_to_json(report));
    });
}

askl_status askl_bound_report_auto(const askl_model* model, const askl_dataset* ds,
                                   double delta, char** json_out) {
    if (askl_status s =
            require(model && ds && json_out, "askl_bound_report_auto: NULL argument"))
        return s;
    return guarded([&] {
        double lipschitz = model->value.task == askl::task_kind::classification
                               ? askl::kHingeLipschitz
                               : askl::squared_loss_lipschitz(model->value, ds->value);
        askl::bound_report report =
            askl::make_bound_report(model->value.w, model->value.pack, ds->value.x,
                                    model->value.output_dim, lipschitz, delta);
        *json_out = copy_string(askl::bound_report_to_json(report));
    });
}

askl_status askl_grid_search(const askl_dataset* ds, const askl_config* base,
                             const char* grid_json, char** result_json, char** table_csv) {
    if (askl_status s =
            require(ds && base && grid_json, "askl_grid_search: NULL argument"))
        return s;
    return guarded([&] {
        nlohmann::json j = nlohmann::json::parse(grid_json, nullptr, false);
        if (j.is_discarded()) throw askl::parse_error("grid: malformed JSON");
        askl::param_grid grid;
        try {
            grid.lambda1_values = j.at("lambda1").get<std::vector<double>>();
            grid.lambda2_values = j.at("lambda2").get<std::vector<double>>();
            grid.sigma_values = j.at("sigma").get<std::vector<double>>();
            if (j.contains("folds")) grid.folds = j.at("folds").get<std::size_t>();
        } catch (const nlohmann::json::exception& e) {
            throw askl::parse_error(std::string("grid: ") + e.what());
        }

        askl::grid_result result = askl::grid_search(ds->value, grid, base->value.train);

        if (result_json) {
            askl::run_config best = base->value;
            best.train = result.best;
            nlohmann::json out{
                {"best", nlohmann::json::parse(askl::config_to_json(best))},
                {"table", nlohmann::json::array()}};
            for (const askl::grid_cell& cell : result.table) {
                nlohmann::json c{{"lambda1", cell.lambda1},
                                 {"lambda2", cell.lambda2},
                                 {"sigma", cell.sigma},
                                 {"failed", cell.failed}};
                c["mean_metric"] = cell.failed ? nlohmann::json(nullptr)
                                               : nlohmann::json(cell.mean_metric);
                out["table"].push_back(std::move(c));
            }
            *result_json = copy_string(out.dump(2) + "\n");
        }
        if (table_csv) *table_csv = copy_string(askl::grid_table_to_csv(result));
    });
}

}  // extern "C"
