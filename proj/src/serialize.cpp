#include "serialize.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace askl {
namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw parse_error(std::string(what) + ": malformed JSON");
    return j;
}

void expect_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw parse_error(std::string(what) + ": unknown key '" + it.key() + "'");
}

json matrix_to_json(const matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw parse_error(std::string(what) + ": expected {rows, cols, data}");
    std::size_t rows = j.at("rows").get<std::size_t>();
    std::size_t cols = j.at("cols").get<std::size_t>();
    std::vector<double> data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols)
        throw parse_error(std::string(what) + ": data length does not match shape");
    return matrix(rows, cols, std::move(data));
}

const char* optimizer_name(optimizer_kind kind) {
    return kind == optimizer_kind::adam ? "adam" : "sgd";
}

optimizer_kind optimizer_from_name(const std::string& name) {
    if (name == "adam") return optimizer_kind::adam;
    if (name == "sgd") return optimizer_kind::sgd;
    throw parse_error("unknown optimizer: " + name);
}

json standardization_to_json(const standardization_spec& spec) {
    return json{{"zscore_features", spec.zscore_features},
                {"feature_means", spec.feature_means},
                {"feature_stds", spec.feature_stds},
                {"constant_feature", spec.constant_feature},
                {"has_target_affine", spec.has_target_affine},
                {"target_scale", spec.target_scale},
                {"target_offset", spec.target_offset}};
}

standardization_spec standardization_from_json(const json& j) {
    standardization_spec spec;
    spec.zscore_features = j.at("zscore_features").get<bool>();
    spec.feature_means = j.at("feature_means").get<std::vector<double>>();
    spec.feature_stds = j.at("feature_stds").get<std::vector<double>>();
    spec.constant_feature = j.at("constant_feature").get<std::vector<std::uint8_t>>();
    spec.has_target_affine = j.at("has_target_affine").get<bool>();
    spec.target_scale = j.at("target_scale").get<double>();
    spec.target_offset = j.at("target_offset").get<double>();
    return spec;
}

}  // namespace

const char* task_name(task_kind task) {
    return task == task_kind::classification ? "classification" : "regression";
}

task_kind task_from_name(const std::string& name) {
    if (name == "classification") return task_kind::classification;
    if (name == "regression") return task_kind::regression;
    throw parse_error("unknown task: " + name);
}

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write file: " + path);
    out << content;
    if (!out) throw io_error("write failed: " + path);
}

run_config config_from_json(const std::string& text) {
    json j = parse_json(text, "config");
    if (!j.is_object()) throw parse_error("config: expected a JSON object");
    expect_keys(j,
                {"schema_version", "task", "variant", "feature_count", "lambda1", "lambda2",
                 "sigma", "learning_rate", "batch_size", "epochs", "seed",
                 "checkpoint_every", "optimizer", "freeze_frequencies",
                 "standardize_features", "debug_checks"},
                "config");
    try {
        run_config config;
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
            throw parse_error("config: unsupported schema_version");
        if (j.contains("task")) config.task = task_from_name(j.at("task").get<std::string>());
        if (j.contains("variant"))
            config.train.kind = variant_from_name(j.at("variant").get<std::string>());
        if (j.contains("feature_count"))
            config.train.feature_count = j.at("feature_count").get<std::size_t>();
        if (j.contains("lambda1")) config.train.lambda1 = j.at("lambda1").get<double>();
        if (j.contains("lambda2")) config.train.lambda2 = j.at("lambda2").get<double>();
        if (j.contains("sigma")) config.train.sigma = j.at("sigma").get<double>();
        if (j.contains("learning_rate"))
            config.train.eta = j.at("learning_rate").get<double>();
        if (j.contains("batch_size"))
            config.train.batch_size = j.at("batch_size").get<std::size_t>();
        if (j.contains("epochs")) config.train.epochs = j.at("epochs").get<std::size_t>();
        if (j.contains("seed")) config.train.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("checkpoint_every"))
            config.train.checkpoint_every = j.at("checkpoint_every").get<std::size_t>();
        if (j.contains("optimizer"))
            config.train.optimizer =
                optimizer_from_name(j.at("optimizer").get<std::string>());
        if (j.contains("freeze_frequencies"))
            config.train.freeze_frequencies = j.at("freeze_frequencies").get<bool>();
        if (j.contains("standardize_features"))
            config.standardize_features = j.at("standardize_features").get<bool>();
        if (j.contains("debug_checks"))
            config.train.debug_checks = j.at("debug_checks").get<bool>();
        validate(config.train);
        return config;
    } catch (const json::exception& e) {
        throw parse_error(std::string("config: ") + e.what());
    } catch (const argument_error& e) {
        throw parse_error(e.what());
    }
}

std::string config_to_json(const run_config& config) {
    json j{{"schema_version", 1},
           {"task", task_name(config.task)},
           {"variant", variant_name(config.train.kind)},
           {"feature_count", config.train.feature_count},
           {"lambda1", config.train.lambda1},
           {"lambda2", config.train.lambda2},
           {"sigma", config.train.sigma},
           {"learning_rate", config.train.eta},
           {"batch_size", config.train.batch_size},
           {"epochs", config.train.epochs},
           {"seed", config.train.seed},
           {"checkpoint_every", config.train.checkpoint_every},
           {"optimizer", optimizer_name(config.train.optimizer)},
           {"freeze_frequencies", config.train.freeze_frequencies},
           {"standardize_features", config.standardize_features},
           {"debug_checks", config.train.debug_checks}};
    return j.dump(2) + "\n";
}

std::string model_to_json(const trained_model& model) {
    json j{{"format_version", 1},
           {"kind", "askl-model"},
           {"variant", variant_name(model.kind)},
           {"task", task_name(model.task)},
           {"input_dim", model.pack.d()},
           {"feature_count", model.pack.feature_count()},
           {"outputs", model.output_dim},
           {"w", matrix_to_json(model.w)},
           {"omega", matrix_to_json(model.pack.omega)},
           {"omega_prime", matrix_to_json(model.pack.omega_prime)},
           {"phase_b", model.pack.phase_b},
           {"phase_b_prime", model.pack.phase_b_prime},
           {"class_values", model.class_values}};
    j["standardization"] = model.standardization
                               ? standardization_to_json(*model.standardization)
                               : json(nullptr);
    return j.dump() + "\n";
}

trained_model model_from_json(const std::string& text) {
    json j = parse_json(text, "model");
    try {
        if (j.at("format_version").get<int>() != 1)
            throw parse_error("model: unsupported format_version");
        if (j.at("kind").get<std::string>() != "askl-model")
            throw parse_error("model: not a model artifact");
        trained_model model;
        model.kind = variant_from_name(j.at("variant").get<std::string>());
        model.task = task_from_name(j.at("task").get<std::string>());
        model.output_dim = j.at("outputs").get<std::size_t>();
        model.w = matrix_from_json(j.at("w"), "model.w");
        model.pack.omega = matrix_from_json(j.at("omega"), "model.omega");
        model.pack.omega_prime = matrix_from_json(j.at("omega_prime"), "model.omega_prime");
        model.pack.phase_b = j.at("phase_b").get<std::vector<double>>();
        model.pack.phase_b_prime = j.at("phase_b_prime").get<std::vector<double>>();
        model.class_values = j.at("class_values").get<std::vector<double>>();
        if (!j.at("standardization").is_null())
            model.standardization = standardization_from_json(j.at("standardization"));

        std::size_t d = j.at("input_dim").get<std::size_t>();
        std::size_t feature_count = j.at("feature_count").get<std::size_t>();
        if (model.pack.omega.rows() != d || model.pack.omega.cols() != feature_count ||
            model.pack.omega_prime.rows() != d ||
            model.pack.omega_prime.cols() != feature_count ||
            model.pack.phase_b.size() != feature_count ||
            model.pack.phase_b_prime.size() != feature_count ||
            model.w.cols() != model.output_dim)
            throw parse_error("model: inconsistent shapes");
        return model;
    } catch (const json::exception& e) {
        throw parse_error(std::string("model: ") + e.what());
    } catch (const argument_error& e) {
        throw parse_error(e.what());
    }
}

void save_model(const trained_model& model, const std::string& path) {
    write_text_file(path, model_to_json(model));
}

trained_model load_model(const std::string& path) {
    return model_from_json(read_text_file(path));
}

std::string trace_to_csv(const trace_log& trace) {
    std::string out = "iteration,objective,test_metric,nuclear_norm_w,feature_frobenius_sq\n";
    for (const trace_record& r : trace.records) {
        out += std::to_string(r.iteration);
        out += ',';
        out += format_g17(r.objective);
        out += ',';
        out += format_g17(r.test_metric);
        out += ',';
        out += format_g17(r.nuclear_norm_w);
        out += ',';
        out += format_g17(r.feature_frobenius_sq);
        out += '\n';
    }
    return out;
}

std::string trace_to_json(const trace_log& trace) {
    json records = json::array();
    for (const trace_record& r : trace.records) {
        json rec{{"iteration", r.iteration},
                 {"objective", r.objective},
                 {"nuclear_norm_w", r.nuclear_norm_w},
                 {"feature_frobenius_sq", r.feature_frobenius_sq}};
        rec["test_metric"] = std::isnan(r.test_metric) ? json(nullptr) : json(r.test_metric);
        records.push_back(std::move(rec));
    }
    return json{{"format_version", 1}, {"records", records}}.dump() + "\n";
}

trace_log trace_from_json(const std::string& text) {
    json j = parse_json(text, "trace");
    try {
        if (j.at("format_version").get<int>() != 1)
            throw parse_error("trace: unsupported format_version");
        trace_log trace;
        for (const json& rec : j.at("records")) {
            trace_record r;
            r.iteration = rec.at("iteration").get<std::int64_t>();
            r.objective = rec.at("objective").get<double>();
            r.test_metric = rec.at("test_metric").is_null()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : rec.at("test_metric").get<double>();
            r.nuclear_norm_w = rec.at("nuclear_norm_w").get<double>();
            r.feature_frobenius_sq = rec.at("feature_frobenius_sq").get<double>();
            trace.records.push_back(r);
        }
        return trace;
    } catch (const json::exception& e) {
        throw parse_error(std::string("trace: ") + e.what());
    }
}

void save_trace(const trace_log& trace, const std::string& path) {
    write_text_file(path, trace_to_json(trace));
}

trace_log load_trace(const std::string& path) {
    return trace_from_json(read_text_file(path));
}

std::string bound_report_to_json(const bound_report& report) {
    json j{{"b_nuclear", report.b_nuclear},
           {"rademacher", report.rademacher},
           {"excess_risk", report.excess_risk},
           {"lipschitz", report.lipschitz},
           {"delta", report.delta},
           {"n", report.n},
           {"outputs", report.outputs},
           {"confidence_constant", "fixed at 1 (indicative)"}};
    return j.dump(2) + "\n";
}

std::string grid_table_to_csv(const grid_result& result) {
    std::string out = "lambda1,lambda2,sigma,mean_metric,failed\n";
    for (const grid_cell& cell : result.table) {
        out += format_g17(cell.lambda1);
        out += ',';
        out += format_g17(cell.lambda2);
        out += ',';
        out += format_g17(cell.sigma);
        out += ',';
        out += format_g17(cell.mean_metric);
        out += ',';
        out += cell.failed ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::map<std::string, registry_entry> load_registry(const std::string& path) {
    json j = parse_json(read_text_file(path), "registry");
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    try {
        if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
            throw parse_error("registry: unsupported schema_version");
        std::map<std::string, registry_entry> out;
        for (auto it = j.at("datasets").begin(); it != j.at("datasets").end(); ++it) {
            registry_entry entry;
            std::filesystem::path p = it.value().at("path").get<std::string>();
            entry.path = (p.is_absolute() ? p : base / p).string();
            entry.task = task_from_name(it.value().at("task").get<std::string>());
            out.emplace(it.key(), std::move(entry));
        }
        return out;
    } catch (const json::exception& e) {
        throw parse_error(std::string("registry: ") + e.what());
    }
}

}  // namespace askl
