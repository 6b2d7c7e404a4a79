#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "serialize.hpp"

using askl::config_from_json;
using askl::config_to_json;
using askl::format_g17;
using askl::label;
using askl::matrix;
using askl::optimizer_kind;
using askl::run_config;
using askl::task_kind;
using askl::trace_log;
using askl::trace_record;
using askl::trained_model;
using askl::variant_kind;

namespace {

struct temp_dir {
    std::filesystem::path path;
    temp_dir() {
        path = std::filesystem::temp_directory_path() /
               ("askl_serialize_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~temp_dir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

trained_model sample_model() {
    trained_model model;
    model.kind = variant_kind::askl_variant;
    model.task = task_kind::classification;
    model.output_dim = 2;
    model.class_values = {-1.0, 3.5};
    model.w = matrix(3, 2, {0.1 + 0.2, 1.0 / 3.0, std::numbers::pi, -1e-300,
                            7.25e17, -0.0});
    model.pack.omega = matrix(2, 3, {0.5, -0.25, 1e-9, 2.0, 3.0, -4.5});
    model.pack.omega_prime = matrix(2, 3, {1.5, 0.125, -2e5, 0.75, -0.5, 9.0});
    model.pack.phase_b = {0.1, 5.9, 3.3};
    model.pack.phase_b_prime = {2.2, 4.4, 0.6};
    askl::standardization_spec spec;
    spec.zscore_features = true;
    spec.feature_means = {0.25, -17.0};
    spec.feature_stds = {2.0, 1.0};
    spec.constant_feature = {0, 1};
    model.standardization = spec;
    return model;
}

}  // namespace

TEST_CASE("config round-trips through JSON with every field intact") {
    run_config config;
    config.task = task_kind::regression;
    config.standardize_features = false;
    config.train.kind = variant_kind::skl;
    config.train.feature_count = 123;
    config.train.lambda1 = 0.015625;
    config.train.lambda2 = 1.0 / 3.0;
    config.train.sigma = 2.5;
    config.train.eta = 0.004;
    config.train.batch_size = 17;
    config.train.epochs = 9;
    config.train.seed = 0xdeadbeefcafeull;
    config.train.checkpoint_every = 55;
    config.train.optimizer = optimizer_kind::sgd;
    config.train.freeze_frequencies = true;
    config.train.debug_checks = true;

    run_config back = config_from_json(config_to_json(config));
    CHECK(back.task == config.task);
    CHECK(back.standardize_features == config.standardize_features);
    CHECK(back.train.kind == config.train.kind);
    CHECK(back.train.feature_count == config.train.feature_count);
    CHECK(back.train.lambda1 == config.train.lambda1);
    CHECK(back.train.lambda2 == config.train.lambda2);
    CHECK(back.train.sigma == config.train.sigma);
    CHECK(back.train.eta == config.train.eta);
    CHECK(back.train.batch_size == config.train.batch_size);
    CHECK(back.train.epochs == config.train.epochs);
    CHECK(back.train.seed == config.train.seed);
    CHECK(back.train.checkpoint_every == config.train.checkpoint_every);
    CHECK(back.train.optimizer == config.train.optimizer);
    CHECK(back.train.freeze_frequencies == config.train.freeze_frequencies);
    CHECK(back.train.debug_checks == config.train.debug_checks);
}

TEST_CASE("omitted config keys fall back to defaults") {
    run_config defaults = config_from_json("{\"schema_version\": 1}");
    CHECK(defaults.task == task_kind::classification);
    CHECK(defaults.standardize_features);
    CHECK(defaults.train.kind == variant_kind::askl_variant);
    CHECK(defaults.train.feature_count == 2000);
    CHECK(defaults.train.lambda1 == 0.0);
    CHECK(defaults.train.sigma == 1.0);
    CHECK(defaults.train.eta == 1e-3);
    CHECK(defaults.train.batch_size == 32);
    CHECK(defaults.train.epochs == 30);
    CHECK(defaults.train.checkpoint_every == 200);
    CHECK(defaults.train.optimizer == optimizer_kind::adam);
    CHECK_FALSE(defaults.train.freeze_frequencies);
    CHECK_FALSE(defaults.train.debug_checks);

    run_config empty = config_from_json("{}");
    CHECK(empty.train.feature_count == 2000);
}

TEST_CASE("config parsing is strict about keys, values, and schema") {
    CHECK_THROWS_AS(config_from_json("{\"lambda_one\": 0.1}"), askl::parse_error);
    try {
        config_from_json("{\"lambda_one\": 0.1}");
    } catch (const askl::parse_error& e) {
        CHECK(std::string(e.what()).find("lambda_one") != std::string::npos);
    }
    CHECK_THROWS_AS(config_from_json("{\"schema_version\": 2}"), askl::parse_error);
    CHECK_THROWS_AS(config_from_json("not json"), askl::parse_error);
    CHECK_THROWS_AS(config_from_json("[1, 2]"), askl::parse_error);
    CHECK_THROWS_AS(config_from_json("{\"variant\": \"XXL\"}"), askl::parse_error);
    CHECK_THROWS_AS(config_from_json("{\"task\": \"ranking\"}"), askl::parse_error);
    CHECK_THROWS_AS(config_from_json("{\"optimizer\": \"lbfgs\"}"), askl::parse_error);
    CHECK_THROWS_AS(config_from_json("{\"learning_rate\": 0.0}"), askl::parse_error);
    CHECK_THROWS_AS(config_from_json("{\"batch_size\": \"four\"}"), askl::parse_error);
}

TEST_CASE("model artifacts round-trip bit-exactly through disk") {
    temp_dir dir;
    trained_model model = sample_model();
    std::string path = dir.file("model.json");
    askl::save_model(model, path);
    trained_model back = askl::load_model(path);

    CHECK(back.kind == model.kind);
    CHECK(back.task == model.task);
    CHECK(back.output_dim == model.output_dim);
    CHECK(back.class_values == model.class_values);
    CHECK(back.w.values() == model.w.values());
    CHECK(back.pack.omega.values() == model.pack.omega.values());
    CHECK(back.pack.omega_prime.values() == model.pack.omega_prime.values());
    CHECK(back.pack.phase_b == model.pack.phase_b);
    CHECK(back.pack.phase_b_prime == model.pack.phase_b_prime);
    REQUIRE(back.standardization.has_value());
    CHECK(back.standardization->feature_means == model.standardization->feature_means);
    CHECK(back.standardization->feature_stds == model.standardization->feature_stds);
    CHECK(back.standardization->constant_feature ==
          model.standardization->constant_feature);

    trained_model bare = model;
    bare.standardization.reset();
    std::string bare_text = askl::model_to_json(bare);
    CHECK_FALSE(askl::model_from_json(bare_text).standardization.has_value());
}

TEST_CASE("model artifacts are validated on load") {
    trained_model model = sample_model();
    nlohmann::json j = nlohmann::json::parse(askl::model_to_json(model));

    nlohmann::json wrong_kind = j;
    wrong_kind["kind"] = "other";
    CHECK_THROWS_AS(askl::model_from_json(wrong_kind.dump()), askl::parse_error);

    nlohmann::json wrong_version = j;
    wrong_version["format_version"] = 9;
    CHECK_THROWS_AS(askl::model_from_json(wrong_version.dump()), askl::parse_error);

    nlohmann::json bad_shape = j;
    bad_shape["omega"]["cols"] = 7;
    CHECK_THROWS_AS(askl::model_from_json(bad_shape.dump()), askl::parse_error);

    nlohmann::json missing = j;
    missing.erase("w");
    CHECK_THROWS_AS(askl::model_from_json(missing.dump()), askl::parse_error);

    CHECK_THROWS_AS(askl::model_from_json("{"), askl::parse_error);
    CHECK_THROWS_AS(askl::load_model("/nonexistent/model.json"), askl::io_error);
}

TEST_CASE("trace CSV carries the pinned header and round-trip digits") {
    trace_log trace;
    trace.records.push_back({200, 0.962, 0.8125, 1.0 / 3.0, 123.456});
    trace.records.push_back(
        {400, 1e-17, std::numeric_limits<double>::quiet_NaN(), 0.0, 2.0});

    std::string csv = askl::trace_to_csv(trace);
    std::size_t newline = csv.find('\n');
    CHECK(csv.substr(0, newline) ==
          "iteration,objective,test_metric,nuclear_norm_w,feature_frobenius_sq");

    std::vector<std::string> lines;
    std::size_t pos = newline + 1;
    while (pos < csv.size()) {
        std::size_t next = csv.find('\n', pos);
        lines.push_back(csv.substr(pos, next - pos));
        pos = next + 1;
    }
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].substr(0, 4) == "200,");
    CHECK(lines[1].find("nan") != std::string::npos);

    // Every numeric field must parse back to the exact stored double.
    std::vector<std::string> fields;
    pos = 0;
    std::string row = lines[0];
    while (true) {
        std::size_t comma = row.find(',', pos);
        fields.push_back(row.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    REQUIRE(fields.size() == 5);
    CHECK(std::strtod(fields[1].c_str(), nullptr) == 0.962);
    CHECK(std::strtod(fields[2].c_str(), nullptr) == 0.8125);
    CHECK(std::strtod(fields[3].c_str(), nullptr) == 1.0 / 3.0);
    CHECK(std::strtod(fields[4].c_str(), nullptr) == 123.456);
}

TEST_CASE("trace JSON uses null for missing metrics and round-trips") {
    temp_dir dir;
    trace_log trace;
    trace.records.push_back({10, 0.5, std::numeric_limits<double>::quiet_NaN(),
                             1.25, 17.0});
    trace.records.push_back({20, 0.25, 0.75, 1.0, 18.5});

    std::string text = askl::trace_to_json(trace);
    nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j.at("records")[0].at("test_metric").is_null());
    CHECK(j.at("records")[1].at("test_metric").get<double>() == 0.75);

    std::string path = dir.file("trace.json");
    askl::save_trace(trace, path);
    trace_log back = askl::load_trace(path);
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[0].iteration == 10);
    CHECK(std::isnan(back.records[0].test_metric));
    CHECK(back.records[0].objective == 0.5);
    CHECK(back.records[1].test_metric == 0.75);
    CHECK(back.records[1].feature_frobenius_sq == 18.5);

    CHECK_THROWS_AS(askl::trace_from_json("{\"format_version\": 3, \"records\": []}"),
                    askl::parse_error);
    CHECK_THROWS_AS(askl::trace_from_json("{}"), askl::parse_error);
}

TEST_CASE("bound reports serialize with all fields present") {
    askl::bound_report report;
    report.b_nuclear = 1.5;
    report.rademacher = 0.25;
    report.excess_risk = 2.95;
    report.lipschitz = 2.0;
    report.delta = 0.05;
    report.n = 640;
    report.outputs = 3;

    nlohmann::json j = nlohmann::json::parse(askl::bound_report_to_json(report));
    CHECK(j.at("b_nuclear").get<double>() == 1.5);
    CHECK(j.at("rademacher").get<double>() == 0.25);
    CHECK(j.at("excess_risk").get<double>() == 2.95);
    CHECK(j.at("lipschitz").get<double>() == 2.0);
    CHECK(j.at("delta").get<double>() == 0.05);
    CHECK(j.at("n").get<std::size_t>() == 640);
    CHECK(j.at("outputs").get<std::size_t>() == 3);
    CHECK(j.contains("confidence_constant"));
}

TEST_CASE("grid tables serialize one row per cell") {
    askl::grid_result result;
    result.table.push_back({0.1, 0.01, 1.0, 0.875, false});
    result.table.push_back({0.1, 0.01, 2.0, std::numeric_limits<double>::quiet_NaN(),
                            true});
    std::string csv = askl::grid_table_to_csv(result);
    CHECK(csv.find("lambda1,lambda2,sigma,mean_metric,failed\n") == 0);
    CHECK(csv.find("0.875,0\n") != std::string::npos);
    CHECK(csv.find("nan,1\n") != std::string::npos);
}

TEST_CASE("the dataset registry resolves relative paths against its location") {
    temp_dir dir;
    std::string registry_path = dir.file("registry.json");
    askl::write_text_file(
        registry_path,
        "{\"schema_version\": 1, \"datasets\": {"
        "\"letter\": {\"path\": \"raw/letter.svm\", \"task\": \"classification\"},"
        "\"cpu\": {\"path\": \"/abs/cpu.svm\", \"task\": \"regression\"}}}");

    auto registry = askl::load_registry(registry_path);
    REQUIRE(registry.size() == 2);
    CHECK(registry.at("letter").path == (dir.path / "raw/letter.svm").string());
    CHECK(registry.at("letter").task == task_kind::classification);
    CHECK(registry.at("cpu").path == "/abs/cpu.svm");
    CHECK(registry.at("cpu").task == task_kind::regression);

    askl::write_text_file(dir.file("bad.json"), "{\"datasets\": 3}");
    CHECK_THROWS_AS(askl::load_registry(dir.file("bad.json")), askl::parse_error);
    askl::write_text_file(dir.file("bad2.json"),
                          "{\"datasets\": {\"a\": {\"path\": \"x\", \"task\": \"y\"}}}");
    CHECK_THROWS_AS(askl::load_registry(dir.file("bad2.json")), askl::parse_error);
    CHECK_THROWS_AS(askl::load_registry(dir.file("missing.json")), askl::io_error);
}

TEST_CASE("printed doubles parse back to the identical bits") {
    for (double v : {0.1, 1.0 / 3.0, std::numbers::pi, 1e-300, 6.02214076e23,
                     -0.0, 4503599627370497.0}) {
        std::string s = format_g17(v);
        double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
    }
    CHECK(format_g17(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_g17(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("text file helpers round-trip and surface IO failures") {
    temp_dir dir;
    std::string path = dir.file("blob.txt");
    askl::write_text_file(path, "alpha\nbeta\n");
    CHECK(askl::read_text_file(path) == "alpha\nbeta\n");
    CHECK_THROWS_AS(askl::read_text_file(dir.file("absent.txt")), askl::io_error);
    CHECK_THROWS_AS(askl::write_text_file(dir.file("no/such/dir/file.txt"), "x"),
                    askl::io_error);
}
