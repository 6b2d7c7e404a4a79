// End-to-end tests for the command-line tool. Each case shells the built
// binary (path injected as ASKL_CLI_PATH) against small generated datasets
// and inspects exit codes, stdout/stderr, and the artifact files.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string& cli_path() {
    static const std::string path = ASKL_CLI_PATH;
    return path;
}

struct temp_dir {
    fs::path path;
    temp_dir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("askl_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~temp_dir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path file(const std::string& name) const { return path / name; }
};

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct cli_result {
    int code = -1;
    std::string out;
    std::string err;
};

// Runs the CLI with ASKL_DATA_REGISTRY cleared so only explicit flags count.
cli_result run_cli(const temp_dir& scratch, const std::string& args) {
    static int counter = 0;
    fs::path out_file = scratch.file("stdout_" + std::to_string(counter) + ".txt");
    fs::path err_file = scratch.file("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = "env ASKL_DATA_REGISTRY= " + cli_path() + " " + args + " > " +
                      out_file.string() + " 2> " + err_file.string();
    int raw = std::system(cmd.c_str());
    cli_result result;
    result.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

std::string classification_text(int negative, int positive, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    std::ostringstream out;
    for (int i = 0; i < negative + positive; ++i) {
        bool neg = i < negative;
        double center = neg ? -1.0 : 1.0;
        out << (neg ? "-1" : "1");
        for (int j = 1; j <= 3; ++j) out << " " << j << ":" << center + jitter(gen);
        out << "\n";
    }
    return out.str();
}

std::string regression_text(int rows, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::ostringstream out;
    for (int i = 0; i < rows; ++i) {
        double a = coord(gen), b = coord(gen);
        out << 2.0 * a - b + 0.5 << " 1:" << a << " 2:" << b << "\n";
    }
    return out.str();
}

// Fast deterministic training setup: 12 iterations, checkpoints at 2,4,...,12.
json fast_config() {
    return json{{"variant", "NSK"},          {"task", "classification"},
                {"feature_count", 6},        {"lambda1", 0.001},
                {"lambda2", 0.0},            {"sigma", 1.0},
                {"learning_rate", 0.05},     {"batch_size", 6},
                {"epochs", 3},               {"seed", 11},
                {"checkpoint_every", 2}};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

json parse_file(const fs::path& path) { return json::parse(slurp(path)); }

constexpr const char* kCurveHeader =
    "iteration,objective,test_metric,nuclear_norm_w,feature_frobenius_sq";

}  // namespace

TEST_CASE("train writes the full artifact set with sane contents") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    write_text(scratch.file("config.json"), fast_config().dump());
    fs::path run = scratch.file("run");

    cli_result r = run_cli(scratch, "train --config " +
                                        scratch.file("config.json").string() + " --data " +
                                        scratch.file("blobs.svm").string() + " --out " +
                                        run.string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("trained NSK") != std::string::npos);
    CHECK(r.out.find("artifacts in") != std::string::npos);

    for (const char* name :
         {"model.json", "trace.json", "curves.csv", "metrics.json", "manifest.json"})
        CHECK_MESSAGE(fs::exists(run / name), name);

    json metrics = parse_file(run / "metrics.json");
    CHECK(metrics.at("dataset").get<std::string>() == scratch.file("blobs.svm").string());
    CHECK(metrics.at("variant").get<std::string>() == "NSK");
    CHECK(metrics.at("task").get<std::string>() == "classification");
    CHECK(metrics.at("seed").get<std::uint64_t>() == 11);
    CHECK(metrics.at("n_train").get<int>() == 24);
    CHECK(metrics.at("n_test").get<int>() == 6);
    CHECK(metrics.at("metric_name").get<std::string>() == "accuracy");
    double train_acc = metrics.at("train_metric").get<double>();
    double test_acc = metrics.at("test_metric").get<double>();
    CHECK(train_acc >= 0.0);
    CHECK(train_acc <= 1.0);
    CHECK(test_acc >= 0.0);
    CHECK(test_acc <= 1.0);

    json bound = metrics.at("bound");
    CHECK(bound.at("lipschitz").get<double>() == 2.0);
    CHECK(bound.at("lipschitz_source").get<std::string>() == "hinge default (2)");
    CHECK(bound.at("delta").get<double>() == 0.05);
    CHECK(bound.at("n").get<int>() == 24);
    CHECK(bound.at("outputs").get<int>() == 2);
    CHECK(bound.at("b_nuclear").get<double>() >= 0.0);
    CHECK(bound.at("rademacher").get<double>() >= 0.0);
    CHECK(bound.at("excess_risk").get<double>() > 0.0);

    std::vector<std::string> curve_lines = split_lines(slurp(run / "curves.csv"));
    REQUIRE(curve_lines.size() == 7);  // header + 6 checkpoints
    CHECK(curve_lines[0] == kCurveHeader);
    CHECK(split_csv(curve_lines[1])[0] == "2");

    json manifest = parse_file(run / "manifest.json");
    CHECK(manifest.at("command").get<std::string>() == "train");
    CHECK(manifest.at("tool_version").get<std::string>() == "0.1.0");
    CHECK(manifest.at("seeds") == json::array({11}));
    CHECK(manifest.at("datasets") ==
          json::array({scratch.file("blobs.svm").string()}));
    CHECK(manifest.at("wall_clock_seconds").get<double>() >= 0.0);
    json outputs = manifest.at("outputs");
    CHECK(std::find(outputs.begin(), outputs.end(), json("model.json")) != outputs.end());
    CHECK(std::find(outputs.begin(), outputs.end(), json("metrics.json")) != outputs.end());
    // The manifest snapshot is the normalized config with every key present.
    CHECK(manifest.at("config").at("optimizer").get<std::string>() == "adam");
    CHECK(manifest.at("config").at("feature_count").get<int>() == 6);
}

TEST_CASE("the same train command is byte-identical across reruns") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    write_text(scratch.file("config.json"), fast_config().dump());
    std::string base = "train --config " + scratch.file("config.json").string() +
                       " --data " + scratch.file("blobs.svm").string() + " --out ";

    REQUIRE(run_cli(scratch, base + scratch.file("a").string()).code == 0);
    REQUIRE(run_cli(scratch, base + scratch.file("b").string()).code == 0);
    for (const char* name : {"model.json", "trace.json", "curves.csv", "metrics.json"})
        CHECK_MESSAGE(slurp(scratch.file("a") / name) == slurp(scratch.file("b") / name),
                      name);

    // --seed overrides the config seed and changes the run.
    cli_result r = run_cli(scratch, base + scratch.file("c").string() + " --seed 9");
    REQUIRE(r.code == 0);
    CHECK(parse_file(scratch.file("c") / "metrics.json").at("seed").get<int>() == 9);
    CHECK(slurp(scratch.file("c") / "model.json") !=
          slurp(scratch.file("a") / "model.json"));
}

TEST_CASE("a zero-epoch model predicts the first class everywhere") {
    temp_dir scratch;
    // 10 rows of class -1, 20 rows of class 1. An all-zero weight matrix
    // scores every class equally, so argmax picks index 0, i.e. value -1.
    write_text(scratch.file("skew.svm"), classification_text(10, 20, 2));
    json config = fast_config();
    config["epochs"] = 0;
    write_text(scratch.file("config.json"), config.dump());
    fs::path run = scratch.file("run");

    REQUIRE(run_cli(scratch, "train --config " + scratch.file("config.json").string() +
                                 " --data " + scratch.file("skew.svm").string() +
                                 " --out " + run.string())
                .code == 0);

    cli_result r = run_cli(scratch, "eval --model " + (run / "model.json").string() +
                                        " --data " + scratch.file("skew.svm").string() +
                                        " --out " + scratch.file("evalout").string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    json metrics = json::parse(r.out);
    CHECK(metrics.at("n").get<int>() == 30);
    CHECK(metrics.at("metric_name").get<std::string>() == "accuracy");
    CHECK(metrics.at("value").get<double>() == doctest::Approx(10.0 / 30.0).epsilon(1e-12));
    CHECK(parse_file(scratch.file("evalout") / "metrics.json") == metrics);
    CHECK(parse_file(scratch.file("evalout") / "manifest.json")
              .at("command")
              .get<std::string>() == "eval");

    // The zero-epoch trace has no records, so curves refuses the run.
    cli_result empty = run_cli(scratch, "curves --run " + run.string() + " --out " +
                                            scratch.file("curvesout").string());
    CHECK(empty.code == 2);
    CHECK(empty.err.find("empty trace") != std::string::npos);
}

TEST_CASE("bound subcommand reports on a saved model") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    write_text(scratch.file("config.json"), fast_config().dump());
    fs::path run = scratch.file("run");
    REQUIRE(run_cli(scratch, "train --config " + scratch.file("config.json").string() +
                                 " --data " + scratch.file("blobs.svm").string() +
                                 " --out " + run.string())
                .code == 0);

    cli_result r = run_cli(scratch, "bound --model " + (run / "model.json").string() +
                                        " --data " + scratch.file("blobs.svm").string() +
                                        " --lipschitz 3 --delta 0.1 --out " +
                                        scratch.file("boundout").string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    json report = json::parse(r.out);
    CHECK(report.at("lipschitz").get<double>() == 3.0);
    CHECK(report.at("lipschitz_source").get<std::string>() == "user-supplied");
    CHECK(report.at("delta").get<double>() == 0.1);
    CHECK(report.at("n").get<int>() == 30);
    CHECK(report.at("rademacher").get<double>() >= 0.0);
    CHECK(parse_file(scratch.file("boundout") / "bound.json") == report);
}

TEST_CASE("usage, config, data, and numeric failures use distinct exit codes") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    write_text(scratch.file("config.json"), fast_config().dump());

    SUBCASE("no subcommand is a usage error") {
        CHECK(run_cli(scratch, "").code == 1);
    }
    SUBCASE("missing required flag is a usage error") {
        CHECK(run_cli(scratch, "train --out " + scratch.file("x").string()).code == 1);
    }
    SUBCASE("--data and --dataset are mutually exclusive") {
        cli_result r = run_cli(scratch, "train --config " +
                                            scratch.file("config.json").string() +
                                            " --data a --dataset b --out " +
                                            scratch.file("x").string());
        CHECK(r.code == 1);
    }
    SUBCASE("train without a data source is a usage error") {
        cli_result r = run_cli(scratch, "train --config " +
                                            scratch.file("config.json").string() +
                                            " --out " + scratch.file("x").string());
        CHECK(r.code == 1);
        CHECK(r.err.find("--data or --dataset") != std::string::npos);
    }
    SUBCASE("unknown config key exits 1 and leaves no artifacts") {
        write_text(scratch.file("bad.json"), R"({"bogus_key": 1})");
        cli_result r = run_cli(scratch, "train --config " +
                                            scratch.file("bad.json").string() +
                                            " --data " +
                                            scratch.file("blobs.svm").string() +
                                            " --out " + scratch.file("x").string());
        CHECK(r.code == 1);
        CHECK(r.err.find("bogus_key") != std::string::npos);
        CHECK_FALSE(fs::exists(scratch.file("x")));
    }
    SUBCASE("missing dataset file exits 2") {
        cli_result r = run_cli(scratch, "train --config " +
                                            scratch.file("config.json").string() +
                                            " --data " +
                                            scratch.file("nope.svm").string() +
                                            " --out " + scratch.file("x").string());
        CHECK(r.code == 2);
        CHECK_FALSE(fs::exists(scratch.file("x")));
    }
    SUBCASE("malformed dataset file exits 2") {
        write_text(scratch.file("bad.svm"), "1 2:0.5 1:0.5\n");
        cli_result r = run_cli(scratch, "train --config " +
                                            scratch.file("config.json").string() +
                                            " --data " +
                                            scratch.file("bad.svm").string() + " --out " +
                                            scratch.file("x").string());
        CHECK(r.code == 2);
        CHECK(r.err.find("strictly increasing") != std::string::npos);
    }
    SUBCASE("corrupt model artifact exits 2") {
        write_text(scratch.file("model.json"), "{");
        cli_result r = run_cli(scratch, "eval --model " +
                                            scratch.file("model.json").string() +
                                            " --data " +
                                            scratch.file("blobs.svm").string());
        CHECK(r.code == 2);
    }
    SUBCASE("divergent training exits 3 and leaves no artifacts") {
        write_text(scratch.file("lin.svm"), regression_text(20, 3));
        json config{{"variant", "NSK"},      {"task", "regression"},
                    {"feature_count", 4},    {"optimizer", "sgd"},
                    {"learning_rate", 1e155}, {"epochs", 1},
                    {"batch_size", 8},       {"seed", 3}};
        write_text(scratch.file("hot.json"), config.dump());
        cli_result r = run_cli(scratch, "train --config " +
                                            scratch.file("hot.json").string() +
                                            " --data " + scratch.file("lin.svm").string() +
                                            " --out " + scratch.file("x").string());
        CHECK(r.code == 3);
        CHECK(r.err.find("diverged") != std::string::npos);
        CHECK_FALSE(fs::exists(scratch.file("x")));
    }
}

TEST_CASE("grid subcommand writes the winning config and the full table") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    json base = fast_config();
    base["epochs"] = 2;
    write_text(scratch.file("config.json"), base.dump());
    write_text(scratch.file("grid.json"),
               R"({"lambda1": [0.001], "lambda2": [0.0], "sigma": [0.5, 1.0], "folds": 3})");
    fs::path out = scratch.file("gridout");

    cli_result r = run_cli(scratch, "grid --config " +
                                        scratch.file("config.json").string() + " --grid " +
                                        scratch.file("grid.json").string() + " --data " +
                                        scratch.file("blobs.svm").string() + " --out " +
                                        out.string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("best config:") != std::string::npos);

    json best = parse_file(out / "best_config.json");
    CHECK(best.at("variant").get<std::string>() == "NSK");
    CHECK(best.at("lambda1").get<double>() == 0.001);
    double best_sigma = best.at("sigma").get<double>();
    CHECK((best_sigma == 0.5 || best_sigma == 1.0));

    std::vector<std::string> lines = split_lines(slurp(out / "grid_table.csv"));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "lambda1,lambda2,sigma,mean_metric,failed");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> fields = split_csv(lines[i]);
        REQUIRE(fields.size() == 5);
        CHECK(fields[4] == "0");
    }
    CHECK(parse_file(out / "manifest.json").at("command").get<std::string>() == "grid");
}

TEST_CASE("bench reproduces individual train runs and aggregates them") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    write_text(scratch.file("registry.json"),
               json{{"schema_version", 1},
                    {"datasets",
                     {{"blobs", {{"path", "blobs.svm"}, {"task", "classification"}}}}}}
                   .dump());
    write_text(scratch.file("config.json"), fast_config().dump());
    write_text(scratch.file("bench.json"),
               json{{"schema_version", 1},
                    {"datasets", {"blobs"}},
                    {"variants", {"NSK"}},
                    {"seed_count", 3},
                    {"base_seed", 11},
                    {"config", fast_config()}}
                   .dump());

    // Oracle: three individual train runs at the bench's seeds.
    std::vector<double> metrics;
    for (int seed : {11, 12, 13}) {
        fs::path run = scratch.file("seed" + std::to_string(seed));
        REQUIRE(run_cli(scratch, "train --config " +
                                     scratch.file("config.json").string() + " --data " +
                                     scratch.file("blobs.svm").string() + " --out " +
                                     run.string() + " --seed " + std::to_string(seed))
                    .code == 0);
        metrics.push_back(
            parse_file(run / "metrics.json").at("test_metric").get<double>());
    }
    double mean = (metrics[0] + metrics[1] + metrics[2]) / 3.0;
    double ss = 0.0;
    for (double v : metrics) ss += (v - mean) * (v - mean);
    double stddev = std::sqrt(ss / 2.0);

    fs::path out = scratch.file("benchout");
    cli_result r = run_cli(scratch, "bench --bench " +
                                        scratch.file("bench.json").string() +
                                        " --registry " +
                                        scratch.file("registry.json").string() +
                                        " --out " + out.string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);

    std::vector<std::string> table = split_lines(slurp(out / "bench_table.csv"));
    REQUIRE(table.size() == 2);
    CHECK(table[0] == "dataset,NSK_mean,NSK_std,NSK_failed");
    std::vector<std::string> row = split_csv(table[1]);
    REQUIRE(row.size() == 4);
    CHECK(row[0] == "blobs");
    CHECK(std::strtod(row[1].c_str(), nullptr) == mean);
    CHECK(std::strtod(row[2].c_str(), nullptr) == stddev);
    CHECK(row[3] == "0");
    CHECK(r.out.find("dataset,NSK_mean") != std::string::npos);

    // The bench curve rows for seed 11 are the same numbers the train run
    // wrote to its own curves.csv.
    std::vector<std::string> bench_curves = split_lines(slurp(out / "curves.csv"));
    REQUIRE(bench_curves.size() >= 2);
    CHECK(bench_curves[0] ==
          "dataset,variant,seed,iteration,objective,test_metric,nuclear_norm_w,"
          "feature_frobenius_sq");
    std::vector<std::vector<std::string>> seed11_rows;
    for (std::size_t i = 1; i < bench_curves.size(); ++i) {
        std::vector<std::string> fields = split_csv(bench_curves[i]);
        REQUIRE(fields.size() == 8);
        if (fields[2] == "11") seed11_rows.push_back(fields);
    }
    std::vector<std::string> train_curves =
        split_lines(slurp(scratch.file("seed11") / "curves.csv"));
    REQUIRE(seed11_rows.size() == train_curves.size() - 1);
    for (std::size_t i = 0; i < seed11_rows.size(); ++i) {
        std::vector<std::string> expected = split_csv(train_curves[i + 1]);
        CHECK(seed11_rows[i][0] == "blobs");
        CHECK(seed11_rows[i][1] == "NSK");
        for (int f = 0; f < 5; ++f) CHECK(seed11_rows[i][3 + f] == expected[f]);
    }

    json manifest = parse_file(out / "manifest.json");
    CHECK(manifest.at("command").get<std::string>() == "bench");
    CHECK(manifest.at("seeds") == json::array({11, 12, 13}));

    // --seeds overrides the bench file's seed count.
    fs::path out1 = scratch.file("benchout1");
    REQUIRE(run_cli(scratch, "bench --bench " + scratch.file("bench.json").string() +
                                 " --registry " + scratch.file("registry.json").string() +
                                 " --out " + out1.string() + " --seeds 1")
                .code == 0);
    CHECK(parse_file(out1 / "manifest.json").at("seeds") == json::array({11}));

    // Training by registry name reports the name, not a path.
    fs::path named = scratch.file("named");
    REQUIRE(run_cli(scratch, "train --config " + scratch.file("config.json").string() +
                                 " --dataset blobs --registry " +
                                 scratch.file("registry.json").string() + " --out " +
                                 named.string())
                .code == 0);
    CHECK(parse_file(named / "metrics.json").at("dataset").get<std::string>() == "blobs");

    // Without a registry flag or environment variable, names cannot resolve.
    cli_result no_reg = run_cli(scratch, "bench --bench " +
                                             scratch.file("bench.json").string() +
                                             " --out " + scratch.file("x").string());
    CHECK(no_reg.code == 1);
    CHECK(no_reg.err.find("registry") != std::string::npos);
}

TEST_CASE("bench records equal means for variants that cannot differ") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    write_text(scratch.file("registry.json"),
               json{{"datasets",
                     {{"blobs", {{"path", "blobs.svm"}, {"task", "classification"}}}}}}
                   .dump());
    json config = fast_config();
    config["epochs"] = 0;  // every variant keeps the all-zero weights
    write_text(scratch.file("bench.json"), json{{"datasets", {"blobs"}},
                                                {"variants", {"SK", "NSK"}},
                                                {"seed_count", 2},
                                                {"base_seed", 5},
                                                {"config", config}}
                                               .dump());
    fs::path out = scratch.file("benchout");
    cli_result r = run_cli(scratch, "bench --bench " +
                                        scratch.file("bench.json").string() +
                                        " --registry " +
                                        scratch.file("registry.json").string() +
                                        " --out " + out.string());
    CAPTURE(r.err);
    REQUIRE(r.code == 0);

    std::vector<std::string> table = split_lines(slurp(out / "bench_table.csv"));
    REQUIRE(table.size() == 2);
    CHECK(table[0] == "dataset,SK_mean,SK_std,SK_failed,NSK_mean,NSK_std,NSK_failed");
    std::vector<std::string> row = split_csv(table[1]);
    REQUIRE(row.size() == 7);
    // Identical zero models give identical per-seed accuracies, so the two
    // variants agree on both aggregate columns.
    CHECK(row[1] == row[4]);
    CHECK(row[2] == row[5]);
    CHECK(row[3] == "0");
    CHECK(row[6] == "0");
}

TEST_CASE("bench reports failed cells as nan without aborting the run") {
    temp_dir scratch;
    write_text(scratch.file("lin.svm"), regression_text(20, 3));
    write_text(scratch.file("registry.json"),
               json{{"datasets",
                     {{"lin", {{"path", "lin.svm"}, {"task", "regression"}}}}}}
                   .dump());
    json config{{"variant", "NSK"},       {"task", "regression"},
                {"feature_count", 4},     {"optimizer", "sgd"},
                {"learning_rate", 1e155}, {"epochs", 1},
                {"batch_size", 8},        {"seed", 0}};
    write_text(scratch.file("bench.json"), json{{"datasets", {"lin"}},
                                                {"variants", {"NSK"}},
                                                {"seed_count", 2},
                                                {"config", config}}
                                               .dump());
    fs::path out = scratch.file("benchout");
    cli_result r = run_cli(scratch, "bench --bench " +
                                        scratch.file("bench.json").string() +
                                        " --registry " +
                                        scratch.file("registry.json").string() +
                                        " --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("warning: 2 run(s) failed") != std::string::npos);
    CHECK(r.err.find("diverged") != std::string::npos);

    std::vector<std::string> table = split_lines(slurp(out / "bench_table.csv"));
    REQUIRE(table.size() == 2);
    std::vector<std::string> row = split_csv(table[1]);
    CHECK(row[1] == "nan");
    CHECK(row[2] == "nan");
    CHECK(row[3] == "2");
}

TEST_CASE("curves exports per-run CSVs and an SVG overlay") {
    temp_dir scratch;
    write_text(scratch.file("blobs.svm"), classification_text(15, 15, 1));
    write_text(scratch.file("config.json"), fast_config().dump());
    fs::create_directories(scratch.file("runs"));
    std::string base = "train --config " + scratch.file("config.json").string() +
                       " --data " + scratch.file("blobs.svm").string() + " --out ";
    REQUIRE(run_cli(scratch, base + (scratch.file("runs") / "alpha").string()).code == 0);
    REQUIRE(run_cli(scratch, base + (scratch.file("runs") / "beta").string() + " --seed 9")
                .code == 0);

    fs::path out = scratch.file("curvesout");
    cli_result r = run_cli(scratch, "curves --run " +
                                        (scratch.file("runs") / "alpha").string() + " " +
                                        (scratch.file("runs") / "beta").string() +
                                        " --out " + out.string() + " --svg");
    CAPTURE(r.err);
    REQUIRE(r.code == 0);

    // Round-tripping the trace through trace.json preserves every value, so
    // the exported CSV matches the original run byte for byte.
    CHECK(slurp(out / "alpha_curves.csv") ==
          slurp(scratch.file("runs") / "alpha" / "curves.csv"));
    CHECK(slurp(out / "beta_curves.csv") ==
          slurp(scratch.file("runs") / "beta" / "curves.csv"));

    std::string svg = slurp(out / "curves.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 2);
    CHECK(svg.find(">alpha<") != std::string::npos);
    CHECK(svg.find(">beta<") != std::string::npos);

    json manifest = parse_file(out / "manifest.json");
    CHECK(manifest.at("command").get<std::string>() == "curves");
    CHECK(manifest.at("outputs") ==
          json::array({"alpha_curves.csv", "beta_curves.csv", "curves.svg"}));

    // Missing run directory is a data error.
    CHECK(run_cli(scratch, "curves --run " + scratch.file("nope").string() + " --out " +
                               scratch.file("x").string())
              .code == 2);
}
