// Command-line front end: train, eval, grid, bench, curves, bound. All
// machine-learning work happens behind the C API in libaskl; this file owns
// argument handling, file layout, manifests, and table/plot rendering.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "askl.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

enum class fail_domain { config, data };

[[noreturn]] void die(int code, const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(code);
}

int code_for(askl_status status, fail_domain domain) {
    switch (status) {
        case ASKL_OK: return 0;
        case ASKL_ERR_ARGUMENT: return kExitUsage;
        case ASKL_ERR_PARSE:
            return domain == fail_domain::config ? kExitUsage : kExitData;
        case ASKL_ERR_IO: return kExitData;
        case ASKL_ERR_NUMERIC: return kExitNumeric;
        default: return kExitUsage;
    }
}

void check(askl_status status, fail_domain domain) {
    if (status != ASKL_OK) die(code_for(status, domain), askl_last_error());
}

// RAII over the C handles.
struct dataset_handle {
    askl_dataset* p = nullptr;
    dataset_handle() = default;
    explicit dataset_handle(askl_dataset* q) : p(q) {}
    dataset_handle(dataset_handle&& o) noexcept : p(o.p) { o.p = nullptr; }
    dataset_handle& operator=(dataset_handle&& o) noexcept {
        std::swap(p, o.p);
        return *this;
    }
    dataset_handle(const dataset_handle&) = delete;
    ~dataset_handle() { askl_dataset_free(p); }
};

struct config_handle {
    askl_config* p = nullptr;
    ~config_handle() { askl_config_free(p); }
};

struct model_handle {
    askl_model* p = nullptr;
    ~model_handle() { askl_model_free(p); }
};

struct trace_handle {
    askl_trace* p = nullptr;
    ~trace_handle() { askl_trace_free(p); }
};

struct api_string {
    char* p = nullptr;
    ~api_string() { askl_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path, fail_domain domain) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die(code_for(ASKL_ERR_IO, domain), "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(kExitData, "cannot write " + path.string());
    out << content;
    if (!out) die(kExitData, "write failed: " + path.string());
}

json parse_json_or_die(const std::string& text, const std::string& what, fail_domain domain) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        die(domain == fail_domain::config ? kExitUsage : kExitData,
            what + ": malformed JSON");
    return j;
}

std::string registry_path_or_die(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    const char* env = std::getenv("ASKL_DATA_REGISTRY");
    if (env && *env) return env;
    die(kExitUsage,
        "dataset referenced by name but no registry given (set ASKL_DATA_REGISTRY or pass "
        "--registry)");
}

struct data_source {
    std::string path;      // one of path/name is set
    std::string name;
    std::string registry;  // --registry override

    std::string display() const { return name.empty() ? path : name; }
};

dataset_handle load_source(const data_source& src, askl_task task_for_path) {
    askl_dataset* raw = nullptr;
    if (!src.name.empty()) {
        std::string registry = registry_path_or_die(src.registry);
        check(askl_dataset_load_registry(registry.c_str(), src.name.c_str(), &raw),
              fail_domain::data);
    } else {
        check(askl_dataset_load(src.path.c_str(), task_for_path, &raw), fail_domain::data);
    }
    return dataset_handle(raw);
}

// Parses, validates, and normalizes a config file through the library,
// optionally overriding the seed first.
struct loaded_config {
    config_handle handle;
    json normalized;  // every field materialized
};

loaded_config load_config(const std::string& path, std::optional<std::uint64_t> seed) {
    std::string text = read_file(path, fail_domain::config);
    if (seed) {
        json j = parse_json_or_die(text, path, fail_domain::config);
        j["seed"] = *seed;
        text = j.dump();
    }
    loaded_config out;
    check(askl_config_from_json(text.c_str(), &out.handle.p), fail_domain::config);
    api_string normalized;
    check(askl_config_to_json(out.handle.p, &normalized.p), fail_domain::config);
    out.normalized = json::parse(normalized.str());
    return out;
}

askl_task task_from_json(const json& config) {
    return config.at("task").get<std::string>() == "regression" ? ASKL_TASK_REGRESSION
                                                                : ASKL_TASK_CLASSIFICATION;
}

const char* metric_name(askl_task task) {
    return task == ASKL_TASK_CLASSIFICATION ? "accuracy" : "rmse";
}

struct stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const json& config_snapshot, const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& datasets,
                    const std::vector<std::string>& outputs, double wall_seconds) {
    json manifest{{"command", command},
                  {"tool_version", askl_version()},
                  {"config", config_snapshot},
                  {"seeds", seeds},
                  {"datasets", datasets},
                  {"outputs", outputs},
                  {"wall_clock_seconds", wall_seconds}};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

json bound_json_for(const askl_model* model, const askl_dataset* data,
                    std::optional<double> lipschitz, double delta) {
    askl_task task = ASKL_TASK_CLASSIFICATION;
    check(askl_model_info(model, nullptr, nullptr, nullptr, &task, nullptr),
          fail_domain::data);

    api_string report;
    std::string source;
    if (lipschitz) {
        check(askl_bound_report(model, data, *lipschitz, delta, &report.p),
              fail_domain::data);
        source = "user-supplied";
    } else {
        check(askl_bound_report_auto(model, data, delta, &report.p), fail_domain::data);
        source = task == ASKL_TASK_CLASSIFICATION ? "hinge default (2)"
                                                  : "2 * max residual on the given set";
    }
    json j = json::parse(report.str());
    j["lipschitz_source"] = source;
    return j;
}

// ---- train ----

struct train_args {
    std::string config_file;
    data_source src;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> lipschitz;
    double delta = 0.05;
};

int cmd_train(const train_args& args) {
    stopwatch timer;
    loaded_config config = load_config(args.config_file, args.seed);
    askl_task task = task_from_json(config.normalized);
    std::uint64_t seed = config.normalized.at("seed").get<std::uint64_t>();
    bool zscore = config.normalized.at("standardize_features").get<bool>();

    dataset_handle full = load_source(args.src, task);

    dataset_handle train_raw, test_raw;
    check(askl_dataset_split(full.p, 0.2, seed, &train_raw.p, &test_raw.p),
          fail_domain::data);
    dataset_handle train, test;
    check(askl_dataset_standardize(train_raw.p, test_raw.p, zscore ? 1 : 0, &train.p,
                                   &test.p),
          fail_domain::data);

    model_handle model;
    trace_handle trace;
    check(askl_fit(train.p, config.handle.p, test.p, &model.p, &trace.p),
          fail_domain::config);

    double train_metric = 0.0, test_metric = 0.0;
    check(askl_evaluate(model.p, train.p, &train_metric), fail_domain::data);
    check(askl_evaluate(model.p, test.p, &test_metric), fail_domain::data);

    json bound = bound_json_for(model.p, train.p, args.lipschitz, args.delta);

    uint64_t n_train = 0, n_test = 0;
    check(askl_dataset_info(train.p, &n_train, nullptr, nullptr, nullptr),
          fail_domain::data);
    check(askl_dataset_info(test.p, &n_test, nullptr, nullptr, nullptr), fail_domain::data);

    api_string curves;
    check(askl_trace_to_csv(trace.p, &curves.p), fail_domain::data);

    // All computation done; now create the output directory and write.
    fs::path out(args.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) die(kExitData, "cannot create output directory " + out.string());

    check(askl_model_save(model.p, (out / "model.json").string().c_str()),
          fail_domain::data);
    check(askl_trace_save(trace.p, (out / "trace.json").string().c_str()),
          fail_domain::data);
    write_file(out / "curves.csv", curves.str());

    json metrics{{"dataset", args.src.display()},
                 {"variant", config.normalized.at("variant")},
                 {"task", config.normalized.at("task")},
                 {"seed", seed},
                 {"n_train", n_train},
                 {"n_test", n_test},
                 {"metric_name", metric_name(task)},
                 {"train_metric", train_metric},
                 {"test_metric", test_metric}};
    metrics["bound"] = bound;
    write_file(out / "metrics.json", metrics.dump(2) + "\n");

    write_manifest(out, "train", config.normalized, {seed}, {args.src.display()},
                   {"model.json", "trace.json", "curves.csv", "metrics.json"},
                   timer.seconds());

    std::cout << "trained " << config.normalized.at("variant").get<std::string>() << " on "
              << args.src.display() << ": train " << metric_name(task) << " "
              << format_g17(train_metric) << ", test " << metric_name(task) << " "
              << format_g17(test_metric) << "\n"
              << "artifacts in " << out.string() << "\n";
    return 0;
}

// ---- eval ----

struct eval_args {
    std::string model_file;
    data_source src;
    std::string out_dir;
};

int cmd_eval(const eval_args& args) {
    stopwatch timer;
    model_handle model;
    check(askl_model_load(args.model_file.c_str(), &model.p), fail_domain::data);
    askl_task task = ASKL_TASK_CLASSIFICATION;
    check(askl_model_info(model.p, nullptr, nullptr, nullptr, &task, nullptr),
          fail_domain::data);

    dataset_handle raw = load_source(args.src, task);
    dataset_handle prepared;
    check(askl_dataset_apply_model_standardization(model.p, raw.p, &prepared.p),
          fail_domain::data);

    double metric = 0.0;
    check(askl_evaluate(model.p, prepared.p, &metric), fail_domain::data);

    uint64_t n = 0;
    check(askl_dataset_info(prepared.p, &n, nullptr, nullptr, nullptr), fail_domain::data);
    json metrics{{"dataset", args.src.display()},
                 {"model", args.model_file},
                 {"n", n},
                 {"metric_name", metric_name(task)},
                 {"value", metric}};
    std::cout << metrics.dump(2) << "\n";

    if (!args.out_dir.empty()) {
        fs::path out(args.out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) die(kExitData, "cannot create output directory " + out.string());
        write_file(out / "metrics.json", metrics.dump(2) + "\n");
        write_manifest(out, "eval", json(nullptr), {}, {args.src.display()},
                       {"metrics.json"}, timer.seconds());
    }
    return 0;
}

// ---- bound ----

struct bound_args {
    std::string model_file;
    data_source src;
    std::string out_dir;
    std::optional<double> lipschitz;
    double delta = 0.05;
};

int cmd_bound(const bound_args& args) {
    stopwatch timer;
    model_handle model;
    check(askl_model_load(args.model_file.c_str(), &model.p), fail_domain::data);
    askl_task task = ASKL_TASK_CLASSIFICATION;
    check(askl_model_info(model.p, nullptr, nullptr, nullptr, &task, nullptr),
          fail_domain::data);

    dataset_handle raw = load_source(args.src, task);
    dataset_handle prepared;
    check(askl_dataset_apply_model_standardization(model.p, raw.p, &prepared.p),
          fail_domain::data);

    json bound = bound_json_for(model.p, prepared.p, args.lipschitz, args.delta);
    std::cout << bound.dump(2) << "\n";

    if (!args.out_dir.empty()) {
        fs::path out(args.out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) die(kExitData, "cannot create output directory " + out.string());
        write_file(out / "bound.json", bound.dump(2) + "\n");
        write_manifest(out, "bound", json(nullptr), {}, {args.src.display()},
                       {"bound.json"}, timer.seconds());
    }
    return 0;
}

// ---- grid ----

struct grid_args {
    std::string config_file;
    std::string grid_file;
    data_source src;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

int cmd_grid(const grid_args& args) {
    stopwatch timer;
    loaded_config config = load_config(args.config_file, args.seed);
    askl_task task = task_from_json(config.normalized);
    std::string grid_text = read_file(args.grid_file, fail_domain::config);

    dataset_handle data = load_source(args.src, task);

    api_string result_json, table_csv;
    check(askl_grid_search(data.p, config.handle.p, grid_text.c_str(), &result_json.p,
                           &table_csv.p),
          fail_domain::config);
    json result = json::parse(result_json.str());

    fs::path out(args.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) die(kExitData, "cannot create output directory " + out.string());
    write_file(out / "best_config.json", result.at("best").dump(2) + "\n");
    write_file(out / "grid_table.csv", table_csv.str());
    write_manifest(out, "grid",
                   json{{"base", config.normalized},
                        {"grid", parse_json_or_die(grid_text, args.grid_file,
                                                   fail_domain::config)}},
                   {config.normalized.at("seed").get<std::uint64_t>()},
                   {args.src.display()}, {"best_config.json", "grid_table.csv"},
                   timer.seconds());

    std::cout << "best config:\n" << result.at("best").dump(2) << "\n"
              << "table in " << (out / "grid_table.csv").string() << "\n";
    return 0;
}

// ---- curves ----

struct curves_args {
    std::vector<std::string> run_dirs;
    std::string out_dir;
    bool svg = false;
};

std::string svg_overlay(const std::vector<std::pair<std::string, std::vector<std::pair<
                            std::int64_t, double>>>>& series) {
    const double width = 860, height = 520;
    const double left = 70, right = 840, top = 30, bottom = 470;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (const auto& [label, points] : series) {
        for (const auto& [it, value] : points) {
            double x = static_cast<double>(it);
            if (first) {
                x_min = x_max = x;
                y_min = y_max = value;
                first = false;
            }
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, value);
            y_max = std::max(y_max, value);
        }
    }
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;

    auto map_x = [&](double x) {
        return left + (x - x_min) / (x_max - x_min) * (right - left);
    };
    auto map_y = [&](double y) {
        return bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
    };

    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                             "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " "
        << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
        << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << left << "\" y=\"" << bottom + 20
        << "\" font-size=\"12\">" << format_g17(x_min) << "</text>\n"
        << "<text x=\"" << right - 40 << "\" y=\"" << bottom + 20
        << "\" font-size=\"12\">" << format_g17(x_max) << "</text>\n"
        << "<text x=\"5\" y=\"" << bottom << "\" font-size=\"12\">" << format_g17(y_min)
        << "</text>\n"
        << "<text x=\"5\" y=\"" << top + 5 << "\" font-size=\"12\">" << format_g17(y_max)
        << "</text>\n"
        << "<text x=\"" << (left + right) / 2 - 30 << "\" y=\"" << height - 5
        << "\" font-size=\"13\">iteration</text>\n"
        << "<text x=\"12\" y=\"" << (top + bottom) / 2
        << "\" font-size=\"13\" transform=\"rotate(-90 12 " << (top + bottom) / 2
        << ")\">objective</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& [label, points] = series[s];
        const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [it, value] : points)
            svg << map_x(static_cast<double>(it)) << "," << map_y(value) << " ";
        svg << "\"/>\n";
        double ly = top + 16.0 * static_cast<double>(s);
        svg << "<rect x=\"" << right - 150 << "\" y=\"" << ly - 9
            << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n"
            << "<text x=\"" << right - 132 << "\" y=\"" << ly
            << "\" font-size=\"12\">" << label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

int cmd_curves(const curves_args& args) {
    stopwatch timer;
    std::vector<std::pair<std::string, std::vector<std::pair<std::int64_t, double>>>> series;
    std::vector<std::pair<std::string, std::string>> csvs;  // filename, content

    for (const std::string& dir : args.run_dirs) {
        fs::path trace_path = fs::path(dir) / "trace.json";
        trace_handle trace;
        check(askl_trace_load(trace_path.string().c_str(), &trace.p), fail_domain::data);

        uint64_t count = 0;
        check(askl_trace_record_count(trace.p, &count), fail_domain::data);
        if (count == 0) die(kExitData, "empty trace log in " + dir);

        api_string csv;
        check(askl_trace_to_csv(trace.p, &csv.p), fail_domain::data);
        std::string label = fs::path(dir).filename().string();
        if (label.empty()) label = fs::path(dir).parent_path().filename().string();
        csvs.emplace_back(label + "_curves.csv", csv.str());

        std::vector<std::pair<std::int64_t, double>> points;
        for (uint64_t i = 0; i < count; ++i) {
            int64_t iteration = 0;
            double objective = 0;
            check(askl_trace_record(trace.p, i, &iteration, &objective, nullptr, nullptr,
                                    nullptr),
                  fail_domain::data);
            points.emplace_back(iteration, objective);
        }
        series.emplace_back(label, std::move(points));
    }

    fs::path out(args.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) die(kExitData, "cannot create output directory " + out.string());

    std::vector<std::string> outputs;
    for (const auto& [name, content] : csvs) {
        write_file(out / name, content);
        outputs.push_back(name);
    }
    if (args.svg) {
        write_file(out / "curves.svg", svg_overlay(series));
        outputs.push_back("curves.svg");
    }
    write_manifest(out, "curves", json{{"runs", args.run_dirs}}, {}, {}, outputs,
                   timer.seconds());
    std::cout << "wrote " << outputs.size() << " file(s) to " << out.string() << "\n";
    return 0;
}

// ---- bench ----

struct bench_args {
    std::string bench_file;
    std::string out_dir;
    std::string registry;
    std::optional<std::size_t> seeds_override;
    std::size_t threads = 1;
};

struct bench_job {
    std::size_t dataset_index;
    std::size_t seed_index;
    std::size_t variant_index;
    std::uint64_t seed;
    std::string config_json;
};

struct curve_row {
    std::int64_t iteration;
    double objective, test_metric, nuclear_norm_w, feature_frobenius_sq;
};

struct bench_outcome {
    bool failed = true;
    std::string message;
    double metric = 0.0;
    std::vector<curve_row> curve;
};

int cmd_bench(const bench_args& args) {
    stopwatch timer;
    json bench = parse_json_or_die(read_file(args.bench_file, fail_domain::config),
                                   args.bench_file, fail_domain::config);
    if (bench.contains("schema_version") && bench.at("schema_version").get<int>() != 1)
        die(kExitUsage, "bench: unsupported schema_version");

    std::vector<std::string> datasets, variants;
    try {
        datasets = bench.at("datasets").get<std::vector<std::string>>();
        variants = bench.at("variants").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        die(kExitUsage, std::string("bench: ") + e.what());
    }
    if (datasets.empty() || variants.empty())
        die(kExitUsage, "bench: datasets and variants must be nonempty");

    std::size_t seed_count = bench.value("seed_count", std::size_t{5});
    if (args.seeds_override) seed_count = *args.seeds_override;
    std::uint64_t base_seed = bench.value("base_seed", std::uint64_t{0});
    if (seed_count < 1) die(kExitUsage, "bench: seed_count must be >= 1");
    json base_config = bench.value("config", json::object());
    json overrides = bench.value("overrides", json::object());

    std::string registry = registry_path_or_die(args.registry);

    // Preload datasets once; handles are shared read-only by the workers.
    std::vector<dataset_handle> loaded;
    for (const std::string& name : datasets) {
        askl_dataset* raw = nullptr;
        check(askl_dataset_load_registry(registry.c_str(), name.c_str(), &raw),
              fail_domain::data);
        loaded.push_back(dataset_handle(raw));
    }

    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < seed_count; ++i)
        seeds.push_back(base_seed + static_cast<std::uint64_t>(i));

    // Validate every cell's config up front so a typo fails fast.
    std::vector<bench_job> jobs;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        json dataset_config = base_config;
        if (overrides.contains(datasets[di]))
            dataset_config.update(overrides.at(datasets[di]));
        for (std::size_t si = 0; si < seed_count; ++si) {
            for (std::size_t vi = 0; vi < variants.size(); ++vi) {
                json cell = dataset_config;
                cell["variant"] = variants[vi];
                cell["seed"] = seeds[si];
                std::string text = cell.dump();
                config_handle probe;
                check(askl_config_from_json(text.c_str(), &probe.p), fail_domain::config);
                jobs.push_back({di, si, vi, seeds[si], std::move(text)});
            }
        }
    }

    std::vector<bench_outcome> outcomes(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t index = next.fetch_add(1);
            if (index >= jobs.size()) return;
            const bench_job& job = jobs[index];
            bench_outcome& out = outcomes[index];

            config_handle config;
            if (askl_config_from_json(job.config_json.c_str(), &config.p) != ASKL_OK) {
                out.message = askl_last_error();
                continue;
            }
            json cfg = json::parse(job.config_json);
            bool zscore = cfg.value("standardize_features", true);

            dataset_handle train_raw, test_raw, train, test;
            if (askl_dataset_split(loaded[job.dataset_index].p, 0.2, job.seed,
                                   &train_raw.p, &test_raw.p) != ASKL_OK ||
                askl_dataset_standardize(train_raw.p, test_raw.p, zscore ? 1 : 0,
                                         &train.p, &test.p) != ASKL_OK) {
                out.message = askl_last_error();
                continue;
            }

            model_handle model;
            trace_handle trace;
            if (askl_fit(train.p, config.p, test.p, &model.p, &trace.p) != ASKL_OK) {
                out.message = askl_last_error();
                continue;
            }
            double metric = 0.0;
            if (askl_evaluate(model.p, test.p, &metric) != ASKL_OK) {
                out.message = askl_last_error();
                continue;
            }

            uint64_t count = 0;
            askl_trace_record_count(trace.p, &count);
            out.curve.reserve(count);
            for (uint64_t i = 0; i < count; ++i) {
                curve_row row{};
                askl_trace_record(trace.p, i, &row.iteration, &row.objective,
                                  &row.test_metric, &row.nuclear_norm_w,
                                  &row.feature_frobenius_sq);
                out.curve.push_back(row);
            }
            out.metric = metric;
            out.failed = false;
        }
    };

    std::size_t thread_count = std::max<std::size_t>(1, args.threads);
    if (thread_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Assemble outputs in deterministic (dataset, variant) order.
    std::string table = "dataset";
    for (const std::string& v : variants)
        table += "," + v + "_mean," + v + "_std," + v + "_failed";
    table += "\n";
    std::size_t total_failures = 0;

    std::map<std::pair<std::size_t, std::size_t>, std::vector<const bench_outcome*>> cells;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        cells[{jobs[i].dataset_index, jobs[i].variant_index}].push_back(&outcomes[i]);

    for (std::size_t di = 0; di < datasets.size(); ++di) {
        table += datasets[di];
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            const auto& runs = cells[{di, vi}];
            std::vector<double> values;
            std::size_t failed = 0;
            for (const bench_outcome* o : runs) {
                if (o->failed)
                    ++failed;
                else
                    values.push_back(o->metric);
            }
            total_failures += failed;
            double mean = std::numeric_limits<double>::quiet_NaN();
            double stddev = std::numeric_limits<double>::quiet_NaN();
            if (!values.empty()) {
                double sum = 0.0;
                for (double v : values) sum += v;
                mean = sum / static_cast<double>(values.size());
                if (values.size() >= 2) {
                    double ss = 0.0;
                    for (double v : values) ss += (v - mean) * (v - mean);
                    stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
                } else {
                    stddev = 0.0;
                }
            }
            table += "," + format_g17(mean) + "," + format_g17(stddev) + "," +
                     std::to_string(failed);
        }
        table += "\n";
    }

    std::string curves =
        "dataset,variant,seed,iteration,objective,test_metric,nuclear_norm_w,"
        "feature_frobenius_sq\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const bench_job& job = jobs[i];
        for (const curve_row& row : outcomes[i].curve) {
            curves += datasets[job.dataset_index] + "," + variants[job.variant_index] +
                      "," + std::to_string(job.seed) + "," +
                      std::to_string(row.iteration) + "," + format_g17(row.objective) +
                      "," + format_g17(row.test_metric) + "," +
                      format_g17(row.nuclear_norm_w) + "," +
                      format_g17(row.feature_frobenius_sq) + "\n";
        }
    }

    fs::path out(args.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) die(kExitData, "cannot create output directory " + out.string());
    write_file(out / "bench_table.csv", table);
    write_file(out / "curves.csv", curves);
    write_manifest(out, "bench", bench, seeds, datasets,
                   {"bench_table.csv", "curves.csv"}, timer.seconds());

    std::cout << table;
    if (total_failures > 0)
        std::cout << "warning: " << total_failures << " run(s) failed; see bench_table.csv\n";
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (outcomes[i].failed)
            std::cerr << "failed: " << datasets[jobs[i].dataset_index] << "/"
                      << variants[jobs[i].variant_index] << "/seed " << jobs[i].seed
                      << ": " << outcomes[i].message << "\n";
    return 0;
}

void add_source_flags(CLI::App* cmd, data_source& src) {
    auto* data = cmd->add_option("--data", src.path, "dataset file (LIBSVM format)");
    auto* name = cmd->add_option("--dataset", src.name, "dataset name from the registry");
    cmd->add_option("--registry", src.registry,
                    "registry JSON path (default: ASKL_DATA_REGISTRY)");
    data->excludes(name);
    name->excludes(data);
}

void require_source(const data_source& src) {
    if (src.path.empty() && src.name.empty())
        die(kExitUsage, "one of --data or --dataset is required");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral kernel learning trainer and benchmark harness"};
    app.require_subcommand(1);

    train_args train;
    auto* t = app.add_subcommand("train", "train a model and write run artifacts");
    t->add_option("--config", train.config_file, "config JSON file")->required();
    add_source_flags(t, train.src);
    t->add_option("--out", train.out_dir, "output directory")->required();
    std::uint64_t seed_opt = 0;
    auto* seed_flag = t->add_option("--seed", seed_opt, "override the config seed");
    t->add_option("--lipschitz", [&train](const std::vector<std::string>& v) {
        train.lipschitz = std::stod(v.at(0));
        return true;
    }, "Lipschitz constant for the bound report");
    t->add_option("--delta", train.delta, "bound confidence level (default 0.05)");

    eval_args eval;
    auto* e = app.add_subcommand("eval", "evaluate a saved model on a dataset");
    e->add_option("--model", eval.model_file, "model artifact path")->required();
    add_source_flags(e, eval.src);
    e->add_option("--out", eval.out_dir, "optional output directory");

    bound_args bound;
    auto* b = app.add_subcommand("bound", "excess-risk bound report for a saved model");
    b->add_option("--model", bound.model_file, "model artifact path")->required();
    add_source_flags(b, bound.src);
    b->add_option("--out", bound.out_dir, "optional output directory");
    b->add_option("--lipschitz", [&bound](const std::vector<std::string>& v) {
        bound.lipschitz = std::stod(v.at(0));
        return true;
    }, "Lipschitz constant (default: 2 for hinge)");
    b->add_option("--delta", bound.delta, "confidence level (default 0.05)");

    grid_args grid;
    auto* g = app.add_subcommand("grid", "cross-validated grid search");
    g->add_option("--config", grid.config_file, "base config JSON file")->required();
    g->add_option("--grid", grid.grid_file, "grid JSON file")->required();
    add_source_flags(g, grid.src);
    g->add_option("--out", grid.out_dir, "output directory")->required();
    std::uint64_t grid_seed_opt = 0;
    auto* grid_seed_flag = g->add_option("--seed", grid_seed_opt, "override the config seed");

    bench_args bench;
    auto* n = app.add_subcommand("bench", "benchmark variants across datasets and seeds");
    n->add_option("--bench", bench.bench_file, "bench JSON file")->required();
    n->add_option("--out", bench.out_dir, "output directory")->required();
    n->add_option("--registry", bench.registry,
                  "registry JSON path (default: ASKL_DATA_REGISTRY)");
    std::size_t seeds_opt = 0;
    auto* seeds_flag =
        n->add_option("--seeds", seeds_opt, "override the bench file's seed count");
    n->add_option("--threads", bench.threads, "worker threads for bench cells (default 1)");

    curves_args curves;
    auto* c = app.add_subcommand("curves", "export run traces as CSV (and SVG overlay)");
    c->add_option("--run", curves.run_dirs, "run directory containing trace.json")
        ->required()
        ->expected(-1);
    c->add_option("--out", curves.out_dir, "output directory")->required();
    c->add_flag("--svg", curves.svg, "also write a curves.svg overlay");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (t->parsed()) {
            if (*seed_flag) train.seed = seed_opt;
            require_source(train.src);
            return cmd_train(train);
        }
        if (e->parsed()) {
            require_source(eval.src);
            return cmd_eval(eval);
        }
        if (b->parsed()) {
            require_source(bound.src);
            return cmd_bound(bound);
        }
        if (g->parsed()) {
            if (*grid_seed_flag) grid.seed = grid_seed_opt;
            require_source(grid.src);
            return cmd_grid(grid);
        }
        if (n->parsed()) {
            if (*seeds_flag) bench.seeds_override = seeds_opt;
            return cmd_bench(bench);
        }
        if (c->parsed()) return cmd_curves(curves);
    } catch (const std::exception& ex) {
        die(kExitUsage, ex.what());
    }
    die(kExitUsage, "no subcommand given");
}
