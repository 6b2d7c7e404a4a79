#pragma once

#include <map>
#include <string>

#include "bounds.hpp"
#include "data.hpp"
#include "grid.hpp"
#include "model.hpp"

namespace askl {

// Everything a run needs beyond the trainer's own parameters: the task the
// dataset should be read as and whether features are z-scored.
struct run_config {
    train_config train;
    task_kind task = task_kind::classification;
    bool standardize_features = true;
};

// Strict parse of the flat JSON config document (schema_version 1);
// unknown keys are rejected.
run_config config_from_json(const std::string& text);
std::string config_to_json(const run_config& config);

// Model artifact: JSON with a format_version, shapes, W, the frequency
// pack, variant, task, label values, and standardization. Doubles survive
// the round trip bit-exactly.
std::string model_to_json(const trained_model& model);
trained_model model_from_json(const std::string& text);
void save_model(const trained_model& model, const std::string& path);
trained_model load_model(const std::string& path);

// curves.csv body: header iteration,objective,test_metric,nuclear_norm_w,
// feature_frobenius_sq; 17 significant digits; NaN printed as nan.
std::string trace_to_csv(const trace_log& trace);
std::string trace_to_json(const trace_log& trace);
trace_log trace_from_json(const std::string& text);
void save_trace(const trace_log& trace, const std::string& path);
trace_log load_trace(const std::string& path);

std::string bound_report_to_json(const bound_report& report);

std::string grid_table_to_csv(const grid_result& result);

struct registry_entry {
    std::string path;  // absolute, resolved against the registry location
    task_kind task = task_kind::classification;
};
std::map<std::string, registry_entry> load_registry(const std::string& path);

// %.17g, the shortest format guaranteeing binary round-trip for doubles.
std::string format_g17(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

const char* task_name(task_kind task);
task_kind task_from_name(const std::string& name);

}  // namespace askl
