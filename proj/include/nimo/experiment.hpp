#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nimo/data.hpp"
#include "nimo/model.hpp"
#include "nimo/optimize.hpp"

namespace nimo {

using Json = nlohmann::ordered_json;

enum class MethodId { Nimo, Lasso, Logistic, Mlp, Ridge };

std::string method_name(MethodId method);
MethodId parse_method(const std::string& name);

/// Config-driven experiment: dataset (synthetic setting or CSV), method list,
/// penalty grids searched per repetition on the validation split, and seeded
/// repetitions.  Loaded from a JSON document; every field has a JSON key of
/// the same name.
struct ExperimentConfig {
  std::optional<SettingId> setting;
  std::string csv_path;
  std::string target_column;
  Task task = Task::Regression;
  int n_train = 200;
  int n_val = 100;
  int n_test = 100;
  double noise = 0.1;

  std::vector<MethodId> methods;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::string out_dir;

  int hidden1 = 32;
  int hidden2 = 16;
  double delta = 1.0;
  double lambda_group = 0.0;
  TrainConfig train;

  std::vector<double> lambda_grid{0.01, 0.1, 1.0, 10.0};
  std::vector<double> mu_grid{0.001, 0.01, 0.1, 1.0};
  std::vector<double> lasso_fraction_grid{0.001, 0.003, 0.01, 0.03, 0.1, 0.3};
  std::vector<double> ridge_grid{0.01, 0.1, 1.0, 10.0, 100.0};
  std::vector<double> logistic_l1_grid{0.01, 0.1, 1.0, 10.0};
};

ExperimentConfig parse_experiment_config(const Json& doc);
ExperimentConfig load_experiment_config(const std::string& path);

/// Per-feature coefficient record: zero flag at the fixed threshold on the
/// standardized coefficient, plus the first-layer group norm of the network.
struct SparsityRecord {
  int feature = 0;
  double beta_std = 0.0;
  double beta_raw = 0.0;
  bool is_zero = true;
  double group_norm = 0.0;
};

constexpr double kSparsityThreshold = 1e-3;

std::vector<SparsityRecord> report_sparsity(const FittedModel& model);

struct MethodRun {
  std::uint64_t seed = 0;
  Json selected;
  double val_metric = 0.0;
  double test_metric = 0.0;
  double intercept = 0.0;
  std::vector<double> beta_raw;
  std::vector<double> beta_std;
  std::vector<SparsityRecord> sparsity;
};

struct MethodSummary {
  MethodId method = MethodId::Nimo;
  std::string metric_name;
  std::vector<MethodRun> runs;
  double mean = 0.0;
  double stddev = 0.0;
  std::optional<double> reference;
  std::optional<double> ratio;
};

struct MetricsReport {
  int schema_version = 1;
  Json dataset_info;
  std::vector<std::string> feature_names;
  std::vector<MethodSummary> methods;
};

/// Annotates each method summary with the matching row of the named reference
/// table (value and achieved/reference ratio).  Rows exist only for the
/// synthetic settings; other datasets raise UnknownTableRowError.
void compare_to_reference(MetricsReport& report, const std::string& table_id,
                          const std::string& tables_path);

/// Runs every method for `repeats` seeded repetitions, selecting penalties on
/// the validation split, and writes report.json, metrics.csv,
/// coefficients.csv, per-repetition prediction dumps, and training traces
/// under out_dir.  The report is byte-reproducible given the config.
MetricsReport run(const ExperimentConfig& config);

Json report_to_json(const MetricsReport& report);

}  // namespace nimo
