#include "nimo/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <utility>

#include "nimo/baselines.hpp"
#include "nimo/errors.hpp"
#include "nimo/mlp.hpp"
#include "nimo/numerics.hpp"

namespace nimo {

namespace {

std::string fmt(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

double mse_of(const Vector& pred, const Vector& y) {
  return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

double accuracy_of(const Vector& prob, const Vector& y) {
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if ((prob[i] >= 0.5) == (y[i] >= 0.5)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

double bce_of(const Vector& prob, const Vector& y) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double p = std::clamp(prob[i], 1e-12, 1.0 - 1e-12);
    sum -= y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(y.size());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const DivergedError& e) {
    throw DivergedError(context + ": " + e.what());
  } catch (const MaxIterationsError& e) {
    throw MaxIterationsError(context + ": " + e.what());
  } catch (const NotSpdError& e) {
    throw NotSpdError(context + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(context + ": " + e.what());
  }
}

// Selection key: lexicographic, lower is better.  Regression uses the
// validation MSE; classification negates accuracy and breaks ties by the
// validation cross-entropy.
using SelectionKey = std::pair<double, double>;

struct FitOutcome {
  Json selected = Json::object();
  SelectionKey key{std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
  double val_metric = 0.0;
  double test_metric = 0.0;
  double intercept = 0.0;
  std::vector<double> beta_raw;
  std::vector<double> beta_std;
  std::vector<SparsityRecord> sparsity;
  Vector test_pred;
};

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

FitOutcome fit_nimo(const ExperimentConfig& config, const Dataset& data,
                    std::uint64_t rep_seed, const std::string& trace_path) {
  const int d = static_cast<int>(data.cols());
  const OutputRange range = config.task == Task::Regression ? OutputRange::Regression
                                                            : OutputRange::Classification;
  const NetworkConfig net_cfg =
      make_network_config(d, range, config.hidden1, config.hidden2);

  TrainConfig train_cfg = config.train;
  train_cfg.task = config.task;
  train_cfg.seed = rep_seed;
  train_cfg.trace_path.clear();

  const auto train_once = [&](double lambda, double mu) {
    PenaltyState init;
    init.lambda = lambda;
    init.mu_tilde = mu;
    init.delta = config.delta;
    init.lambda_group = config.lambda_group;
    return config.task == Task::Regression
               ? train_regression(data, net_cfg, train_cfg, init)
               : train_classification(data, net_cfg, train_cfg, init);
  };
  const auto key_of = [&](const TrainResult& result) {
    return config.task == Task::Regression
               ? SelectionKey{result.best_val_loss, 0.0}
               : SelectionKey{-result.best_val_accuracy, result.best_val_loss};
  };

  FitOutcome best;
  double best_lambda = 0.0;
  double best_mu = 0.0;
  for (const double lambda : config.lambda_grid) {
    for (const double mu : config.mu_grid) {
      const TrainResult result = train_once(lambda, mu);
      const SelectionKey key = key_of(result);
      if (key < best.key) {
        best.key = key;
        best_lambda = lambda;
        best_mu = mu;
      }
    }
  }

  train_cfg.trace_path = trace_path;
  PenaltyState init;
  init.lambda = best_lambda;
  init.mu_tilde = best_mu;
  init.delta = config.delta;
  init.lambda_group = config.lambda_group;
  const TrainResult result = config.task == Task::Regression
                                 ? train_regression(data, net_cfg, train_cfg, init)
                                 : train_classification(data, net_cfg, train_cfg, init);

  best.selected = Json{{"lambda", best_lambda}, {"mu_tilde", best_mu}};
  best.val_metric = config.task == Task::Regression ? result.best_val_loss
                                                    : result.best_val_accuracy;
  best.intercept = result.model.beta0;
  best.beta_raw = to_std(raw_coefficients(result.model));
  best.beta_std = to_std(result.model.beta);
  best.sparsity = report_sparsity(result.model);
  const SplitView test = view_of(data, SplitLabel::Test);
  best.test_pred = predict(result.model, test.X_raw);
  best.test_metric = config.task == Task::Regression ? mse_of(best.test_pred, test.y)
                                                     : accuracy_of(best.test_pred, test.y);
  return best;
}

FitOutcome fit_linear_baseline(const ExperimentConfig& config, const Dataset& data,
                               MethodId method) {
  const SplitView train = view_of(data, SplitLabel::Train);
  const SplitView val = view_of(data, SplitLabel::Val);
  const SplitView test = view_of(data, SplitLabel::Test);

  FitOutcome best;
  LassoFit best_fit;
  const auto consider = [&](const LassoFit& fit, const Json& selected) {
    const Vector val_pred = (val.X_std * fit.coefficients).array() + fit.intercept;
    SelectionKey key;
    if (config.task == Task::Regression) {
      key = {mse_of(val_pred, val.y), 0.0};
    } else {
      const Vector val_prob = sigmoid(val_pred);
      key = {-accuracy_of(val_prob, val.y), bce_of(val_prob, val.y)};
    }
    if (key < best.key) {
      best.key = key;
      best.selected = selected;
      best_fit = fit;
    }
  };

  if (method == MethodId::Lasso) {
    const double null_penalty = lasso_null_penalty(train.X_std, train.y);
    for (const double fraction : config.lasso_fraction_grid)
      consider(lasso_cd(train.X_std, train.y, fraction * null_penalty),
               Json{{"fraction", fraction}, {"penalty", fraction * null_penalty}});
  } else if (method == MethodId::Ridge) {
    for (const double lambda : config.ridge_grid)
      consider(ridge_fit(train.X_std, train.y, lambda), Json{{"lambda", lambda}});
  } else {
    for (const double l1 : config.logistic_l1_grid)
      consider(logistic_newton(train.X_std, train.y, 0.0, l1), Json{{"l1", l1}});
  }

  best.val_metric = config.task == Task::Regression ? best.key.first : -best.key.first;
  best.intercept = best_fit.intercept;
  best.beta_std = to_std(best_fit.coefficients);
  Vector raw = best_fit.coefficients.cwiseQuotient(data.stats.stddevs);
  best.beta_raw = to_std(raw);
  const Vector test_lin = (test.X_std * best_fit.coefficients).array() + best_fit.intercept;
  if (config.task == Task::Regression) {
    best.test_pred = test_lin;
    best.test_metric = mse_of(best.test_pred, test.y);
  } else {
    best.test_pred = sigmoid(test_lin);
    best.test_metric = accuracy_of(best.test_pred, test.y);
  }
  return best;
}

FitOutcome fit_mlp(const ExperimentConfig& config, const Dataset& data,
                   std::uint64_t rep_seed) {
  const int d = static_cast<int>(data.cols());
  const OutputRange range = config.task == Task::Regression ? OutputRange::Regression
                                                            : OutputRange::Classification;
  TrainConfig train_cfg = config.train;
  train_cfg.task = config.task;
  train_cfg.seed = rep_seed;
  train_cfg.trace_path.clear();
  const MlpBaselineFit fit = fit_mlp_baseline(
      data, make_network_config(d, range, config.hidden1, config.hidden2), train_cfg);

  FitOutcome out;
  const SplitView val = view_of(data, SplitLabel::Val);
  if (config.task == Task::Regression) {
    out.val_metric = fit.best_val_loss;
  } else {
    out.val_metric = val.y.size() > 0
                         ? accuracy_of(mlp_baseline_predict(fit, val.X_raw), val.y)
                         : std::numeric_limits<double>::quiet_NaN();
  }
  const SplitView test = view_of(data, SplitLabel::Test);
  out.test_pred = mlp_baseline_predict(fit, test.X_raw);
  out.test_metric = config.task == Task::Regression ? mse_of(out.test_pred, test.y)
                                                    : accuracy_of(out.test_pred, test.y);
  return out;
}

void write_report_json(const MetricsReport& report, const std::string& path) {
  std::ofstream out = open_output(path);
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "method,metric,mean,stddev,reference,ratio\n";
  for (const MethodSummary& summary : report.methods) {
    out << method_name(summary.method) << ',' << summary.metric_name << ','
        << fmt(summary.mean) << ',' << fmt(summary.stddev) << ','
        << (summary.reference ? fmt(*summary.reference) : "") << ','
        << (summary.ratio ? fmt(*summary.ratio) : "") << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

void write_coefficients_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "method,rep,feature,beta_raw,beta_std,zero_flag,group_norm\n";
  for (const MethodSummary& summary : report.methods) {
    for (std::size_t rep = 0; rep < summary.runs.size(); ++rep) {
      const MethodRun& run = summary.runs[rep];
      for (std::size_t j = 0; j < run.beta_raw.size(); ++j) {
        out << method_name(summary.method) << ',' << rep << ','
            << report.feature_names[j] << ',' << fmt(run.beta_raw[j]) << ','
            << fmt(run.beta_std[j]) << ','
            << (std::abs(run.beta_std[j]) <= kSparsityThreshold ? 1 : 0) << ',';
        if (!run.sparsity.empty()) out << fmt(run.sparsity[j].group_norm);
        out << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path);
}

void write_predictions_csv(const Vector& y, const Vector& pred, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "index,y_true,prediction\n";
  for (Eigen::Index i = 0; i < y.size(); ++i)
    out << i << ',' << fmt(y[i]) << ',' << fmt(pred[i]) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

std::vector<double> parse_grid(const Json& node, const std::string& key) {
  require(node.is_array() && !node.empty(), key + " must be a non-empty array");
  std::vector<double> grid;
  for (const Json& item : node) {
    require(item.is_number(), key + " entries must be numbers");
    grid.push_back(item.get<double>());
  }
  return grid;
}

}  // namespace

std::string method_name(MethodId method) {
  switch (method) {
    case MethodId::Nimo: return "nimo";
    case MethodId::Lasso: return "lasso";
    case MethodId::Logistic: return "logistic";
    case MethodId::Mlp: return "mlp";
    case MethodId::Ridge: return "ridge";
  }
  throw ConfigError("unknown method id");
}

MethodId parse_method(const std::string& name) {
  if (name == "nimo") return MethodId::Nimo;
  if (name == "lasso") return MethodId::Lasso;
  if (name == "logistic") return MethodId::Logistic;
  if (name == "mlp") return MethodId::Mlp;
  if (name == "ridge") return MethodId::Ridge;
  throw ConfigError("unknown method '" + name + "'");
}

ExperimentConfig parse_experiment_config(const Json& doc) {
  require(doc.is_object(), "config must be a JSON object");
  ExperimentConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "setting") {
      require(value.is_string(), "setting must be a string");
      config.setting = parse_setting(value.get<std::string>());
    } else if (key == "csv_path") {
      require(value.is_string(), "csv_path must be a string");
      config.csv_path = value.get<std::string>();
    } else if (key == "target_column") {
      require(value.is_string(), "target_column must be a string");
      config.target_column = value.get<std::string>();
    } else if (key == "task") {
      require(value.is_string(), "task must be a string");
      const std::string name = value.get<std::string>();
      require(name == "regression" || name == "logistic",
              "task must be 'regression' or 'logistic'");
      config.task = name == "regression" ? Task::Regression : Task::Logistic;
    } else if (key == "n_train") {
      config.n_train = value.get<int>();
    } else if (key == "n_val") {
      config.n_val = value.get<int>();
    } else if (key == "n_test") {
      config.n_test = value.get<int>();
    } else if (key == "noise") {
      config.noise = value.get<double>();
    } else if (key == "methods") {
      require(value.is_array(), "methods must be an array");
      for (const Json& item : value) {
        require(item.is_string(), "methods entries must be strings");
        config.methods.push_back(parse_method(item.get<std::string>()));
      }
    } else if (key == "repeats") {
      config.repeats = value.get<int>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "out_dir") {
      require(value.is_string(), "out_dir must be a string");
      config.out_dir = value.get<std::string>();
    } else if (key == "hidden1") {
      config.hidden1 = value.get<int>();
    } else if (key == "hidden2") {
      config.hidden2 = value.get<int>();
    } else if (key == "delta") {
      config.delta = value.get<double>();
    } else if (key == "lambda_group") {
      config.lambda_group = value.get<double>();
    } else if (key == "train") {
      require(value.is_object(), "train must be an object");
      for (const auto& [tkey, tvalue] : value.items()) {
        if (tkey == "max_iters") {
          config.train.max_iters = tvalue.get<int>();
        } else if (tkey == "learning_rate") {
          config.train.learning_rate = tvalue.get<double>();
        } else if (tkey == "patience") {
          config.train.patience = tvalue.get<int>();
        } else if (tkey == "optimizer") {
          require(tvalue.is_string(), "optimizer must be a string");
          const std::string name = tvalue.get<std::string>();
          if (name == "adaptive_moments")
            config.train.optimizer = Optimizer::AdaptiveMoments;
          else if (name == "plain_gd")
            config.train.optimizer = Optimizer::PlainGD;
          else
            throw ConfigError("optimizer must be 'adaptive_moments' or 'plain_gd'");
        } else if (tkey == "network_enabled") {
          config.train.network_enabled = tvalue.get<bool>();
        } else if (tkey == "update_scales") {
          config.train.update_scales = tvalue.get<bool>();
        } else if (tkey == "grad_through_solve") {
          config.train.grad_through_solve = tvalue.get<bool>();
        } else {
          throw ConfigError("unknown train key '" + tkey + "'");
        }
      }
    } else if (key == "lambda_grid") {
      config.lambda_grid = parse_grid(value, "lambda_grid");
    } else if (key == "mu_grid") {
      config.mu_grid = parse_grid(value, "mu_grid");
    } else if (key == "lasso_fraction_grid") {
      config.lasso_fraction_grid = parse_grid(value, "lasso_fraction_grid");
    } else if (key == "ridge_grid") {
      config.ridge_grid = parse_grid(value, "ridge_grid");
    } else if (key == "logistic_l1_grid") {
      config.logistic_l1_grid = parse_grid(value, "logistic_l1_grid");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (config.setting) {
    require(config.csv_path.empty(), "give either setting or csv_path, not both");
    config.task = setting_task(*config.setting);
  } else {
    require(!config.csv_path.empty(), "config needs a setting or a csv_path");
    require(!config.target_column.empty(), "csv_path requires target_column");
  }
  require(!config.methods.empty(), "methods must not be empty");
  require(config.repeats >= 1, "repeats must be at least 1");
  require(config.n_train >= 1, "n_train must be positive");
  require(config.n_val >= 0 && config.n_test >= 0, "split counts must be nonnegative");
  require(!config.out_dir.empty(), "out_dir must be set");
  for (const MethodId method : config.methods) {
    if (config.task == Task::Logistic)
      require(method != MethodId::Lasso && method != MethodId::Ridge,
              "lasso/ridge are regression methods");
    else
      require(method != MethodId::Logistic, "logistic is a classification method");
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_experiment_config(doc);
}

std::vector<SparsityRecord> report_sparsity(const FittedModel& model) {
  const Vector raw = raw_coefficients(model);
  const Vector norms = first_layer_column_norms(model.params, model.cfg);
  std::vector<SparsityRecord> records;
  records.reserve(static_cast<std::size_t>(model.beta.size()));
  for (Eigen::Index j = 0; j < model.beta.size(); ++j) {
    SparsityRecord record;
    record.feature = static_cast<int>(j);
    record.beta_std = model.beta[j];
    record.beta_raw = raw[j];
    record.is_zero = std::abs(model.beta[j]) <= kSparsityThreshold;
    record.group_norm = norms[j];
    records.push_back(record);
  }
  return records;
}

void compare_to_reference(MetricsReport& report, const std::string& table_id,
                          const std::string& tables_path) {
  std::ifstream in(tables_path);
  if (!in) throw IoError("cannot open reference tables " + tables_path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("reference tables are not valid JSON: ") + e.what());
  }
  if (!doc.contains("tables") || !doc["tables"].contains(table_id))
    throw UnknownTableRowError("no reference table '" + table_id + "'");
  const Json& table = doc["tables"][table_id];
  if (!report.dataset_info.contains("setting"))
    throw UnknownTableRowError("dataset has no reference table row");
  const std::string row_key = report.dataset_info["setting"].get<std::string>();
  if (!table["rows"].contains(row_key))
    throw UnknownTableRowError("no reference row for setting '" + row_key + "'");
  const Json& row = table["rows"][row_key];
  for (MethodSummary& summary : report.methods) {
    const std::string column = method_name(summary.method);
    if (!row.contains(column)) continue;
    summary.reference = row[column].get<double>();
    summary.ratio = summary.mean / *summary.reference;
  }
}

Json report_to_json(const MetricsReport& report) {
  Json doc;
  doc["schema_version"] = report.schema_version;
  doc["dataset"] = report.dataset_info;
  doc["feature_names"] = report.feature_names;
  Json methods = Json::object();
  for (const MethodSummary& summary : report.methods) {
    Json entry;
    entry["metric_name"] = summary.metric_name;
    entry["mean"] = summary.mean;
    entry["stddev"] = summary.stddev;
    if (summary.reference) {
      entry["reference"] = *summary.reference;
      entry["ratio"] = *summary.ratio;
    }
    Json runs = Json::array();
    for (const MethodRun& run : summary.runs) {
      Json row;
      row["seed"] = run.seed;
      row["selected"] = run.selected;
      row["val_metric"] = run.val_metric;
      row["test_metric"] = run.test_metric;
      if (!run.beta_raw.empty()) {
        row["intercept"] = run.intercept;
        row["beta_raw"] = run.beta_raw;
      }
      if (!run.sparsity.empty()) {
        Json sparsity = Json::array();
        for (const SparsityRecord& record : run.sparsity) {
          sparsity.push_back(Json{{"feature", report.feature_names[static_cast<std::size_t>(
                                                  record.feature)]},
                                  {"beta_std", record.beta_std},
                                  {"beta_raw", record.beta_raw},
                                  {"zero", record.is_zero},
                                  {"group_norm", record.group_norm}});
        }
        row["sparsity"] = sparsity;
      }
      runs.push_back(row);
    }
    entry["runs"] = runs;
    methods[method_name(summary.method)] = entry;
  }
  doc["methods"] = methods;
  return doc;
}

MetricsReport run(const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create " + config.out_dir + ": " + ec.message());

  Dataset csv_data;
  if (!config.setting)
    csv_data = load_csv(config.csv_path, config.target_column, config.task);

  MetricsReport report;
  report.dataset_info["task"] =
      config.task == Task::Regression ? "regression" : "logistic";
  if (config.setting) {
    report.dataset_info["setting"] = setting_name(*config.setting);
    report.dataset_info["noise"] = config.noise;
    report.dataset_info["n_train"] = config.n_train;
    report.dataset_info["n_val"] = config.n_val;
    report.dataset_info["n_test"] = config.n_test;
  } else {
    report.dataset_info["csv_path"] = config.csv_path;
    report.dataset_info["target_column"] = config.target_column;
    report.dataset_info["rows"] = csv_data.rows();
  }
  report.dataset_info["repeats"] = config.repeats;
  report.dataset_info["seed"] = config.seed;

  for (const MethodId method : config.methods) {
    MethodSummary summary;
    summary.method = method;
    summary.metric_name =
        config.task == Task::Regression ? "test_mse" : "test_accuracy";
    report.methods.push_back(summary);
  }

  for (int rep = 0; rep < config.repeats; ++rep) {
    const std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(rep);
    Dataset data;
    if (config.setting) {
      const int total = config.n_train + config.n_val + config.n_test;
      const Dataset raw =
          generate({*config.setting, total, config.noise, rep_seed});
      data = split(raw, config.n_train, config.n_val, config.n_test, rep_seed);
    } else {
      const int total = static_cast<int>(csv_data.rows());
      const int n_train = static_cast<int>(std::lround(0.6 * total));
      const int n_val = static_cast<int>(std::lround(0.2 * total));
      data = split(csv_data, n_train, n_val, total - n_train - n_val, rep_seed);
    }
    if (rep == 0) report.feature_names = data.feature_names;

    for (MethodSummary& summary : report.methods) {
      const std::string context =
          method_name(summary.method) + " repetition " + std::to_string(rep);
      FitOutcome outcome = with_context(context, [&] {
        switch (summary.method) {
          case MethodId::Nimo:
            return fit_nimo(config, data, rep_seed,
                            config.out_dir + "/trace_nimo_rep" + std::to_string(rep) +
                                ".ldjson");
          case MethodId::Mlp:
            return fit_mlp(config, data, rep_seed);
          default:
            return fit_linear_baseline(config, data, summary.method);
        }
      });

      const SplitView test = view_of(data, SplitLabel::Test);
      write_predictions_csv(test.y, outcome.test_pred,
                            config.out_dir + "/predictions_" +
                                method_name(summary.method) + "_rep" +
                                std::to_string(rep) + ".csv");

      MethodRun run_row;
      run_row.seed = rep_seed;
      run_row.selected = outcome.selected;
      run_row.val_metric = outcome.val_metric;
      run_row.test_metric = outcome.test_metric;
      run_row.intercept = outcome.intercept;
      run_row.beta_raw = outcome.beta_raw;
      run_row.beta_std = outcome.beta_std;
      run_row.sparsity = outcome.sparsity;
      summary.runs.push_back(std::move(run_row));
    }
  }

  for (MethodSummary& summary : report.methods) {
    double sum = 0.0;
    for (const MethodRun& run_row : summary.runs) sum += run_row.test_metric;
    summary.mean = sum / static_cast<double>(summary.runs.size());
    double sq = 0.0;
    for (const MethodRun& run_row : summary.runs) {
      const double delta = run_row.test_metric - summary.mean;
      sq += delta * delta;
    }
    summary.stddev = summary.runs.size() > 1
                         ? std::sqrt(sq / static_cast<double>(summary.runs.size() - 1))
                         : 0.0;
  }

  if (config.setting) {
    const std::string table_id = config.task == Task::Regression
                                     ? "synthetic_regression"
                                     : "synthetic_classification";
    try {
      compare_to_reference(report, table_id, NIMO_REFERENCE_TABLES);
    } catch (const UnknownTableRowError&) {
    } catch (const IoError&) {
    }
  }

  write_report_json(report, config.out_dir + "/report.json");
  write_metrics_csv(report, config.out_dir + "/metrics.csv");
  write_coefficients_csv(report, config.out_dir + "/coefficients.csv");
  return report;
}

}  // namespace nimo
