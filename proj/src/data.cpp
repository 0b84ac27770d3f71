#include "nimo/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "nimo/errors.hpp"

namespace nimo {

namespace {

double stable_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Odd sigmoid rescaled to (-1, 1): 2σ(t) - 1.
double centered_sigmoid(double t) { return 2.0 * stable_sigmoid(t) - 1.0; }

// Arctangent rescaled to (-1, 1).
double scaled_atan(double t) { return (2.0 / std::numbers::pi) * std::atan(t); }

GroundTruth make_truth(int d, double intercept,
                       std::initializer_list<std::pair<int, double>> entries) {
  GroundTruth truth;
  truth.known = true;
  truth.intercept = intercept;
  truth.beta = Vector::Zero(d);
  for (const auto& [index, value] : entries) truth.beta[index] = value;
  return truth;
}

// Latent target of the five-feature-style sparse setting shared (up to a
// global scale) by the d=50 regression and classification settings.
double wide_sparse_latent(const Vector& x, double scale) {
  const double term1 = -2.0 * x[0] * (1.0 + std::tanh(x[1] * x[3]));
  const double term2 = 2.0 * x[1] * (1.0 + scaled_atan(x[3] - x[4]));
  const double term3 = 3.0 * x[3] * (1.0 + std::tanh(x[1] + std::sin(x[4])));
  const double term4 = -1.0 * x[4] * (1.0 + centered_sigmoid(x[0] * x[3]));
  return scale * (term1 + term2 + term3 + term4);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.emplace_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.emplace_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty())
    throw ParseError(row, col, "'" + cell + "' is not a number");
  if (!std::isfinite(value))
    throw ParseError(row, col, "'" + cell + "' is not finite");
  return value;
}

}  // namespace

int setting_dim(SettingId setting) {
  switch (setting) {
    case SettingId::RegToy: return 3;
    case SettingId::Reg1: return 5;
    case SettingId::Reg2: return 10;
    case SettingId::Reg3: return 50;
    case SettingId::RegVanilla: return 10;
    case SettingId::Cls1: return 3;
    case SettingId::Cls2: return 10;
    case SettingId::Cls3: return 50;
  }
  throw UnknownSettingError("unknown setting id");
}

Task setting_task(SettingId setting) {
  switch (setting) {
    case SettingId::Cls1:
    case SettingId::Cls2:
    case SettingId::Cls3: return Task::Logistic;
    default: return Task::Regression;
  }
}

std::string setting_name(SettingId setting) {
  switch (setting) {
    case SettingId::RegToy: return "toy";
    case SettingId::Reg1: return "reg1";
    case SettingId::Reg2: return "reg2";
    case SettingId::Reg3: return "reg3";
    case SettingId::RegVanilla: return "vanilla";
    case SettingId::Cls1: return "cls1";
    case SettingId::Cls2: return "cls2";
    case SettingId::Cls3: return "cls3";
  }
  throw UnknownSettingError("unknown setting id");
}

SettingId parse_setting(const std::string& name) {
  if (name == "toy") return SettingId::RegToy;
  if (name == "reg1") return SettingId::Reg1;
  if (name == "reg2") return SettingId::Reg2;
  if (name == "reg3") return SettingId::Reg3;
  if (name == "vanilla") return SettingId::RegVanilla;
  if (name == "cls1") return SettingId::Cls1;
  if (name == "cls2") return SettingId::Cls2;
  if (name == "cls3") return SettingId::Cls3;
  throw UnknownSettingError("unknown setting '" + name + "'");
}

double latent_value(SettingId setting, const Vector& x) {
  if (x.size() != setting_dim(setting))
    throw DimensionMismatchError("latent_value: x has wrong dimension");
  switch (setting) {
    case SettingId::RegToy:
      return 3.0 * x[0] * (1.0 + std::tanh(10.0 * x[1])) -
             3.0 * x[1] * (1.0 + std::sin(-2.0 * x[0]));
    case SettingId::Reg1:
      return 3.0 * x[0] * (1.0 + centered_sigmoid(x[1] * x[2])) - 2.0 * x[1] + 2.0 * x[2];
    case SettingId::Reg2:
      return x[0] * (1.0 + std::tanh(x[1] * x[2] + std::sin(x[3]))) +
             2.0 * x[1] * (1.0 + std::sin(2.0 * x[0])) -
             x[2] * (1.0 + scaled_atan(x[1] * x[3]));
    case SettingId::Reg3: return wide_sparse_latent(x, 1.0);
    case SettingId::RegVanilla: {
      double y = 0.0;
      for (int j = 0; j < 10; ++j) y += static_cast<double>(j - 5) * x[j];
      return y;
    }
    case SettingId::Cls1:
      return 2.0 * x[0] * (1.0 + 2.0 * std::tanh(x[1])) -
             2.0 * x[1] * (1.0 + 3.0 * std::sin(2.0 * x[0]) + std::tanh(2.0 * x[0])) + 1.0;
    case SettingId::Cls2:
      return 10.0 * x[0] * (1.0 + 2.0 * std::tanh(2.0 * x[1]) + std::sin(x[3])) +
             20.0 * x[1] * (1.0 + 2.0 * std::cos(2.0 * x[0])) -
             20.0 * x[2] * (1.0 + 2.0 * std::atan(x[1] * x[3])) + 10.0 * x[3] - 10.0;
    case SettingId::Cls3: return wide_sparse_latent(x, 10.0);
  }
  throw UnknownSettingError("unknown setting id");
}

namespace {

GroundTruth truth_of(SettingId setting) {
  switch (setting) {
    case SettingId::RegToy: return make_truth(3, 0.0, {{0, 3.0}, {1, -3.0}});
    case SettingId::Reg1: return make_truth(5, 0.0, {{0, 3.0}, {1, -2.0}, {2, 2.0}});
    case SettingId::Reg2: return make_truth(10, 0.0, {{0, 1.0}, {1, 2.0}, {2, -1.0}});
    case SettingId::Reg3:
      return make_truth(50, 0.0, {{0, -2.0}, {1, 2.0}, {3, 3.0}, {4, -1.0}});
    case SettingId::RegVanilla: {
      GroundTruth truth;
      truth.known = true;
      truth.beta = Vector::LinSpaced(10, -5.0, 4.0);
      return truth;
    }
    case SettingId::Cls1: return make_truth(3, 1.0, {{0, 2.0}, {1, -2.0}});
    case SettingId::Cls2:
      return make_truth(10, -10.0, {{0, 10.0}, {1, 20.0}, {2, -20.0}, {3, 10.0}});
    case SettingId::Cls3:
      return make_truth(50, 0.0, {{0, -20.0}, {1, 20.0}, {3, 30.0}, {4, -10.0}});
  }
  throw UnknownSettingError("unknown setting id");
}

}  // namespace

Dataset generate(const GeneratorSpec& spec) {
  if (spec.n < 1) throw InsufficientRowsError("generate: need at least one row");
  if (spec.noise_sigma < 0.0) throw ConfigError("generate: negative noise scale");
  const int d = setting_dim(spec.setting);

  SeededRng root(spec.seed);
  SeededRng rng_x = root.fork(0);
  SeededRng rng_noise = root.fork(1);
  SeededRng rng_label = root.fork(2);

  Dataset data;
  data.task = setting_task(spec.setting);
  data.X_raw.resize(spec.n, d);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < d; ++j) data.X_raw(i, j) = rng_x.uniform(-2.0, 2.0);

  data.y.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const double latent = latent_value(spec.setting, data.X_raw.row(i).transpose()) +
                          spec.noise_sigma * rng_noise.normal();
    if (data.task == Task::Regression) {
      data.y[i] = latent;
    } else {
      const double pi = stable_sigmoid(latent);
      data.y[i] = rng_label.uniform() < pi ? 1.0 : 0.0;
    }
  }

  auto [X_std, stats] = standardize(data.X_raw);
  data.X_std = std::move(X_std);
  data.stats = std::move(stats);
  data.split.assign(spec.n, SplitLabel::Train);
  data.feature_names.reserve(d);
  for (int j = 1; j <= d; ++j) data.feature_names.push_back("x" + std::to_string(j));
  data.truth = truth_of(spec.setting);
  return data;
}

Dataset split(const Dataset& data, int n_train, int n_val, int n_test, std::uint64_t seed) {
  const auto n = data.rows();
  if (n_train < 1) throw InsufficientRowsError("split: train split must be nonempty");
  if (n_val < 0 || n_test < 0) throw ConfigError("split: negative split size");
  if (n_train + n_val + n_test > n)
    throw InsufficientRowsError("split: requested " +
                                std::to_string(n_train + n_val + n_test) + " rows from " +
                                std::to_string(n));

  SeededRng rng(seed);
  const auto order = rng.permutation(static_cast<std::size_t>(n));

  Dataset out = data;
  out.split.assign(n, SplitLabel::Unused);
  Eigen::Index pos = 0;
  for (int k = 0; k < n_train; ++k) out.split[order[pos++]] = SplitLabel::Train;
  for (int k = 0; k < n_val; ++k) out.split[order[pos++]] = SplitLabel::Val;
  for (int k = 0; k < n_test; ++k) out.split[order[pos++]] = SplitLabel::Test;

  Matrix train_rows(n_train, data.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (out.split[i] == SplitLabel::Train) train_rows.row(r++) = data.X_raw.row(i);
  auto [unused, stats] = standardize(train_rows);
  (void)unused;
  out.stats = std::move(stats);
  out.X_std = apply_standardization(data.X_raw, out.stats);
  return out;
}

Dataset load_csv(const std::string& path, const std::string& target_column, Task task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw InsufficientRowsError("'" + path + "' is empty");
  const auto header = split_fields(line);
  const std::size_t n_cols = header.size();

  std::size_t target_idx = n_cols;
  for (std::size_t j = 0; j < n_cols; ++j)
    if (header[j] == target_column) target_idx = j;
  if (target_idx == n_cols)
    throw MissingColumnError("column '" + target_column + "' not found in '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != n_cols)
      throw ParseError(line_no, n_cols,
                       "row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(n_cols));
    std::vector<double> row(n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) row[j] = parse_cell(fields[j], line_no, j + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InsufficientRowsError("'" + path + "' has no data rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(n_cols - 1);
  Dataset data;
  data.task = task;
  data.X_raw.resize(n, d);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (j == target_idx)
        data.y[i] = rows[i][j];
      else
        data.X_raw(i, col++) = rows[i][j];
    }
  }
  for (std::size_t j = 0; j < n_cols; ++j)
    if (j != target_idx) data.feature_names.push_back(header[j]);
  data.target_name = header[target_idx];

  auto [X_std, stats] = standardize(data.X_raw);
  data.X_std = std::move(X_std);
  data.stats = std::move(stats);
  data.split.assign(n, SplitLabel::Train);
  return data;
}

SplitView view_of(const Dataset& data, SplitLabel label) {
  SplitView view;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    if (data.split[i] == label) view.rows.push_back(i);
  const auto m = static_cast<Eigen::Index>(view.rows.size());
  view.X_raw.resize(m, data.cols());
  view.X_std.resize(m, data.cols());
  view.y.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    view.X_raw.row(k) = data.X_raw.row(view.rows[k]);
    view.X_std.row(k) = data.X_std.row(view.rows[k]);
    view.y[k] = data.y[view.rows[k]];
  }
  return view;
}

Eigen::Index count_of(const Dataset& data, SplitLabel label) {
  Eigen::Index count = 0;
  for (auto entry : data.split)
    if (entry == label) ++count;
  return count;
}

}  // namespace nimo
