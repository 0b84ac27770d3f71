#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nimo/model.hpp"
#include "nimo/numerics.hpp"

namespace nimo {

enum class SettingId { RegToy, Reg1, Reg2, Reg3, RegVanilla, Cls1, Cls2, Cls3 };

enum class SplitLabel { Train, Val, Test, Unused };

struct GeneratorSpec {
  SettingId setting = SettingId::RegToy;
  int n = 400;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

/// Generating coefficients of a synthetic setting: y ≈ intercept + Σ βⱼxⱼ·(1+…).
struct GroundTruth {
  bool known = false;
  double intercept = 0.0;
  Vector beta;
};

struct Dataset {
  Matrix X_raw;
  Matrix X_std;
  Vector y;
  Task task = Task::Regression;
  std::vector<SplitLabel> split;
  StandardizationStats stats;
  std::vector<std::string> feature_names;
  std::string target_name = "y";
  GroundTruth truth;

  Eigen::Index rows() const { return X_raw.rows(); }
  Eigen::Index cols() const { return X_raw.cols(); }
};

/// One split of a dataset, materialized as dense copies.
struct SplitView {
  Matrix X_raw;
  Matrix X_std;
  Vector y;
  std::vector<Eigen::Index> rows;
};

int setting_dim(SettingId setting);
Task setting_task(SettingId setting);
std::string setting_name(SettingId setting);
SettingId parse_setting(const std::string& name);

/// Noiseless target of a synthetic setting at a single point (pre-link for
/// classification settings).
double latent_value(SettingId setting, const Vector& x);

Dataset generate(const GeneratorSpec& spec);

/// Randomly assigns rows to train/val/test (leftover rows become Unused) and
/// recomputes standardization from the train rows only.
Dataset split(const Dataset& data, int n_train, int n_val, int n_test, std::uint64_t seed);

Dataset load_csv(const std::string& path, const std::string& target_column, Task task);

SplitView view_of(const Dataset& data, SplitLabel label);
Eigen::Index count_of(const Dataset& data, SplitLabel label);

}  // namespace nimo
