#pragma once

#include <json.hpp>
#include <string>

#include "nimo/mlp.hpp"
#include "nimo/numerics.hpp"

namespace nimo {

enum class Task { Regression, Logistic };

/// Linear model whose coefficients are modulated by the correction network:
/// f(x) = beta0 + sum_j x_j * beta_j * (1 + g(x_{-j})).
/// `beta` lives in standardized feature space; `stats` maps raw inputs there.
struct FittedModel {
  double beta0 = 0.0;
  Vector beta;
  NetworkParams params;
  NetworkConfig cfg;  // stored with train_mode off
  StandardizationStats stats;
  Task task = Task::Regression;
};

/// B = X + X .* G evaluated at the given parameters.
Matrix design_matrix(const NetworkParams& params, const NetworkConfig& cfg,
                     const Matrix& X, const SeededRng& rng);

/// Numerically stable logistic function.
double sigmoid(double z);
Vector sigmoid(const Vector& z);

/// beta0 + B_u beta on standardized inputs (noise off).  For the Logistic
/// task this is the linear predictor eta, before the sigmoid.
Vector linear_predictor(const FittedModel& model, const Matrix& X_raw);

/// Regression: beta0 + B_u beta.  Logistic: sigmoid of the same.
Vector predict(const FittedModel& model, const Matrix& X_raw);

/// Per-sample effective coefficients beta_j * (1 + g(x_{-j})); row-dotting
/// with the standardized inputs plus beta0 reproduces the linear predictor.
Matrix effective_coefficients(const FittedModel& model, const Matrix& X_raw);

/// Coefficients mapped back to raw feature units (beta_j / stddev_j).
Vector raw_coefficients(const FittedModel& model);

nlohmann::ordered_json params_to_json(const NetworkParams& params, const NetworkConfig& cfg);
std::pair<NetworkParams, NetworkConfig> params_from_json(const nlohmann::json& doc);

nlohmann::ordered_json model_to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& doc);

void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace nimo
