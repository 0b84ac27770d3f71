#pragma once

#include <vector>

#include "nimo/data.hpp"
#include "nimo/mlp.hpp"
#include "nimo/model.hpp"
#include "nimo/numerics.hpp"
#include "nimo/optimize.hpp"

namespace nimo {

/// Dropout probability of the standalone network baseline.
inline constexpr double kMlpBaselineDropout = 0.6;

struct LassoFit {
  double intercept = 0.0;
  Vector coefficients;
  double penalty = 0.0;
  double dual_gap = 0.0;
  bool separable = false;
  int iterations = 0;
};

/// Cyclic coordinate descent for ||y - intercept - X beta||^2 + penalty ||beta||_1
/// (intercept unpenalized; X is expected standardized so intercept = mean(y)).
LassoFit lasso_cd(const Matrix& X, const Vector& y, double penalty,
                  int max_sweeps = 200000, double tol = 1e-8);

/// Warm-started fits in the order given (descending penalties recommended).
std::vector<LassoFit> lasso_path(const Matrix& X, const Vector& y,
                                 const std::vector<double>& penalties);

/// Smallest penalty for which the all-zero model is optimal: 2 ||X^T (y - mean)||_inf.
double lasso_null_penalty(const Matrix& X, const Vector& y);

LassoFit ridge_fit(const Matrix& X, const Vector& y, double lambda);

/// Proximal Newton for sum_i [log(1+exp(eta_i)) - y_i eta_i] + l2 ||beta||^2
/// + l1 ||beta||_1 with an unpenalized intercept.  On separable data with no
/// penalty the fit is returned flagged instead of diverging.
LassoFit logistic_newton(const Matrix& X, const Vector& y, double l2, double l1,
                         int max_iters = 500, double tol = 1e-8);

/// Standalone network of the same shape as the correction network (tanh then
/// sine hidden layers) minus the positional encoding and output squashing,
/// trained with inverted dropout on the first hidden activation.
struct MlpBaselineFit {
  NetworkParams params;
  NetworkConfig cfg;
  StandardizationStats stats;
  Task task = Task::Regression;
  int best_iter = 0;
  double best_val_loss = std::numeric_limits<double>::quiet_NaN();
};

MlpBaselineFit fit_mlp_baseline(const Dataset& data, const NetworkConfig& net_cfg,
                                const TrainConfig& cfg);

/// Regression: predicted targets.  Logistic: predicted probabilities.
Vector mlp_baseline_predict(const MlpBaselineFit& fit, const Matrix& X_raw);

}  // namespace nimo
