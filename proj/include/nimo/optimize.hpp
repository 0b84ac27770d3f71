#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nimo/data.hpp"
#include "nimo/mlp.hpp"
#include "nimo/model.hpp"
#include "nimo/numerics.hpp"

namespace nimo {

/// |beta_j| below this counts as zero in sparsity reports and traces.
inline constexpr double kCoefficientZeroThreshold = 1e-3;

/// Scales are clamped to stay at least this far from zero.
inline constexpr double kScaleFloor = 1e-8;

enum class Optimizer { PlainGD, AdaptiveMoments };

/// Adaptive-ridge state: per-coefficient scales c and the ridge solution gamma
/// in the rescaled basis, with beta = c .* gamma.  The per-feature penalties
/// nu_i of the classical formulation are lambda / c_i^2.
struct PenaltyState {
  Vector c;
  Vector gamma;
  double lambda = 1e-2;
  double mu_tilde = 1e-2;
  double delta = 1.0;
  double lambda_group = 0.0;
};

struct TrainConfig {
  int max_iters = 2000;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  int patience = 50;
  Optimizer optimizer = Optimizer::AdaptiveMoments;
  Task task = Task::Regression;
  bool network_enabled = true;
  bool update_scales = true;
  bool grad_through_solve = false;
  std::string trace_path;
};

struct IrlsState {
  Vector eta_lin;
  Vector pi;
  Vector w_diag;
  Vector z;
};

struct TraceRow {
  int iter = 0;
  double train_loss = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  int beta_nonzeros = 0;
};

struct TrainResult {
  FittedModel model;
  PenaltyState penalty;
  std::vector<TraceRow> trace;
  int best_iter = 0;
  double best_val_loss = std::numeric_limits<double>::quiet_NaN();
  double best_val_accuracy = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
};

/// First-order update rule over a flat parameter vector: plain gradient
/// descent, or adaptive moments (EMA decay 0.9/0.999, bias correction,
/// epsilon 1e-8).
class GradientStepper {
 public:
  GradientStepper(Optimizer kind, double learning_rate, Eigen::Index size);
  void step(Vector& values, const Vector& grads);

 private:
  Optimizer kind_;
  double eta_;
  int t_ = 0;
  Vector m_;
  Vector v_;
};

/// gamma = (D_c B^T B D_c + lambda I)^{-1} D_c B^T y; beta = c .* gamma
/// minimizes ||y - B D_c gamma||^2 + lambda ||gamma||^2 for fixed c.
Vector gamma_closed_form(const Matrix& B, const Vector& c, const Vector& y, double lambda);

/// ||y - B beta_hat||^2 + mu_tilde * sum_i c_i^(2 delta).
double profile_loss_regression(const Matrix& B, const Vector& y, const Vector& beta_hat,
                               const Vector& c, double mu_tilde, double delta);

/// eta = beta0 + B beta; pi = sigmoid(eta) clamped to [1e-12, 1-1e-12];
/// w = pi (1 - pi); z = eta + (y - pi) / w.
IrlsState irls_working_quantities(const Matrix& B, const Vector& beta, double beta0,
                                  const Vector& y);

/// gamma = (Xt^T W Xt + lambda I)^{-1} Xt^T W z with Xt = B D_c.
Vector irls_gamma_update(const Matrix& B, const Vector& c, const IrlsState& state,
                         double lambda);

/// Loss, coefficients, and stop-gradient (optionally through-solve) gradients
/// of one analytic regression update at the given parameters.  The network
/// runs in the mode recorded in `cfg` with noise drawn from `rng`.
struct ProfileStep {
  double loss = 0.0;
  double data_loss = 0.0;
  Vector gamma;
  Vector beta;
  Vector c_grad;
  NetworkGradients net_grads;
};
ProfileStep profile_step_regression(const Matrix& X, const Vector& y_centered,
                                    const NetworkParams& params, const NetworkConfig& cfg,
                                    const PenaltyState& pen, const SeededRng& rng,
                                    bool through_solve);

/// Profile loss with the solve re-run at the perturbed parameters
/// (finite-difference target for the through-solve gradient mode).
double solved_profile_loss(const Matrix& X, const Vector& y_centered,
                           const NetworkParams& params, const NetworkConfig& cfg,
                           const PenaltyState& pen, const SeededRng& rng);

/// Profile loss with gamma frozen at `gamma0` (finite-difference target for
/// the stop-gradient mode: only the explicit appearances of c and u move).
double frozen_profile_loss(const Matrix& X, const Vector& y_centered,
                           const NetworkParams& params, const NetworkConfig& cfg,
                           const Vector& c, const Vector& gamma0, const PenaltyState& pen,
                           const SeededRng& rng);

/// One IRLS refinement (augmented unpenalized intercept column) plus the
/// stop-gradient step quantities for the classification loss
/// sum BCE + mu_tilde * sum c^(2 delta).
struct LogisticStep {
  double loss = 0.0;
  double bce = 0.0;
  double beta0 = 0.0;
  Vector gamma;
  Vector beta;
  Vector c_grad;
  NetworkGradients net_grads;
};
LogisticStep logistic_irls_step(const Matrix& X, const Vector& y,
                                const NetworkParams& params, const NetworkConfig& cfg,
                                const PenaltyState& pen, double beta0_prev,
                                const Vector& beta_prev, const SeededRng& rng);

/// Classification loss with (beta0, gamma) frozen (finite-difference target
/// for the stop-gradient mode).
double frozen_logistic_loss(const Matrix& X, const Vector& y, const NetworkParams& params,
                            const NetworkConfig& cfg, const Vector& c, const Vector& gamma0,
                            double beta0, const PenaltyState& pen, const SeededRng& rng);

TrainResult train_regression(const Dataset& data, const NetworkConfig& net_cfg,
                             const TrainConfig& cfg, const PenaltyState& init);

TrainResult train_classification(const Dataset& data, const NetworkConfig& net_cfg,
                                 const TrainConfig& cfg, const PenaltyState& init);

TrainResult train(const Dataset& data, const NetworkConfig& net_cfg, const TrainConfig& cfg,
                  const PenaltyState& init);

/// Closed-form alternation for the constrained adaptive ridge problem
/// (sum c_i^2 = d, network absent): alternately re-solve beta under
/// per-feature penalties nu_k and reset nu_k = (lambda/d) sum|beta|/|beta_k|.
/// The fixed point solves the Lasso problem ||y - X beta||^2 + P ||beta||_1
/// with P = 2 (lambda/d) sum_k |beta_k|, reported as `lasso_penalty`.
struct AdaptiveRidgeFit {
  Vector beta;
  Vector scales;
  Vector gamma;
  int iterations = 0;
  double lasso_penalty = 0.0;
};
AdaptiveRidgeFit adaptive_ridge_alternation(const Matrix& X, const Vector& y, double lambda,
                                            int max_iters = 1000, double tol = 1e-13);

}  // namespace nimo
