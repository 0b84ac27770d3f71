#include "nimo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <tuple>
#include <utility>

#include "nimo/errors.hpp"

namespace nimo {

namespace {

void validate_penalty(const PenaltyState& pen, Eigen::Index d) {
  if (pen.lambda <= 0.0) throw ConfigError("lambda must be positive");
  if (pen.mu_tilde < 0.0) throw ConfigError("mu_tilde must be nonnegative");
  if (pen.delta <= 0.0 || pen.delta > 1.0) throw ConfigError("delta must be in (0, 1]");
  if (pen.lambda_group < 0.0) throw ConfigError("lambda_group must be nonnegative");
  if (pen.c.size() != 0 && pen.c.size() != d)
    throw DimensionMismatchError("scale vector has wrong dimension");
  for (Eigen::Index i = 0; i < pen.c.size(); ++i)
    if (!(pen.c[i] > 0.0)) throw ConfigError("scales must be positive");
}

double scale_penalty(const Vector& c, double mu_tilde, double delta) {
  double sum = 0.0;
  if (delta == 1.0) {
    for (Eigen::Index i = 0; i < c.size(); ++i) sum += c[i] * c[i];
  } else {
    for (Eigen::Index i = 0; i < c.size(); ++i) sum += std::pow(c[i], 2.0 * delta);
  }
  return mu_tilde * sum;
}

Vector scale_penalty_grad(const Vector& c, double mu_tilde, double delta) {
  if (delta == 1.0) return 2.0 * mu_tilde * c;
  return (2.0 * delta * mu_tilde) * c.array().pow(2.0 * delta - 1.0).matrix();
}

double clamp_probability(double p) {
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

// Gradients of the data term of the regression profile loss at a fixed design
// matrix B, with gamma detached (and optionally the through-solve extras).
struct LinearStepParts {
  double data_loss = 0.0;
  Vector gamma;
  Vector beta;
  Vector c_data_grad;
  Matrix b_grad;  // empty unless requested
};

LinearStepParts linear_profile_parts(const Matrix& B, const Vector& y, const Vector& c,
                                     double lambda, bool through_solve, bool want_b_grad) {
  LinearStepParts parts;
  parts.gamma = gamma_closed_form(B, c, y, lambda);
  parts.beta = c.cwiseProduct(parts.gamma);
  const Vector r = y - B * parts.beta;
  parts.data_loss = r.squaredNorm();
  const Vector s = B.transpose() * r;
  parts.c_data_grad = -2.0 * parts.gamma.cwiseProduct(s);
  if (want_b_grad) parts.b_grad = -2.0 * r * parts.beta.transpose();

  if (through_solve) {
    const Matrix S = B.transpose() * B;
    Matrix M = S.cwiseProduct(c * c.transpose());
    M.diagonal().array() += lambda;
    const Vector g_hat = -2.0 * c.cwiseProduct(s);
    const Vector a = solve_spd(M, g_hat);
    const Vector a_tilde = c.cwiseProduct(a);
    const Vector q = B.transpose() * y;
    parts.c_data_grad += a.cwiseProduct(q) - a.cwiseProduct(S * parts.beta) -
                         parts.gamma.cwiseProduct(S * a_tilde);
    if (want_b_grad)
      parts.b_grad += r * a_tilde.transpose() - (B * a_tilde) * parts.beta.transpose();
  }
  return parts;
}

// One augmented weighted ridge solve with an unpenalized intercept column.
std::pair<double, Vector> irls_solve_with_intercept(const Matrix& B, const Vector& c,
                                                    const IrlsState& state, double lambda) {
  const Eigen::Index n = B.rows();
  const Eigen::Index d = B.cols();
  Matrix Xt(n, d + 1);
  Xt.col(0).setOnes();
  Xt.rightCols(d) = B * c.asDiagonal();
  const Matrix XtW = Xt.transpose() * state.w_diag.asDiagonal();
  Matrix A = XtW * Xt;
  for (Eigen::Index j = 1; j <= d; ++j) A(j, j) += lambda;
  const Vector b = XtW * state.z;
  const Vector solution = solve_spd(A, b);
  return {solution[0], solution.tail(d)};
}

struct LogisticStepParts {
  double bce = 0.0;
  double beta0 = 0.0;
  Vector gamma;
  Vector beta;
  Vector c_data_grad;
  Matrix b_grad;
};

LogisticStepParts logistic_linear_parts(const Matrix& B, const Vector& y, const Vector& c,
                                        double lambda, double beta0_prev,
                                        const Vector& beta_prev, bool want_b_grad) {
  LogisticStepParts parts;
  const IrlsState state = irls_working_quantities(B, beta_prev, beta0_prev, y);
  std::tie(parts.beta0, parts.gamma) = irls_solve_with_intercept(B, c, state, lambda);
  parts.beta = c.cwiseProduct(parts.gamma);

  const Vector eta = (B * parts.beta).array() + parts.beta0;
  Vector pi(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) pi[i] = clamp_probability(sigmoid(eta[i]));
  parts.bce = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    parts.bce -= y[i] * std::log(pi[i]) + (1.0 - y[i]) * std::log(1.0 - pi[i]);

  const Vector resid = pi - y;
  parts.c_data_grad = parts.gamma.cwiseProduct(B.transpose() * resid);
  if (want_b_grad) parts.b_grad = resid * parts.beta.transpose();
  return parts;
}

Eigen::Index flat_param_count(const NetworkConfig& cfg) {
  const Eigen::Index in = cfg.total_inputs();
  return cfg.hidden1 * in + cfg.hidden1 + cfg.hidden2 * cfg.hidden1 + cfg.hidden2 +
         cfg.hidden2 + 1;
}

Vector pack_params(const NetworkParams& p) {
  Vector flat(p.W1.size() + p.b1.size() + p.W2.size() + p.b2.size() + p.w3.size() + 1);
  Eigen::Index pos = 0;
  auto put = [&](const double* data, Eigen::Index count) {
    flat.segment(pos, count) = Eigen::Map<const Vector>(data, count);
    pos += count;
  };
  put(p.W1.data(), p.W1.size());
  put(p.b1.data(), p.b1.size());
  put(p.W2.data(), p.W2.size());
  put(p.b2.data(), p.b2.size());
  put(p.w3.data(), p.w3.size());
  flat[pos] = p.b3;
  return flat;
}

NetworkParams unpack_params(const Vector& flat, const NetworkConfig& cfg) {
  NetworkParams p = zero_params(cfg);
  Eigen::Index pos = 0;
  auto take = [&](double* data, Eigen::Index count) {
    Eigen::Map<Vector>(data, count) = flat.segment(pos, count);
    pos += count;
  };
  take(p.W1.data(), p.W1.size());
  take(p.b1.data(), p.b1.size());
  take(p.W2.data(), p.W2.size());
  take(p.b2.data(), p.b2.size());
  take(p.w3.data(), p.w3.size());
  p.b3 = flat[pos];
  return p;
}

void add_group_terms(const NetworkParams& params, const NetworkConfig& cfg,
                     double lambda_group, double& loss, NetworkGradients& grads) {
  if (lambda_group <= 0.0) return;
  auto [value, g] = group_penalty(params, cfg, lambda_group);
  loss += value;
  grads.W1 += g.W1;
}

int nonzero_count(const Vector& beta) {
  int count = 0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) >= kCoefficientZeroThreshold) ++count;
  return count;
}

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) {
    if (path.empty()) return;
    out_.emplace(path, std::ios::trunc);
    if (!*out_) throw IoError("cannot open trace file '" + path + "'");
  }

  void write(const TraceRow& row) {
    if (!out_) return;
    nlohmann::ordered_json line;
    line["iter"] = row.iter;
    line["train_loss"] = row.train_loss;
    if (std::isnan(row.val_loss))
      line["val_loss"] = nullptr;
    else
      line["val_loss"] = row.val_loss;
    line["nonzeros"] = row.beta_nonzeros;
    *out_ << line.dump() << '\n';
  }

 private:
  std::optional<std::ofstream> out_;
};

struct TrainingViews {
  Matrix X_train;
  Vector y_train;
  Matrix X_val;
  Vector y_val;
};

TrainingViews gather_views(const Dataset& data) {
  TrainingViews views;
  const SplitView train = view_of(data, SplitLabel::Train);
  if (train.y.size() == 0) throw InsufficientRowsError("training split is empty");
  views.X_train = train.X_std;
  views.y_train = train.y;
  const SplitView val = view_of(data, SplitLabel::Val);
  views.X_val = val.X_std;
  views.y_val = val.y;
  return views;
}

void check_network_config(const NetworkConfig& net_cfg, Eigen::Index d) {
  if (net_cfg.input_dim != d)
    throw ConfigError("network input dimension does not match the data");
  if (net_cfg.enc_bits != encode_bits(static_cast<int>(d)))
    throw ConfigError("network encoding width does not match the data");
}

}  // namespace

GradientStepper::GradientStepper(Optimizer kind, double learning_rate, Eigen::Index size)
    : kind_(kind), eta_(learning_rate) {
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (kind_ == Optimizer::AdaptiveMoments) {
    m_ = Vector::Zero(size);
    v_ = Vector::Zero(size);
  }
}

void GradientStepper::step(Vector& values, const Vector& grads) {
  if (values.size() != grads.size() ||
      (kind_ == Optimizer::AdaptiveMoments && values.size() != m_.size()))
    throw DimensionMismatchError("optimizer step shape mismatch");
  if (kind_ == Optimizer::PlainGD) {
    values -= eta_ * grads;
    return;
  }
  ++t_;
  m_ = 0.9 * m_ + 0.1 * grads;
  v_ = 0.999 * v_ + 0.001 * grads.cwiseProduct(grads);
  const double m_correction = 1.0 - std::pow(0.9, t_);
  const double v_correction = 1.0 - std::pow(0.999, t_);
  const Vector m_hat = m_ / m_correction;
  const Vector v_hat = v_ / v_correction;
  values -= eta_ * (m_hat.array() / (v_hat.array().sqrt() + 1e-8)).matrix();
}

Vector gamma_closed_form(const Matrix& B, const Vector& c, const Vector& y, double lambda) {
  if (B.rows() != y.size() || B.cols() != c.size())
    throw DimensionMismatchError("gamma_closed_form: shape mismatch");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  Matrix A = (B.transpose() * B).cwiseProduct(c * c.transpose());
  A.diagonal().array() += lambda;
  const Vector b = c.cwiseProduct(B.transpose() * y);
  return solve_spd(A, b);
}

double profile_loss_regression(const Matrix& B, const Vector& y, const Vector& beta_hat,
                               const Vector& c, double mu_tilde, double delta) {
  if (B.rows() != y.size() || B.cols() != beta_hat.size() || B.cols() != c.size())
    throw DimensionMismatchError("profile_loss_regression: shape mismatch");
  return (y - B * beta_hat).squaredNorm() + scale_penalty(c, mu_tilde, delta);
}

IrlsState irls_working_quantities(const Matrix& B, const Vector& beta, double beta0,
                                  const Vector& y) {
  if (B.cols() != beta.size() || B.rows() != y.size())
    throw DimensionMismatchError("irls_working_quantities: shape mismatch");
  IrlsState state;
  state.eta_lin = (B * beta).array() + beta0;
  state.pi.resize(state.eta_lin.size());
  for (Eigen::Index i = 0; i < state.pi.size(); ++i)
    state.pi[i] = clamp_probability(sigmoid(state.eta_lin[i]));
  state.w_diag = state.pi.array() * (1.0 - state.pi.array());
  state.z = state.eta_lin + ((y - state.pi).array() / state.w_diag.array()).matrix();
  return state;
}

Vector irls_gamma_update(const Matrix& B, const Vector& c, const IrlsState& state,
                         double lambda) {
  if (B.cols() != c.size() || B.rows() != state.z.size())
    throw DimensionMismatchError("irls_gamma_update: shape mismatch");
  const Matrix Xt = B * c.asDiagonal();
  const Matrix XtW = Xt.transpose() * state.w_diag.asDiagonal();
  Matrix A = XtW * Xt;
  A.diagonal().array() += lambda;
  return solve_spd(A, XtW * state.z);
}

ProfileStep profile_step_regression(const Matrix& X, const Vector& y_centered,
                                    const NetworkParams& params, const NetworkConfig& cfg,
                                    const PenaltyState& pen, const SeededRng& rng,
                                    bool through_solve) {
  auto [G, cache] = forward_matrix(params, cfg, X, rng);
  const Matrix B = X + X.cwiseProduct(G);
  LinearStepParts parts =
      linear_profile_parts(B, y_centered, pen.c, pen.lambda, through_solve, true);

  ProfileStep step;
  step.data_loss = parts.data_loss;
  step.gamma = std::move(parts.gamma);
  step.beta = std::move(parts.beta);
  step.c_grad = parts.c_data_grad + scale_penalty_grad(pen.c, pen.mu_tilde, pen.delta);
  step.net_grads = backward(cache, parts.b_grad.cwiseProduct(X));
  step.loss = parts.data_loss + scale_penalty(pen.c, pen.mu_tilde, pen.delta);
  add_group_terms(params, cfg, pen.lambda_group, step.loss, step.net_grads);
  return step;
}

double solved_profile_loss(const Matrix& X, const Vector& y_centered,
                           const NetworkParams& params, const NetworkConfig& cfg,
                           const PenaltyState& pen, const SeededRng& rng) {
  auto [G, cache] = forward_matrix(params, cfg, X, rng);
  (void)cache;
  const Matrix B = X + X.cwiseProduct(G);
  const Vector gamma = gamma_closed_form(B, pen.c, y_centered, pen.lambda);
  const Vector beta = pen.c.cwiseProduct(gamma);
  double loss = profile_loss_regression(B, y_centered, beta, pen.c, pen.mu_tilde, pen.delta);
  if (pen.lambda_group > 0.0)
    loss += group_penalty(params, cfg, pen.lambda_group).first;
  return loss;
}

double frozen_profile_loss(const Matrix& X, const Vector& y_centered,
                           const NetworkParams& params, const NetworkConfig& cfg,
                           const Vector& c, const Vector& gamma0, const PenaltyState& pen,
                           const SeededRng& rng) {
  auto [G, cache] = forward_matrix(params, cfg, X, rng);
  (void)cache;
  const Matrix B = X + X.cwiseProduct(G);
  const Vector beta = c.cwiseProduct(gamma0);
  double loss = (y_centered - B * beta).squaredNorm() +
                scale_penalty(c, pen.mu_tilde, pen.delta);
  if (pen.lambda_group > 0.0)
    loss += group_penalty(params, cfg, pen.lambda_group).first;
  return loss;
}

LogisticStep logistic_irls_step(const Matrix& X, const Vector& y,
                                const NetworkParams& params, const NetworkConfig& cfg,
                                const PenaltyState& pen, double beta0_prev,
                                const Vector& beta_prev, const SeededRng& rng) {
  auto [G, cache] = forward_matrix(params, cfg, X, rng);
  const Matrix B = X + X.cwiseProduct(G);
  LogisticStepParts parts =
      logistic_linear_parts(B, y, pen.c, pen.lambda, beta0_prev, beta_prev, true);

  LogisticStep step;
  step.bce = parts.bce;
  step.beta0 = parts.beta0;
  step.gamma = std::move(parts.gamma);
  step.beta = std::move(parts.beta);
  step.c_grad = parts.c_data_grad + scale_penalty_grad(pen.c, pen.mu_tilde, pen.delta);
  step.net_grads = backward(cache, parts.b_grad.cwiseProduct(X));
  step.loss = parts.bce + scale_penalty(pen.c, pen.mu_tilde, pen.delta);
  add_group_terms(params, cfg, pen.lambda_group, step.loss, step.net_grads);
  return step;
}

double frozen_logistic_loss(const Matrix& X, const Vector& y, const NetworkParams& params,
                            const NetworkConfig& cfg, const Vector& c, const Vector& gamma0,
                            double beta0, const PenaltyState& pen, const SeededRng& rng) {
  auto [G, cache] = forward_matrix(params, cfg, X, rng);
  (void)cache;
  const Matrix B = X + X.cwiseProduct(G);
  const Vector eta = (B * c.cwiseProduct(gamma0)).array() + beta0;
  double bce = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double pi = clamp_probability(sigmoid(eta[i]));
    bce -= y[i] * std::log(pi) + (1.0 - y[i]) * std::log(1.0 - pi);
  }
  double loss = bce + scale_penalty(c, pen.mu_tilde, pen.delta);
  if (pen.lambda_group > 0.0)
    loss += group_penalty(params, cfg, pen.lambda_group).first;
  return loss;
}

namespace {

struct Snapshot {
  NetworkParams params;
  Vector c;
  Vector gamma;
  Vector beta;
  double beta0 = 0.0;
  int iter = 0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double val_accuracy = std::numeric_limits<double>::quiet_NaN();
};

FittedModel assemble_model(const Snapshot& snap, const NetworkConfig& net_cfg,
                           const Dataset& data, Task task) {
  FittedModel model;
  model.beta0 = snap.beta0;
  model.beta = snap.beta;
  model.params = snap.params;
  model.cfg = net_cfg;
  model.cfg.train_mode = false;
  model.stats = data.stats;
  model.task = task;
  return model;
}

}  // namespace

TrainResult train_regression(const Dataset& data, const NetworkConfig& net_cfg,
                             const TrainConfig& cfg, const PenaltyState& init) {
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be at least 1");
  TrainingViews views = gather_views(data);
  const Eigen::Index d = views.X_train.cols();
  check_network_config(net_cfg, d);
  validate_penalty(init, d);

  const double beta0 = views.y_train.mean();
  const Vector y_c = views.y_train.array() - beta0;
  const bool has_val = views.y_val.size() > 0;

  PenaltyState pen = init;
  if (pen.c.size() == 0) pen.c = Vector::Ones(d);

  NetworkConfig cfg_train = net_cfg;
  cfg_train.train_mode = true;
  NetworkConfig cfg_eval = net_cfg;
  cfg_eval.train_mode = false;

  SeededRng root(cfg.seed);
  SeededRng init_rng = root.fork(1);
  NetworkParams params =
      cfg.network_enabled ? init_params(net_cfg, init_rng) : zero_params(net_cfg);

  GradientStepper net_stepper(cfg.optimizer, cfg.learning_rate, flat_param_count(net_cfg));
  GradientStepper c_stepper(cfg.optimizer, cfg.learning_rate, d);
  TraceWriter trace_writer(cfg.trace_path);

  TrainResult result;
  Snapshot best;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const SeededRng rng_t = root.fork(10000 + static_cast<std::uint64_t>(t));

    double train_loss;
    Vector c_grad;
    if (cfg.network_enabled) {
      ProfileStep step = profile_step_regression(views.X_train, y_c, params, cfg_train, pen,
                                                 rng_t, cfg.grad_through_solve);
      train_loss = step.loss;
      c_grad = std::move(step.c_grad);
      if (!std::isfinite(train_loss))
        throw DivergedError("training loss became non-finite at iteration " +
                            std::to_string(t));
      Vector flat = pack_params(params);
      net_stepper.step(flat, pack_params(step.net_grads));
      if (!flat.allFinite())
        throw DivergedError("network parameters diverged at iteration " + std::to_string(t));
      params = unpack_params(flat, net_cfg);
    } else {
      LinearStepParts parts = linear_profile_parts(views.X_train, y_c, pen.c, pen.lambda,
                                                   cfg.grad_through_solve, false);
      train_loss =
          parts.data_loss + scale_penalty(pen.c, pen.mu_tilde, pen.delta);
      c_grad = parts.c_data_grad + scale_penalty_grad(pen.c, pen.mu_tilde, pen.delta);
      if (!std::isfinite(train_loss))
        throw DivergedError("training loss became non-finite at iteration " +
                            std::to_string(t));
    }
    if (cfg.update_scales) {
      c_stepper.step(pen.c, c_grad);
      pen.c = pen.c.cwiseMax(kScaleFloor);
      if (!pen.c.allFinite() ||
          !std::isfinite(scale_penalty(pen.c, pen.mu_tilde, pen.delta)))
        throw DivergedError("scales diverged at iteration " + std::to_string(t));
    }

    const Matrix B_eval = cfg.network_enabled
                              ? design_matrix(params, cfg_eval, views.X_train, root)
                              : views.X_train;
    const Vector gamma_eval = gamma_closed_form(B_eval, pen.c, y_c, pen.lambda);
    const Vector beta_eval = pen.c.cwiseProduct(gamma_eval);

    TraceRow row;
    row.iter = t;
    row.train_loss = train_loss;
    row.beta_nonzeros = nonzero_count(beta_eval);
    if (has_val) {
      const Matrix B_val = cfg.network_enabled
                               ? design_matrix(params, cfg_eval, views.X_val, root)
                               : views.X_val;
      const Vector resid = views.y_val.array() - beta0 - (B_val * beta_eval).array();
      row.val_loss = resid.squaredNorm() / static_cast<double>(resid.size());
      if (!std::isfinite(row.val_loss))
        throw DivergedError("validation loss became non-finite at iteration " +
                            std::to_string(t));
    }
    result.trace.push_back(row);
    trace_writer.write(row);

    const bool improved = has_val ? row.val_loss < best_val - 1e-12 : true;
    if (improved || t == 1) {
      best_val = has_val ? row.val_loss : train_loss;
      best = Snapshot{params, pen.c, gamma_eval, beta_eval, beta0,
                      t,      row.val_loss, std::numeric_limits<double>::quiet_NaN()};
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  result.model = assemble_model(best, net_cfg, data, Task::Regression);
  result.penalty = init;
  result.penalty.c = best.c;
  result.penalty.gamma = best.gamma;
  result.best_iter = best.iter;
  result.best_val_loss = best.val_loss;
  return result;
}

TrainResult train_classification(const Dataset& data, const NetworkConfig& net_cfg,
                                 const TrainConfig& cfg, const PenaltyState& init) {
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be at least 1");
  TrainingViews views = gather_views(data);
  const Eigen::Index d = views.X_train.cols();
  check_network_config(net_cfg, d);
  validate_penalty(init, d);
  for (Eigen::Index i = 0; i < views.y_train.size(); ++i)
    if (views.y_train[i] != 0.0 && views.y_train[i] != 1.0)
      throw ConfigError("classification labels must be 0 or 1");

  const bool has_val = views.y_val.size() > 0;
  const double label_mean = views.y_train.mean();

  if (label_mean == 0.0 || label_mean == 1.0) {
    TrainResult result;
    Snapshot snap;
    snap.params = zero_params(net_cfg);
    snap.c = Vector::Ones(d);
    snap.gamma = Vector::Zero(d);
    snap.beta = Vector::Zero(d);
    snap.beta0 = std::log(clamp_probability(label_mean) / (1.0 - clamp_probability(label_mean)));
    snap.iter = 0;
    result.model = assemble_model(snap, net_cfg, data, Task::Logistic);
    result.penalty = init;
    result.penalty.c = snap.c;
    result.penalty.gamma = snap.gamma;
    result.degenerate = true;
    return result;
  }

  PenaltyState pen = init;
  if (pen.c.size() == 0) pen.c = Vector::Ones(d);

  NetworkConfig cfg_train = net_cfg;
  cfg_train.train_mode = true;
  NetworkConfig cfg_eval = net_cfg;
  cfg_eval.train_mode = false;

  SeededRng root(cfg.seed);
  SeededRng init_rng = root.fork(1);
  NetworkParams params =
      cfg.network_enabled ? init_params(net_cfg, init_rng) : zero_params(net_cfg);

  GradientStepper net_stepper(cfg.optimizer, cfg.learning_rate, flat_param_count(net_cfg));
  GradientStepper c_stepper(cfg.optimizer, cfg.learning_rate, d);
  TraceWriter trace_writer(cfg.trace_path);

  TrainResult result;
  Snapshot best;
  double best_acc = -std::numeric_limits<double>::infinity();
  double best_bce = std::numeric_limits<double>::infinity();
  int since_best = 0;

  double beta0 = 0.0;
  Vector beta = Vector::Zero(d);

  for (int t = 1; t <= cfg.max_iters; ++t) {
    const SeededRng rng_t = root.fork(10000 + static_cast<std::uint64_t>(t));

    double train_loss;
    Vector c_grad;
    if (cfg.network_enabled) {
      LogisticStep step =
          logistic_irls_step(views.X_train, views.y_train, params, cfg_train, pen, beta0,
                             beta, rng_t);
      train_loss = step.loss;
      c_grad = std::move(step.c_grad);
      beta0 = step.beta0;
      beta = std::move(step.beta);
      if (!std::isfinite(train_loss))
        throw DivergedError("training loss became non-finite at iteration " +
                            std::to_string(t));
      Vector flat = pack_params(params);
      net_stepper.step(flat, pack_params(step.net_grads));
      if (!flat.allFinite())
        throw DivergedError("network parameters diverged at iteration " + std::to_string(t));
      params = unpack_params(flat, net_cfg);
    } else {
      LogisticStepParts parts = logistic_linear_parts(views.X_train, views.y_train, pen.c,
                                                      pen.lambda, beta0, beta, false);
      train_loss = parts.bce + scale_penalty(pen.c, pen.mu_tilde, pen.delta);
      c_grad = parts.c_data_grad + scale_penalty_grad(pen.c, pen.mu_tilde, pen.delta);
      beta0 = parts.beta0;
      beta = std::move(parts.beta);
      if (!std::isfinite(train_loss))
        throw DivergedError("training loss became non-finite at iteration " +
                            std::to_string(t));
    }
    if (cfg.update_scales) {
      c_stepper.step(pen.c, c_grad);
      pen.c = pen.c.cwiseMax(kScaleFloor);
      if (!pen.c.allFinite() ||
          !std::isfinite(scale_penalty(pen.c, pen.mu_tilde, pen.delta)))
        throw DivergedError("scales diverged at iteration " + std::to_string(t));
    }

    const Matrix B_eval = cfg.network_enabled
                              ? design_matrix(params, cfg_eval, views.X_train, root)
                              : views.X_train;
    const IrlsState eval_state = irls_working_quantities(B_eval, beta, beta0, views.y_train);
    const auto [beta0_eval, gamma_eval] =
        irls_solve_with_intercept(B_eval, pen.c, eval_state, pen.lambda);
    const Vector beta_eval = pen.c.cwiseProduct(gamma_eval);

    TraceRow row;
    row.iter = t;
    row.train_loss = train_loss;
    row.beta_nonzeros = nonzero_count(beta_eval);
    double val_acc = std::numeric_limits<double>::quiet_NaN();
    if (has_val) {
      const Matrix B_val = cfg.network_enabled
                               ? design_matrix(params, cfg_eval, views.X_val, root)
                               : views.X_val;
      const Vector eta = (B_val * beta_eval).array() + beta0_eval;
      double bce = 0.0;
      int correct = 0;
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double pi = clamp_probability(sigmoid(eta[i]));
        bce -= views.y_val[i] * std::log(pi) + (1.0 - views.y_val[i]) * std::log(1.0 - pi);
        if ((pi > 0.5 ? 1.0 : 0.0) == views.y_val[i]) ++correct;
      }
      row.val_loss = bce / static_cast<double>(eta.size());
      val_acc = static_cast<double>(correct) / static_cast<double>(eta.size());
      if (!std::isfinite(row.val_loss))
        throw DivergedError("validation loss became non-finite at iteration " +
                            std::to_string(t));
    }
    result.trace.push_back(row);
    trace_writer.write(row);

    bool improved = true;
    if (has_val)
      improved = val_acc > best_acc + 1e-12 ||
                 (val_acc >= best_acc - 1e-12 && row.val_loss < best_bce - 1e-12);
    if (improved || t == 1) {
      if (has_val) {
        best_acc = std::max(best_acc, val_acc);
        best_bce = row.val_loss;
      }
      best = Snapshot{params, pen.c, gamma_eval, beta_eval, beta0_eval,
                      t,      row.val_loss, val_acc};
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  result.model = assemble_model(best, net_cfg, data, Task::Logistic);
  result.penalty = init;
  result.penalty.c = best.c;
  result.penalty.gamma = best.gamma;
  result.best_iter = best.iter;
  result.best_val_loss = best.val_loss;
  result.best_val_accuracy = best.val_accuracy;
  return result;
}

TrainResult train(const Dataset& data, const NetworkConfig& net_cfg, const TrainConfig& cfg,
                  const PenaltyState& init) {
  return cfg.task == Task::Regression ? train_regression(data, net_cfg, cfg, init)
                                      : train_classification(data, net_cfg, cfg, init);
}

AdaptiveRidgeFit adaptive_ridge_alternation(const Matrix& X, const Vector& y, double lambda,
                                            int max_iters, double tol) {
  if (X.rows() != y.size()) throw DimensionMismatchError("adaptive ridge: shape mismatch");
  if (lambda <= 0.0) throw ConfigError("lambda must be positive");
  const Eigen::Index d = X.cols();
  const Matrix S = X.transpose() * X;
  const Vector q = X.transpose() * y;

  Vector nu = Vector::Constant(d, lambda);
  auto resolve = [&](const Vector& penalties) {
    Matrix A = S;
    A.diagonal() += penalties;
    return solve_spd(A, q);
  };

  AdaptiveRidgeFit fit;
  fit.beta = resolve(nu);
  for (int it = 1; it <= max_iters; ++it) {
    fit.iterations = it;
    const double l1 = fit.beta.cwiseAbs().sum();
    if (l1 < 1e-300) break;
    for (Eigen::Index k = 0; k < d; ++k)
      nu[k] = std::min((lambda / static_cast<double>(d)) * l1 /
                           std::max(std::abs(fit.beta[k]), 1e-14),
                       1e18);
    const Vector next = resolve(nu);
    const double change = (next - fit.beta).cwiseAbs().maxCoeff();
    fit.beta = next;
    if (change <= tol * (1.0 + fit.beta.cwiseAbs().maxCoeff())) break;
  }

  fit.scales = (lambda * nu.cwiseInverse()).cwiseSqrt();
  fit.gamma = fit.beta.cwiseQuotient(fit.scales);
  fit.lasso_penalty =
      2.0 * (lambda / static_cast<double>(d)) * fit.beta.cwiseAbs().sum();
  return fit;
}

}  // namespace nimo
