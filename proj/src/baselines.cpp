#include "nimo/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "nimo/errors.hpp"

namespace nimo {

namespace {

double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

// max_j violation of the subgradient condition of
// ||y - X beta||^2 + penalty ||beta||_1 given the correlation g = 2 X^T r.
double lasso_kkt_residual(const Vector& g, const Vector& beta, double penalty) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double violation = beta[j] == 0.0
                                 ? std::max(0.0, std::abs(g[j]) - penalty)
                                 : std::abs(g[j] - penalty * (beta[j] > 0 ? 1.0 : -1.0));
    worst = std::max(worst, violation);
  }
  return worst;
}

double lasso_dual_gap(const Matrix& X, const Vector& r, const Vector& beta, double penalty,
                      const Vector& y_centered) {
  const double corr_max = (2.0 * X.transpose() * r).cwiseAbs().maxCoeff();
  const double s = corr_max > penalty ? penalty / corr_max : 1.0;
  const double gap = r.squaredNorm() + penalty * beta.cwiseAbs().sum() -
                     2.0 * s * r.dot(y_centered) + s * s * r.squaredNorm();
  return gap < 0.0 && gap > -1e-10 ? 0.0 : gap;
}

LassoFit lasso_cd_warm(const Matrix& X, const Vector& y, double penalty, int max_sweeps,
                       double tol, Vector beta) {
  if (X.rows() != y.size()) throw DimensionMismatchError("lasso_cd: shape mismatch");
  if (penalty < 0.0) throw ConfigError("lasso penalty must be nonnegative");
  const Eigen::Index d = X.cols();

  LassoFit fit;
  fit.penalty = penalty;
  fit.intercept = y.mean();
  const Vector y_c = y.array() - fit.intercept;
  const Vector col_sq = X.colwise().squaredNorm();
  Vector r = y_c - X * beta;

  bool converged = false;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    fit.iterations = sweep;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double old = beta[j];
      const double rho = X.col(j).dot(r) + col_sq[j] * old;
      const double updated = soft_threshold(rho, penalty / 2.0) / col_sq[j];
      if (updated != old) {
        beta[j] = updated;
        r += X.col(j) * (old - updated);
      }
    }
    r = y_c - X * beta;
    if (lasso_kkt_residual(2.0 * X.transpose() * r, beta, penalty) <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw MaxIterationsError("lasso coordinate descent did not converge in " +
                             std::to_string(max_sweeps) + " sweeps");

  fit.coefficients = std::move(beta);
  fit.dual_gap = lasso_dual_gap(X, r, fit.coefficients, penalty, y_c);
  return fit;
}

}  // namespace

LassoFit lasso_cd(const Matrix& X, const Vector& y, double penalty, int max_sweeps,
                  double tol) {
  return lasso_cd_warm(X, y, penalty, max_sweeps, tol, Vector::Zero(X.cols()));
}

std::vector<LassoFit> lasso_path(const Matrix& X, const Vector& y,
                                 const std::vector<double>& penalties) {
  std::vector<LassoFit> fits;
  fits.reserve(penalties.size());
  Vector warm = Vector::Zero(X.cols());
  for (const double penalty : penalties) {
    fits.push_back(lasso_cd_warm(X, y, penalty, 200000, 1e-8, warm));
    warm = fits.back().coefficients;
  }
  return fits;
}

double lasso_null_penalty(const Matrix& X, const Vector& y) {
  const Vector y_c = y.array() - y.mean();
  return 2.0 * (X.transpose() * y_c).cwiseAbs().maxCoeff();
}

LassoFit ridge_fit(const Matrix& X, const Vector& y, double lambda) {
  LassoFit fit;
  fit.intercept = y.mean();
  fit.penalty = lambda;
  fit.coefficients = ridge_closed_form(X, Vector(y.array() - fit.intercept), lambda);
  return fit;
}

namespace {

double logistic_objective(const Matrix& X, const Vector& y, double beta0, const Vector& beta,
                          double l2, double l1) {
  const Vector eta = (X * beta).array() + beta0;
  double nll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + exp(eta)) - y eta, computed stably.
    const double e = eta[i];
    nll += (e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y[i] * e;
  }
  return nll + l2 * beta.squaredNorm() + l1 * beta.cwiseAbs().sum();
}

double logistic_stationarity(const Matrix& X, const Vector& y, double beta0,
                             const Vector& beta, double l2, double l1) {
  const Vector eta = (X * beta).array() + beta0;
  Vector pi(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) pi[i] = sigmoid(eta[i]);
  const Vector g = X.transpose() * (pi - y) + 2.0 * l2 * beta;
  double worst = std::abs((pi - y).sum());
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double violation = beta[j] == 0.0
                                 ? std::max(0.0, std::abs(g[j]) - l1)
                                 : std::abs(g[j] + l1 * (beta[j] > 0 ? 1.0 : -1.0));
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace

LassoFit logistic_newton(const Matrix& X, const Vector& y, double l2, double l1,
                         int max_iters, double tol) {
  if (X.rows() != y.size()) throw DimensionMismatchError("logistic_newton: shape mismatch");
  if (l2 < 0.0 || l1 < 0.0) throw ConfigError("penalties must be nonnegative");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0) throw ConfigError("labels must be 0 or 1");

  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  LassoFit fit;
  fit.penalty = l1;
  fit.coefficients = Vector::Zero(d);
  double beta0 = 0.0;
  double objective = logistic_objective(X, y, beta0, fit.coefficients, l2, l1);

  for (int iter = 1; iter <= max_iters; ++iter) {
    fit.iterations = iter;
    const Vector eta = (X * fit.coefficients).array() + beta0;
    Vector pi(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      pi[i] = std::clamp(sigmoid(eta[i]), 1e-12, 1.0 - 1e-12);
      w[i] = pi[i] * (1.0 - pi[i]);
    }
    const Vector z = eta + ((y - pi).array() / w.array()).matrix();

    // Inner coordinate descent on the weighted quadratic surrogate
    // 0.5 sum w (z - beta0 - x beta)^2 + l2 ||beta||^2 + l1 ||beta||_1.
    Vector beta_new = fit.coefficients;
    double beta0_new = beta0;
    const double w_sum = w.sum();
    Vector wx_sq(d);
    for (Eigen::Index j = 0; j < d; ++j) wx_sq[j] = X.col(j).cwiseAbs2().dot(w);
    Vector resid = z - (X * beta_new).array().matrix() -
                   Vector::Constant(n, beta0_new);
    for (int inner = 0; inner < 200; ++inner) {
      double max_change = 0.0;
      const double b0_shift = w.dot(resid) / w_sum;
      beta0_new += b0_shift;
      resid.array() -= b0_shift;
      max_change = std::abs(b0_shift);
      for (Eigen::Index j = 0; j < d; ++j) {
        if (wx_sq[j] == 0.0 && l2 == 0.0) continue;
        const double old = beta_new[j];
        const double rho = X.col(j).cwiseProduct(w).dot(resid) + wx_sq[j] * old;
        const double updated = soft_threshold(rho, l1) / (wx_sq[j] + 2.0 * l2);
        if (updated != old) {
          beta_new[j] = updated;
          resid += X.col(j) * (old - updated);
          max_change = std::max(max_change, std::abs(updated - old));
        }
      }
      if (max_change <= 1e-12) break;
    }

    // Step halving keeps the penalized likelihood from increasing.
    double step = 1.0;
    Vector candidate = beta_new;
    double candidate0 = beta0_new;
    double new_objective = logistic_objective(X, y, candidate0, candidate, l2, l1);
    for (int halving = 0; halving < 40 && new_objective > objective + 1e-12; ++halving) {
      step *= 0.5;
      candidate = fit.coefficients + step * (beta_new - fit.coefficients);
      candidate0 = beta0 + step * (beta0_new - beta0);
      new_objective = logistic_objective(X, y, candidate0, candidate, l2, l1);
    }
    fit.coefficients = candidate;
    beta0 = candidate0;
    objective = new_objective;

    if (l2 == 0.0 && l1 == 0.0 &&
        (fit.coefficients.cwiseAbs().maxCoeff() > 30.0 || std::abs(beta0) > 30.0)) {
      fit.separable = true;
      fit.intercept = beta0;
      return fit;
    }
    if (logistic_stationarity(X, y, beta0, fit.coefficients, l2, l1) <= tol) {
      fit.intercept = beta0;
      return fit;
    }
  }
  throw MaxIterationsError("logistic_newton did not converge in " +
                           std::to_string(max_iters) + " iterations");
}

namespace {

struct MlpBatch {
  Matrix h1;       // post-tanh, pre-dropout
  Matrix h1_kept;  // post-dropout
  Matrix z2;
  Matrix h2;
  Matrix h2_kept;
  Vector out;
};

MlpBatch mlp_forward(const NetworkParams& p, const Matrix& X, const Matrix& mask1,
                     const Matrix& mask2) {
  MlpBatch batch;
  batch.h1 = ((X * p.W1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  batch.h1_kept = mask1.size() > 0 ? batch.h1.cwiseProduct(mask1) : batch.h1;
  batch.z2 = (batch.h1_kept * p.W2.transpose()).rowwise() + p.b2.transpose();
  batch.h2 = batch.z2.array().sin();
  batch.h2_kept = mask2.size() > 0 ? batch.h2.cwiseProduct(mask2) : batch.h2;
  batch.out = (batch.h2_kept * p.w3).array() + p.b3;
  return batch;
}

NetworkGradients mlp_backward(const NetworkParams& p, const Matrix& X, const MlpBatch& batch,
                              const Matrix& mask1, const Matrix& mask2, const Vector& dout) {
  NetworkGradients g;
  g.w3 = batch.h2_kept.transpose() * dout;
  g.b3 = dout.sum();
  Matrix dh2 = dout * p.w3.transpose();
  if (mask2.size() > 0) dh2 = dh2.cwiseProduct(mask2);
  const Matrix dz2 = dh2.cwiseProduct(batch.z2.array().cos().matrix());
  g.W2 = dz2.transpose() * batch.h1_kept;
  g.b2 = dz2.colwise().sum();
  Matrix dh1 = dz2 * p.W2;
  if (mask1.size() > 0) dh1 = dh1.cwiseProduct(mask1);
  const Matrix dz1 =
      dh1.cwiseProduct((1.0 - batch.h1.array().square()).matrix());
  g.W1 = dz1.transpose() * X;
  g.b1 = dz1.colwise().sum();
  return g;
}

Matrix dropout_mask(SeededRng& rng, Eigen::Index rows, Eigen::Index cols, double drop) {
  const double keep = 1.0 - drop;
  Matrix mask(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      mask(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
  return mask;
}

}  // namespace

MlpBaselineFit fit_mlp_baseline(const Dataset& data, const NetworkConfig& net_cfg,
                                const TrainConfig& cfg) {
  const SplitView train = view_of(data, SplitLabel::Train);
  if (train.y.size() == 0) throw InsufficientRowsError("training split is empty");
  const SplitView val = view_of(data, SplitLabel::Val);
  const bool has_val = val.y.size() > 0;
  const Eigen::Index n = train.X_std.rows();
  const Eigen::Index d = train.X_std.cols();

  MlpBaselineFit fit;
  fit.task = cfg.task;
  fit.stats = data.stats;
  fit.cfg = net_cfg;
  fit.cfg.input_dim = static_cast<int>(d);
  fit.cfg.enc_bits = 0;
  fit.cfg.noise_scale = 0.0;
  fit.cfg.train_mode = false;

  SeededRng root(cfg.seed);
  SeededRng init_rng = root.fork(1);
  NetworkParams params = init_params(fit.cfg, init_rng);
  if (cfg.task == Task::Regression) params.b3 = train.y.mean();

  const Eigen::Index flat_count = params.W1.size() + params.b1.size() + params.W2.size() +
                                  params.b2.size() + params.w3.size() + 1;
  GradientStepper stepper(cfg.optimizer, cfg.learning_rate, flat_count);

  auto pack = [](const NetworkParams& p) {
    Vector flat(p.W1.size() + p.b1.size() + p.W2.size() + p.b2.size() + p.w3.size() + 1);
    Eigen::Index pos = 0;
    auto put = [&](const double* src, Eigen::Index count) {
      flat.segment(pos, count) = Eigen::Map<const Vector>(src, count);
      pos += count;
    };
    put(p.W1.data(), p.W1.size());
    put(p.b1.data(), p.b1.size());
    put(p.W2.data(), p.W2.size());
    put(p.b2.data(), p.b2.size());
    put(p.w3.data(), p.w3.size());
    flat[pos] = p.b3;
    return flat;
  };
  auto unpack = [&](const Vector& flat) {
    NetworkParams p = zero_params(fit.cfg);
    Eigen::Index pos = 0;
    auto take = [&](double* dst, Eigen::Index count) {
      Eigen::Map<Vector>(dst, count) = flat.segment(pos, count);
      pos += count;
    };
    take(p.W1.data(), p.W1.size());
    take(p.b1.data(), p.b1.size());
    take(p.W2.data(), p.W2.size());
    take(p.b2.data(), p.b2.size());
    take(p.w3.data(), p.w3.size());
    p.b3 = flat[pos];
    return p;
  };

  NetworkParams best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int best_iter = 0;
  int since_best = 0;
  const Matrix no_mask;

  for (int t = 1; t <= cfg.max_iters; ++t) {
    SeededRng rng_t = root.fork(10000 + static_cast<std::uint64_t>(t));
    const Matrix mask1 = dropout_mask(rng_t, n, fit.cfg.hidden1, kMlpBaselineDropout);
    const MlpBatch batch = mlp_forward(params, train.X_std, mask1, no_mask);

    Vector dout(n);
    double loss = 0.0;
    if (cfg.task == Task::Regression) {
      const Vector err = batch.out - train.y;
      loss = err.squaredNorm() / static_cast<double>(n);
      dout = 2.0 * err / static_cast<double>(n);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double pi = std::clamp(sigmoid(batch.out[i]), 1e-12, 1.0 - 1e-12);
        loss -= train.y[i] * std::log(pi) + (1.0 - train.y[i]) * std::log(1.0 - pi);
        dout[i] = (pi - train.y[i]) / static_cast<double>(n);
      }
      loss /= static_cast<double>(n);
    }
    if (!std::isfinite(loss))
      throw DivergedError("baseline network loss became non-finite at iteration " +
                          std::to_string(t));

    const NetworkGradients grads =
        mlp_backward(params, train.X_std, batch, mask1, no_mask, dout);
    Vector flat = pack(params);
    stepper.step(flat, pack(grads));
    params = unpack(flat);

    double score = loss;
    if (has_val) {
      const MlpBatch eval = mlp_forward(params, val.X_std, no_mask, no_mask);
      if (cfg.task == Task::Regression) {
        score = (eval.out - val.y).squaredNorm() / static_cast<double>(val.y.size());
      } else {
        score = 0.0;
        for (Eigen::Index i = 0; i < val.y.size(); ++i) {
          const double pi = std::clamp(sigmoid(eval.out[i]), 1e-12, 1.0 - 1e-12);
          score -= val.y[i] * std::log(pi) + (1.0 - val.y[i]) * std::log(1.0 - pi);
        }
        score /= static_cast<double>(val.y.size());
      }
      if (!std::isfinite(score))
        throw DivergedError("baseline validation loss became non-finite");
    }

    if (score < best_val - 1e-12 || t == 1) {
      best_val = score;
      best_params = params;
      best_iter = t;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  fit.params = best_params;
  fit.best_iter = best_iter;
  fit.best_val_loss = best_val;
  return fit;
}

Vector mlp_baseline_predict(const MlpBaselineFit& fit, const Matrix& X_raw) {
  const Matrix X = apply_standardization(X_raw, fit.stats);
  const Matrix no_mask;
  const MlpBatch batch = mlp_forward(fit.params, X, no_mask, no_mask);
  if (fit.task == Task::Regression) return batch.out;
  Vector pi(batch.out.size());
  for (Eigen::Index i = 0; i < pi.size(); ++i) pi[i] = sigmoid(batch.out[i]);
  return pi;
}

}  // namespace nimo
