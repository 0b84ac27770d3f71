#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <vector>

#include "nimo/baselines.hpp"
#include "nimo/data.hpp"
#include "nimo/errors.hpp"
#include "nimo/mlp.hpp"
#include "nimo/model.hpp"
#include "nimo/numerics.hpp"
#include "nimo/optimize.hpp"

using nimo::Dataset;
using nimo::LassoFit;
using nimo::Matrix;
using nimo::SeededRng;
using nimo::Task;
using nimo::TrainConfig;
using nimo::Vector;

namespace {

// ---------------------------------------------------------------------------
// Oracles.  Coordinate descent is checked against a proximal-gradient solver
// driven to machine precision, the penalized logistic fit against a dense
// Newton iteration with an explicit Hessian, and both against their
// first-order optimality conditions written out by hand.
// ---------------------------------------------------------------------------

Matrix random_matrix(SeededRng& rng, Eigen::Index n, Eigen::Index d, double lo, double hi) {
  Matrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.uniform(lo, hi);
  return X;
}

Vector random_vector(SeededRng& rng, Eigen::Index n, double lo, double hi) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

double lasso_objective(const Matrix& X, const Vector& y_c, const Vector& beta,
                       double penalty) {
  return (y_c - X * beta).squaredNorm() + penalty * beta.cwiseAbs().sum();
}

// Proximal gradient on ||y_c - X beta||^2 + penalty ||beta||_1 with the step
// fixed at the reciprocal smooth-curvature bound 1 / (2 lambda_max(X^T X)).
Vector lasso_proximal_oracle(const Matrix& X, const Vector& y_c, double penalty) {
  const Matrix gram = X.transpose() * X;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const double step = 1.0 / (2.0 * eig.eigenvalues().maxCoeff());
  Vector beta = Vector::Zero(X.cols());
  for (int iter = 0; iter < 200000; ++iter) {
    const Vector grad = -2.0 * (X.transpose() * (y_c - X * beta));
    Vector next = beta - step * grad;
    const double cut = step * penalty;
    for (Eigen::Index j = 0; j < next.size(); ++j) {
      if (next[j] > cut)
        next[j] -= cut;
      else if (next[j] < -cut)
        next[j] += cut;
      else
        next[j] = 0.0;
    }
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    if (change <= 1e-14) break;
  }
  return beta;
}

double logistic_objective(const Matrix& X, const Vector& y, double beta0, const Vector& beta,
                          double l2, double l1) {
  const Vector eta = (X * beta).array() + beta0;
  double value = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double e = eta[i];
    value += (e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y[i] * e;
  }
  return value + l2 * beta.squaredNorm() + l1 * beta.cwiseAbs().sum();
}

// Dense Newton iteration on the ridge-penalized log loss (no l1 part): the
// gradient is Xt^T (pi - y) + 2 l2 [0; beta] and the Hessian
// Xt^T W Xt + 2 l2 diag(0, I) with Xt = [1 | X].
std::pair<double, Vector> logistic_newton_oracle(const Matrix& X, const Vector& y,
                                                 double l2) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Matrix Xt(n, d + 1);
  Xt.col(0).setOnes();
  Xt.rightCols(d) = X;
  Vector theta = Vector::Zero(d + 1);
  double objective = logistic_objective(X, y, theta[0], theta.tail(d), l2, 0.0);
  for (int iter = 0; iter < 200; ++iter) {
    const Vector eta = Xt * theta;
    Vector pi(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      pi[i] = nimo::sigmoid(eta[i]);
      w[i] = std::max(pi[i] * (1.0 - pi[i]), 1e-12);
    }
    Vector grad = Xt.transpose() * (pi - y);
    grad.tail(d) += 2.0 * l2 * theta.tail(d);
    if (grad.cwiseAbs().maxCoeff() <= 1e-10) break;
    Matrix hess = Xt.transpose() * w.asDiagonal() * Xt;
    for (Eigen::Index j = 1; j <= d; ++j) hess(j, j) += 2.0 * l2;
    const Vector direction = hess.ldlt().solve(grad);
    double step = 1.0;
    for (int halving = 0; halving < 60; ++halving) {
      const Vector candidate = theta - step * direction;
      const double value =
          logistic_objective(X, y, candidate[0], candidate.tail(d), l2, 0.0);
      if (value <= objective + 1e-12) {
        theta = candidate;
        objective = value;
        break;
      }
      step *= 0.5;
    }
  }
  return {theta[0], theta.tail(d)};
}

// max_j violation of the subgradient conditions of the penalized log loss.
double logistic_kkt(const Matrix& X, const Vector& y, const LassoFit& fit, double l2,
                    double l1) {
  const Vector eta = (X * fit.coefficients).array() + fit.intercept;
  Vector pi(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) pi[i] = nimo::sigmoid(eta[i]);
  const Vector smooth = X.transpose() * (pi - y) + 2.0 * l2 * fit.coefficients;
  double worst = std::abs((pi - y).sum());
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    const double violation =
        fit.coefficients[j] == 0.0
            ? std::max(0.0, std::abs(smooth[j]) - l1)
            : std::abs(smooth[j] + l1 * (fit.coefficients[j] > 0 ? 1.0 : -1.0));
    worst = std::max(worst, violation);
  }
  return worst;
}

Dataset make_dataset(const Matrix& X_raw, const Vector& y, Task task, int n_val = 0) {
  Dataset data;
  data.X_raw = X_raw;
  std::tie(data.X_std, data.stats) = nimo::standardize(X_raw);
  data.y = y;
  data.task = task;
  data.split.assign(static_cast<std::size_t>(X_raw.rows()), nimo::SplitLabel::Train);
  for (int k = 0; k < n_val; ++k)
    data.split[data.split.size() - 1 - static_cast<std::size_t>(k)] = nimo::SplitLabel::Val;
  for (Eigen::Index j = 0; j < X_raw.cols(); ++j)
    data.feature_names.push_back("x" + std::to_string(j + 1));
  return data;
}

}  // namespace

TEST_CASE("coordinate descent matches the proximal gradient oracle") {
  SeededRng rng(71);
  const double fractions[] = {0.05, 0.15, 0.3, 0.5, 0.75, 0.9};
  for (int rep = 0; rep < 40; ++rep) {
    const Matrix X = random_matrix(rng, 40, 8, -2.0, 2.0);
    Vector beta_true = Vector::Zero(8);
    beta_true[1] = 1.5;
    beta_true[4] = -2.0;
    beta_true[6] = rng.uniform(-1.0, 1.0);
    const Vector y = X * beta_true + random_vector(rng, 40, -0.4, 0.4);
    const double penalty = fractions[rep % 6] * nimo::lasso_null_penalty(X, y);

    const LassoFit fit = nimo::lasso_cd(X, y, penalty);
    const Vector y_c = y.array() - y.mean();
    const Vector oracle = lasso_proximal_oracle(X, y_c, penalty);
    CAPTURE(rep);
    CAPTURE(penalty);
    CHECK((fit.coefficients - oracle).cwiseAbs().maxCoeff() <= 1e-6);
    const double fit_obj = lasso_objective(X, y_c, fit.coefficients, penalty);
    const double oracle_obj = lasso_objective(X, y_c, oracle, penalty);
    CHECK(fit_obj <= oracle_obj + 1e-8);
    CHECK(fit.dual_gap >= 0.0);
    CHECK(fit.dual_gap <= 1e-4);
    CHECK(fit.intercept == y.mean());
  }
}

TEST_CASE("zero penalty reduces coordinate descent to the normal equations") {
  SeededRng rng(72);
  const Matrix X = random_matrix(rng, 60, 6, -1.5, 1.5);
  const Vector y = random_vector(rng, 60, -3.0, 3.0);
  const LassoFit fit = nimo::lasso_cd(X, y, 0.0);
  const Vector y_c = y.array() - y.mean();
  const Vector ols = (X.transpose() * X).ldlt().solve(X.transpose() * y_c);
  CHECK((fit.coefficients - ols).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("null penalty is the smallest penalty with an all-zero fit") {
  SeededRng rng(73);
  const Matrix X = random_matrix(rng, 50, 5, -2.0, 2.0);
  const Vector y = random_vector(rng, 50, -2.0, 2.0);
  const double null_penalty = nimo::lasso_null_penalty(X, y);
  const Vector y_c = y.array() - y.mean();
  CHECK(null_penalty ==
        doctest::Approx((2.0 * X.transpose() * y_c).cwiseAbs().maxCoeff()).epsilon(1e-12));
  CHECK(nimo::lasso_cd(X, y, 1.0000001 * null_penalty).coefficients.cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(nimo::lasso_cd(X, y, 0.98 * null_penalty).coefficients.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("warm started penalty path matches cold fits") {
  SeededRng rng(74);
  const Matrix X = random_matrix(rng, 50, 10, -2.0, 2.0);
  Vector beta_true = Vector::Zero(10);
  beta_true[0] = 2.0;
  beta_true[5] = -1.0;
  const Vector y = X * beta_true + random_vector(rng, 50, -0.3, 0.3);
  const double top = nimo::lasso_null_penalty(X, y);
  std::vector<double> penalties;
  for (int k = 0; k < 8; ++k) penalties.push_back(top * std::pow(0.5, k));

  const std::vector<LassoFit> path = nimo::lasso_path(X, y, penalties);
  REQUIRE(path.size() == penalties.size());
  const Vector y_c = y.array() - y.mean();
  for (std::size_t k = 0; k < path.size(); ++k) {
    CHECK(path[k].penalty == penalties[k]);
    const LassoFit cold = nimo::lasso_cd(X, y, penalties[k]);
    const double warm_obj = lasso_objective(X, y_c, path[k].coefficients, penalties[k]);
    const double cold_obj = lasso_objective(X, y_c, cold.coefficients, penalties[k]);
    CHECK(std::abs(warm_obj - cold_obj) <= 1e-8 * std::max(1.0, cold_obj));
  }
  const auto nnz = [](const LassoFit& fit) {
    int count = 0;
    for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j)
      if (fit.coefficients[j] != 0.0) ++count;
    return count;
  };
  CHECK(nnz(path.front()) <= nnz(path.back()));
}

TEST_CASE("all-zero columns stay inactive") {
  SeededRng rng(75);
  Matrix X = random_matrix(rng, 30, 4, -1.0, 1.0);
  X.col(2).setZero();
  const Vector y = random_vector(rng, 30, -1.0, 1.0);
  const LassoFit fit = nimo::lasso_cd(X, y, 0.5);
  CHECK(fit.coefficients[2] == 0.0);
  CHECK(fit.coefficients.allFinite());
}

TEST_CASE("coordinate descent reports when the sweep budget is exhausted") {
  SeededRng rng(76);
  const Matrix X = random_matrix(rng, 40, 8, -2.0, 2.0);
  const Vector y = random_vector(rng, 40, -2.0, 2.0);
  CHECK_THROWS_AS(nimo::lasso_cd(X, y, 0.01, 1), nimo::MaxIterationsError);
}

TEST_CASE("lasso input validation") {
  const Matrix X = Matrix::Ones(5, 2);
  const Vector y = Vector::Ones(5);
  CHECK_THROWS_AS(nimo::lasso_cd(X, y, -0.1), nimo::ConfigError);
  CHECK_THROWS_AS(nimo::lasso_cd(X, Vector::Ones(4), 0.1), nimo::DimensionMismatchError);
}

TEST_CASE("ridge baseline matches its closed form") {
  SeededRng rng(77);
  const Matrix X = random_matrix(rng, 40, 6, -2.0, 2.0);
  const Vector y = random_vector(rng, 40, -2.0, 2.0);
  const Vector y_c = y.array() - y.mean();
  for (const double lambda : {0.0, 0.3, 5.0}) {
    const LassoFit fit = nimo::ridge_fit(X, y, lambda);
    Matrix gram = X.transpose() * X;
    gram.diagonal().array() += lambda;
    const Vector oracle = gram.ldlt().solve(X.transpose() * y_c);
    CHECK((fit.coefficients - oracle).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(fit.intercept == y.mean());
  }
  CHECK(nimo::ridge_fit(X, y, 1e12).coefficients.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("penalized logistic fit matches the dense Newton oracle") {
  SeededRng rng(78);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix X = random_matrix(rng, 60, 4, -2.0, 2.0);
    Vector beta_true = random_vector(rng, 4, -1.5, 1.5);
    Vector y(60);
    for (Eigen::Index i = 0; i < 60; ++i) {
      const double p = nimo::sigmoid(X.row(i).dot(beta_true) - 0.3);
      y[i] = rng.uniform() < p ? 1.0 : 0.0;
    }
    const double l2 = rep % 2 == 0 ? 0.05 : 0.5;

    const LassoFit fit = nimo::logistic_newton(X, y, l2, 0.0);
    const auto [b0, beta] = logistic_newton_oracle(X, y, l2);
    CAPTURE(rep);
    CHECK(std::abs(fit.intercept - b0) <= 1e-6);
    CHECK((fit.coefficients - beta).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(logistic_kkt(X, y, fit, l2, 0.0) <= 1e-6);
    CHECK_FALSE(fit.separable);
  }
}

TEST_CASE("sparse logistic fit satisfies the subgradient conditions") {
  SeededRng rng(79);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix X = random_matrix(rng, 80, 8, -2.0, 2.0);
    Vector beta_true = Vector::Zero(8);
    beta_true[0] = 1.2;
    beta_true[3] = -1.8;
    Vector y(80);
    for (Eigen::Index i = 0; i < 80; ++i) {
      const double p = nimo::sigmoid(X.row(i).dot(beta_true) + 0.4);
      y[i] = rng.uniform() < p ? 1.0 : 0.0;
    }
    const double l1 = rng.uniform(0.5, 6.0);
    const LassoFit fit = nimo::logistic_newton(X, y, 0.0, l1);
    CAPTURE(rep);
    CAPTURE(l1);
    CHECK(logistic_kkt(X, y, fit, 0.0, l1) <= 1e-6);
    CHECK(fit.penalty == l1);
  }
}

TEST_CASE("logistic fit on zero features recovers the log odds") {
  const Matrix X = Matrix::Zero(40, 2);
  Vector y = Vector::Zero(40);
  y.head(16).setOnes();
  const LassoFit fit = nimo::logistic_newton(X, y, 0.0, 0.0);
  CHECK(std::abs(fit.intercept - std::log(0.4 / 0.6)) <= 1e-6);
  CHECK(fit.coefficients.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("heavy ridge shrinks logistic coefficients toward the log odds") {
  SeededRng rng(80);
  const Matrix X = random_matrix(rng, 50, 3, -2.0, 2.0);
  Vector y = Vector::Zero(50);
  y.head(20).setOnes();
  const LassoFit fit = nimo::logistic_newton(X, y, 1e6, 0.0);
  CHECK(fit.coefficients.cwiseAbs().maxCoeff() <= 1e-4);
  CHECK(std::abs(fit.intercept - std::log(0.4 / 0.6)) <= 1e-2);
}

TEST_CASE("separable data sets the flag instead of diverging") {
  Matrix X(8, 1);
  X << -0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4;
  Vector y(8);
  y << 0, 0, 0, 0, 1, 1, 1, 1;
  const LassoFit unpenalized = nimo::logistic_newton(X, y, 0.0, 0.0);
  CHECK(unpenalized.separable);
  const LassoFit ridged = nimo::logistic_newton(X, y, 0.1, 0.0);
  CHECK_FALSE(ridged.separable);
  CHECK(logistic_kkt(X, y, ridged, 0.1, 0.0) <= 1e-6);
}

TEST_CASE("logistic input validation") {
  const Matrix X = Matrix::Ones(6, 2);
  Vector y = Vector::Zero(6);
  y[0] = 2.0;
  CHECK_THROWS_AS(nimo::logistic_newton(X, y, 0.0, 0.0), nimo::ConfigError);
  y[0] = 1.0;
  CHECK_THROWS_AS(nimo::logistic_newton(X, Vector::Zero(5), 0.0, 0.0),
                  nimo::DimensionMismatchError);
  CHECK_THROWS_AS(nimo::logistic_newton(X, y, -1.0, 0.0), nimo::ConfigError);
  CHECK_THROWS_AS(nimo::logistic_newton(X, y, 0.0, -1.0), nimo::ConfigError);
}

TEST_CASE("frozen-design logistic training matches the penalized likelihood fit") {
  SeededRng rng(81);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix X_raw = random_matrix(rng, 80, 5, -2.0, 2.0);
    Vector beta_true = Vector::Zero(5);
    beta_true[0] = 1.5;
    beta_true[2] = -2.0;
    Vector y(80);
    for (Eigen::Index i = 0; i < 80; ++i) {
      const double p = nimo::sigmoid(X_raw.row(i).dot(beta_true));
      y[i] = rng.uniform() < p ? 1.0 : 0.0;
    }
    const Dataset data = make_dataset(X_raw, y, Task::Logistic);

    TrainConfig cfg;
    cfg.task = Task::Logistic;
    cfg.max_iters = 80;
    cfg.network_enabled = false;
    cfg.update_scales = false;
    nimo::PenaltyState init;
    init.lambda = 0.4;
    const nimo::TrainResult result = nimo::train_classification(
        data, nimo::make_network_config(5, nimo::OutputRange::Classification), cfg, init);

    const LassoFit oracle = nimo::logistic_newton(data.X_std, y, init.lambda / 2.0, 0.0);
    CAPTURE(rep);
    CHECK(std::abs(result.model.beta0 - oracle.intercept) <= 1e-4);
    CHECK((result.model.beta - oracle.coefficients).cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("baseline network interpolates a constant target") {
  SeededRng rng(82);
  const Matrix X_raw = random_matrix(rng, 60, 3, -1.0, 1.0);
  const Vector y = Vector::Constant(60, 3.2);
  const Dataset data = make_dataset(X_raw, y, Task::Regression);
  TrainConfig cfg;
  cfg.max_iters = 400;
  cfg.patience = 400;
  cfg.seed = 9;
  const nimo::MlpBaselineFit fit =
      nimo::fit_mlp_baseline(data, nimo::make_network_config(3, nimo::OutputRange::Regression, 16, 8), cfg);
  const Vector pred = nimo::mlp_baseline_predict(fit, X_raw);
  CHECK((pred.array() - 3.2).square().mean() <= 1e-2);
}

TEST_CASE("baseline network is deterministic per seed") {
  const Dataset raw = nimo::generate({nimo::SettingId::RegToy, 120, 0.1, 4});
  const Dataset data = nimo::split(raw, 80, 40, 0, 4);
  TrainConfig cfg;
  cfg.max_iters = 120;
  cfg.patience = 120;
  cfg.seed = 17;
  const auto net_cfg = nimo::make_network_config(3, nimo::OutputRange::Regression, 16, 8);
  const nimo::MlpBaselineFit a = nimo::fit_mlp_baseline(data, net_cfg, cfg);
  const nimo::MlpBaselineFit b = nimo::fit_mlp_baseline(data, net_cfg, cfg);
  const Vector pa = nimo::mlp_baseline_predict(a, data.X_raw);
  const Vector pb = nimo::mlp_baseline_predict(b, data.X_raw);
  CHECK(pa == pb);
  CHECK(a.best_iter == b.best_iter);

  cfg.seed = 18;
  const nimo::MlpBaselineFit c = nimo::fit_mlp_baseline(data, net_cfg, cfg);
  CHECK(nimo::mlp_baseline_predict(c, data.X_raw) != pa);
}

TEST_CASE("baseline network fits the toy interaction but trails on linear data") {
  const Dataset toy_raw = nimo::generate({nimo::SettingId::RegToy, 400, 0.1, 6});
  const Dataset toy = nimo::split(toy_raw, 200, 100, 100, 6);
  TrainConfig cfg;
  cfg.max_iters = 6000;
  cfg.patience = 600;
  cfg.seed = 6;
  const nimo::MlpBaselineFit toy_fit = nimo::fit_mlp_baseline(
      toy, nimo::make_network_config(3, nimo::OutputRange::Regression, 64, 32), cfg);
  const nimo::SplitView toy_test = nimo::view_of(toy, nimo::SplitLabel::Test);
  const Vector toy_pred = nimo::mlp_baseline_predict(toy_fit, toy_test.X_raw);
  const double toy_mse = (toy_pred - toy_test.y).squaredNorm() /
                         static_cast<double>(toy_test.y.size());
  CHECK(toy_mse <= 1.0);

  const Dataset lin_raw = nimo::generate({nimo::SettingId::RegVanilla, 400, 0.1, 6});
  const Dataset lin = nimo::split(lin_raw, 200, 100, 100, 6);
  const nimo::MlpBaselineFit lin_fit = nimo::fit_mlp_baseline(
      lin, nimo::make_network_config(10, nimo::OutputRange::Regression, 32, 16), cfg);
  const nimo::SplitView lin_test = nimo::view_of(lin, nimo::SplitLabel::Test);
  const Vector lin_pred = nimo::mlp_baseline_predict(lin_fit, lin_test.X_raw);
  const double lin_mse = (lin_pred - lin_test.y).squaredNorm() /
                         static_cast<double>(lin_test.y.size());

  const nimo::SplitView lin_train = nimo::view_of(lin, nimo::SplitLabel::Train);
  const nimo::SplitView lin_val = nimo::view_of(lin, nimo::SplitLabel::Val);
  const double null_penalty = nimo::lasso_null_penalty(lin_train.X_std, lin_train.y);
  LassoFit lasso;
  double best_val = std::numeric_limits<double>::infinity();
  for (const double frac : {0.001, 0.003, 0.01, 0.03, 0.1}) {
    const LassoFit candidate = nimo::lasso_cd(lin_train.X_std, lin_train.y,
                                              frac * null_penalty);
    const Vector val_pred =
        (lin_val.X_std * candidate.coefficients).array() + candidate.intercept;
    const double val_mse = (val_pred - lin_val.y).squaredNorm() /
                           static_cast<double>(lin_val.y.size());
    if (val_mse < best_val) {
      best_val = val_mse;
      lasso = candidate;
    }
  }
  const Vector lasso_pred = (lin_test.X_std * lasso.coefficients).array() + lasso.intercept;
  const double lasso_mse = (lasso_pred - lin_test.y).squaredNorm() /
                           static_cast<double>(lin_test.y.size());
  CAPTURE(lin_mse);
  CAPTURE(lasso_mse);
  CHECK(lin_mse > 1.5 * lasso_mse);
}

TEST_CASE("baseline network separates the circular classes") {
  const Dataset raw = nimo::generate({nimo::SettingId::Cls1, 300, 0.1, 8});
  const Dataset data = nimo::split(raw, 100, 100, 100, 8);
  TrainConfig cfg;
  cfg.task = Task::Logistic;
  cfg.max_iters = 5000;
  cfg.patience = 1000;
  cfg.seed = 8;
  const nimo::MlpBaselineFit fit = nimo::fit_mlp_baseline(
      data, nimo::make_network_config(3, nimo::OutputRange::Classification, 32, 16), cfg);
  const nimo::SplitView test = nimo::view_of(data, nimo::SplitLabel::Test);
  const Vector prob = nimo::mlp_baseline_predict(fit, test.X_raw);
  int correct = 0;
  for (Eigen::Index i = 0; i < prob.size(); ++i)
    if ((prob[i] >= 0.5) == (test.y[i] >= 0.5)) ++correct;
  CHECK(static_cast<double>(correct) / static_cast<double>(prob.size()) >= 0.75);
}

TEST_CASE("baseline network rejects an empty training split") {
  SeededRng rng(83);
  const Matrix X_raw = random_matrix(rng, 4, 2, -1.0, 1.0);
  const Vector y = Vector::Ones(4);
  Dataset data = make_dataset(X_raw, y, Task::Regression, 4);
  TrainConfig cfg;
  CHECK_THROWS_AS(
      nimo::fit_mlp_baseline(data, nimo::make_network_config(2, nimo::OutputRange::Regression), cfg),
      nimo::InsufficientRowsError);
}
