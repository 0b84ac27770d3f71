#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "nimo/model.hpp"

using nimo::FittedModel;
using nimo::Matrix;
using nimo::NetworkConfig;
using nimo::NetworkParams;
using nimo::OutputRange;
using nimo::SeededRng;
using nimo::Task;
using nimo::Vector;

namespace {

Matrix random_matrix(SeededRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = rng.normal();
  return M;
}

/// Identity standardization so raw inputs pass through unchanged.
nimo::StandardizationStats identity_stats(int d) {
  nimo::StandardizationStats s;
  s.means = Vector::Zero(d);
  s.stddevs = Vector::Ones(d);
  return s;
}

FittedModel random_model(int d, Task task, SeededRng& rng) {
  FittedModel m;
  m.cfg = nimo::make_network_config(d, task == Task::Logistic ? OutputRange::Classification
                                                              : OutputRange::Regression,
                                    6, 4, 0.2);
  m.params = nimo::init_params(m.cfg, rng);
  m.beta = random_matrix(rng, d, 1).col(0);
  m.beta0 = rng.normal();
  m.stats = identity_stats(d);
  m.task = task;
  return m;
}

}  // namespace

TEST_CASE("design_matrix reduces to X for a zero network") {
  NetworkConfig cfg = nimo::make_network_config(3, OutputRange::Regression, 4, 4, 0.0);
  NetworkParams zero = nimo::zero_params(cfg);
  SeededRng rng(1);
  Matrix X = random_matrix(rng, 5, 3);
  Matrix B = nimo::design_matrix(zero, cfg, X, rng);
  CHECK((B - X).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("design_matrix matches an entrywise scalar recomputation") {
  NetworkConfig cfg = nimo::make_network_config(3, OutputRange::Regression, 5, 4, 0.0);
  SeededRng rng(2);
  NetworkParams p = nimo::init_params(cfg, rng);
  Matrix X = random_matrix(rng, 4, 3);
  Matrix B = nimo::design_matrix(p, cfg, X, rng);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double g = nimo::forward_one(p, cfg, X.row(i).transpose(), j, SeededRng(0));
      CHECK(B(i, j) == doctest::Approx(X(i, j) * (1.0 + g)).epsilon(1e-12));
    }
  }
}

TEST_CASE("predict with a zero network is the plain linear model") {
  FittedModel m;
  m.cfg = nimo::make_network_config(2, OutputRange::Regression, 3, 3, 0.0);
  m.params = nimo::zero_params(m.cfg);
  m.beta = Vector(2);
  m.beta << 2.0, 0.0;
  m.beta0 = 1.0;
  m.stats = identity_stats(2);
  m.task = Task::Regression;

  Matrix X(1, 2);
  X << 3.0, 7.0;
  Vector yhat = nimo::predict(m, X);
  CHECK(yhat(0) == doctest::Approx(7.0).epsilon(1e-14));

  SeededRng rng(3);
  Matrix R = random_matrix(rng, 10, 2);
  Vector got = nimo::predict(m, R);
  Vector want = (R * m.beta).array() + m.beta0;
  CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("predict at the feature means returns the intercept exactly") {
  SeededRng rng(4);
  FittedModel m = random_model(3, Task::Regression, rng);
  m.stats.means = Vector(3);
  m.stats.means << 1.5, -2.0, 0.25;
  m.stats.stddevs = Vector(3);
  m.stats.stddevs << 0.5, 2.0, 1.25;
  Matrix X = m.stats.means.transpose();
  Vector yhat = nimo::predict(m, X);
  CHECK(yhat(0) == m.beta0);
}

TEST_CASE("baseline interpretability: single active feature contributes beta_j * x_j") {
  SeededRng rng(5);
  FittedModel m = random_model(4, Task::Regression, rng);
  Matrix zero = Matrix::Zero(1, 4);
  const double at_zero = nimo::predict(m, zero)(0);
  CHECK(at_zero == m.beta0);
  for (int j = 0; j < 4; ++j) {
    for (double xj : {1.0, -0.7, 2.5}) {
      Matrix X = Matrix::Zero(1, 4);
      X(0, j) = xj;
      const double pred = nimo::predict(m, X)(0);
      CHECK(pred - at_zero == doctest::Approx(m.beta(j) * xj).epsilon(1e-14));
    }
  }
}

TEST_CASE("logistic predict returns probabilities of the linear predictor") {
  SeededRng rng(6);
  FittedModel m = random_model(3, Task::Logistic, rng);
  Matrix X = random_matrix(rng, 8, 3);
  Vector eta = nimo::linear_predictor(m, X);
  Vector prob = nimo::predict(m, X);
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(prob(i) == doctest::Approx(1.0 / (1.0 + std::exp(-eta(i)))).epsilon(1e-12));
    CHECK(prob(i) > 0.0);
    CHECK(prob(i) < 1.0);
  }
}

TEST_CASE("sigmoid is stable at extreme arguments") {
  CHECK(nimo::sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(nimo::sigmoid(800.0) == doctest::Approx(1.0));
  CHECK(nimo::sigmoid(-800.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(nimo::sigmoid(800.0)));
  CHECK(std::isfinite(nimo::sigmoid(-800.0)));
}

TEST_CASE("effective_coefficients: zero network rows equal beta; identity holds") {
  SeededRng rng(7);
  FittedModel m = random_model(3, Task::Regression, rng);
  m.params = nimo::zero_params(m.cfg);
  Matrix X = random_matrix(rng, 6, 3);
  Matrix E = nimo::effective_coefficients(m, X);
  for (Eigen::Index i = 0; i < 6; ++i) {
    CHECK((E.row(i).transpose() - m.beta).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("effective_coefficients reconstruction identity within 1e-10") {
  SeededRng rng(8);
  for (Task task : {Task::Regression, Task::Logistic}) {
    FittedModel m = random_model(5, task, rng);
    Matrix X = random_matrix(rng, 20, 5);
    Matrix E = nimo::effective_coefficients(m, X);
    Vector eta = nimo::linear_predictor(m, X);
    const Matrix Xs = nimo::apply_standardization(X, m.stats);
    for (Eigen::Index i = 0; i < 20; ++i) {
      const double recon = (E.row(i).array() * Xs.row(i).array()).sum() + m.beta0;
      CHECK(std::abs(recon - eta(i)) <= 1e-10);
    }
  }
}

TEST_CASE("predict validates input width") {
  SeededRng rng(9);
  FittedModel m = random_model(3, Task::Regression, rng);
  Matrix X = Matrix::Zero(2, 4);
  CHECK_THROWS_AS((void)nimo::predict(m, X), nimo::DimensionMismatchError);
  CHECK_THROWS_AS((void)nimo::effective_coefficients(m, X), nimo::DimensionMismatchError);
}

TEST_CASE("raw_coefficients rescales by the stored stddevs") {
  SeededRng rng(10);
  FittedModel m = random_model(2, Task::Regression, rng);
  m.stats.stddevs << 2.0, 0.5;
  m.beta << 4.0, 1.0;
  Vector raw = nimo::raw_coefficients(m);
  CHECK(raw(0) == doctest::Approx(2.0));
  CHECK(raw(1) == doctest::Approx(2.0));
}

TEST_CASE("model JSON round trip preserves predictions bit-for-bit") {
  SeededRng rng(11);
  for (Task task : {Task::Regression, Task::Logistic}) {
    FittedModel m = random_model(4, task, rng);
    m.stats.means = random_matrix(rng, 4, 1).col(0);
    m.stats.stddevs = (random_matrix(rng, 4, 1).col(0).array().abs() + 0.5).matrix();

    const auto path = std::filesystem::temp_directory_path() /
                      ("nimo_model_" + std::to_string(static_cast<int>(task)) + ".json");
    nimo::save_model(m, path.string());
    FittedModel loaded = nimo::load_model(path.string());
    std::filesystem::remove(path);

    CHECK(loaded.beta0 == m.beta0);
    CHECK((loaded.beta - m.beta).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.params.W1 - m.params.W1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(loaded.task == m.task);

    Matrix X = random_matrix(rng, 7, 4);
    Vector a = nimo::predict(m, X);
    Vector b = nimo::predict(loaded, X);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("params_from_json rejects inconsistent encoding width") {
  SeededRng rng(12);
  NetworkConfig cfg = nimo::make_network_config(5, OutputRange::Regression, 3, 3, 0.1);
  NetworkParams p = nimo::init_params(cfg, rng);
  auto doc = nimo::params_to_json(p, cfg);
  doc["config"]["enc_bits"] = 7;
  CHECK_THROWS_AS((void)nimo::params_from_json(doc), nimo::Error);
}
