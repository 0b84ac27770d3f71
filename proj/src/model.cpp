#include "nimo/model.hpp"

#include <cmath>
#include <fstream>

namespace nimo {

Matrix design_matrix(const NetworkParams& params, const NetworkConfig& cfg,
                     const Matrix& X, const SeededRng& rng) {
  auto [G, cache] = forward_matrix(params, cfg, X, rng);
  return X + X.cwiseProduct(G);
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector sigmoid(const Vector& z) {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = sigmoid(z(i));
  return out;
}

Vector linear_predictor(const FittedModel& model, const Matrix& X_raw) {
  if (X_raw.cols() != model.beta.size()) {
    throw DimensionMismatchError("predict: input width does not match model");
  }
  const Matrix X = apply_standardization(X_raw, model.stats);
  NetworkConfig cfg = model.cfg;
  cfg.train_mode = false;
  const Matrix B = design_matrix(model.params, cfg, X, SeededRng(0));
  return (B * model.beta).array() + model.beta0;
}

Vector predict(const FittedModel& model, const Matrix& X_raw) {
  Vector eta = linear_predictor(model, X_raw);
  return model.task == Task::Logistic ? sigmoid(eta) : eta;
}

Matrix effective_coefficients(const FittedModel& model, const Matrix& X_raw) {
  if (X_raw.cols() != model.beta.size()) {
    throw DimensionMismatchError("effective_coefficients: input width does not match model");
  }
  const Matrix X = apply_standardization(X_raw, model.stats);
  NetworkConfig cfg = model.cfg;
  cfg.train_mode = false;
  auto [G, cache] = forward_matrix(model.params, cfg, X, SeededRng(0));
  Matrix E = (1.0 + G.array()).matrix();
  E.array().rowwise() *= model.beta.transpose().array();
  return E;
}

Vector raw_coefficients(const FittedModel& model) {
  return model.beta.cwiseQuotient(model.stats.stddevs);
}

namespace {

nlohmann::ordered_json matrix_to_json(const Matrix& M) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& doc) {
  const auto rows = doc.size();
  const auto cols = rows == 0 ? 0 : doc.at(0).size();
  Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (doc.at(i).size() != cols) throw Error("matrix_from_json: ragged rows");
    for (std::size_t j = 0; j < cols; ++j) {
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = doc.at(i).at(j);
    }
  }
  return M;
}

nlohmann::ordered_json vector_to_json(const Vector& v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const nlohmann::json& doc) {
  Vector v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) v(static_cast<Eigen::Index>(i)) = doc.at(i);
  return v;
}

}  // namespace

nlohmann::ordered_json params_to_json(const NetworkParams& params, const NetworkConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["config"] = {
      {"input_dim", cfg.input_dim},
      {"enc_bits", cfg.enc_bits},
      {"hidden1", cfg.hidden1},
      {"hidden2", cfg.hidden2},
      {"noise_scale", cfg.noise_scale},
      {"output_range", cfg.output_range == OutputRange::Regression ? "regression"
                                                                   : "classification"},
  };
  doc["w1"] = matrix_to_json(params.W1);
  doc["b1"] = vector_to_json(params.b1);
  doc["w2"] = matrix_to_json(params.W2);
  doc["b2"] = vector_to_json(params.b2);
  doc["w3"] = vector_to_json(params.w3);
  doc["b3"] = params.b3;
  return doc;
}

std::pair<NetworkParams, NetworkConfig> params_from_json(const nlohmann::json& doc) {
  const auto& c = doc.at("config");
  NetworkConfig cfg = make_network_config(
      c.at("input_dim").get<int>(),
      c.at("output_range").get<std::string>() == "classification"
          ? OutputRange::Classification
          : OutputRange::Regression,
      c.at("hidden1").get<int>(), c.at("hidden2").get<int>(),
      c.at("noise_scale").get<double>());
  if (cfg.enc_bits != c.at("enc_bits").get<int>()) {
    throw Error("params_from_json: stored enc_bits disagrees with input_dim");
  }
  NetworkParams p;
  p.W1 = matrix_from_json(doc.at("w1"));
  p.b1 = vector_from_json(doc.at("b1"));
  p.W2 = matrix_from_json(doc.at("w2"));
  p.b2 = vector_from_json(doc.at("b2"));
  p.w3 = vector_from_json(doc.at("w3"));
  p.b3 = doc.at("b3").get<double>();
  return {std::move(p), cfg};
}

nlohmann::ordered_json model_to_json(const FittedModel& model) {
  nlohmann::ordered_json doc;
  doc["beta0"] = model.beta0;
  doc["beta"] = vector_to_json(model.beta);
  doc["network"] = params_to_json(model.params, model.cfg);
  doc["stats"] = {{"means", vector_to_json(model.stats.means)},
                  {"stddevs", vector_to_json(model.stats.stddevs)}};
  doc["task"] = model.task == Task::Regression ? "regression" : "logistic";
  return doc;
}

FittedModel model_from_json(const nlohmann::json& doc) {
  FittedModel model;
  model.beta0 = doc.at("beta0").get<double>();
  model.beta = vector_from_json(doc.at("beta"));
  auto [params, cfg] = params_from_json(doc.at("network"));
  model.params = std::move(params);
  model.cfg = cfg;
  model.stats.means = vector_from_json(doc.at("stats").at("means"));
  model.stats.stddevs = vector_from_json(doc.at("stats").at("stddevs"));
  model.task =
      doc.at("task").get<std::string>() == "logistic" ? Task::Logistic : Task::Regression;
  if (model.beta.size() != model.cfg.input_dim ||
      model.stats.means.size() != model.cfg.input_dim) {
    throw Error("model_from_json: inconsistent dimensions");
  }
  return model;
}

void save_model(const FittedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_model: cannot open " + path);
  out << model_to_json(model).dump(2) << "\n";
}

FittedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_model: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  return model_from_json(doc);
}

}  // namespace nimo
