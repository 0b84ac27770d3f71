#include "nimo/mlp.hpp"

#include <cmath>

namespace nimo {

namespace {

double squash(double z, OutputRange range) {
  const double t = std::tanh(z);
  return range == OutputRange::Regression ? t : 1.0 + 2.0 * t;
}

// derivative of the squash expressed through t = tanh(z)
double squash_prime_from_tanh(double t, OutputRange range) {
  const double d = 1.0 - t * t;
  return range == OutputRange::Regression ? d : 2.0 * d;
}

void check_shapes(const NetworkParams& p, const NetworkConfig& cfg) {
  const bool ok = p.W1.rows() == cfg.hidden1 && p.W1.cols() == cfg.total_inputs() &&
                  p.b1.size() == cfg.hidden1 && p.W2.rows() == cfg.hidden2 &&
                  p.W2.cols() == cfg.hidden1 && p.b2.size() == cfg.hidden2 &&
                  p.w3.size() == cfg.hidden2;
  if (!ok) throw DimensionMismatchError("network parameters do not match config");
}

}  // namespace

int encode_bits(int d) {
  if (d < 1) throw Error("encode_bits: d must be positive");
  int bits = 1;
  while ((1 << bits) <= d) ++bits;  // bits = floor(log2 d) + 1
  return bits;
}

NetworkConfig make_network_config(int d, OutputRange range, int hidden1, int hidden2,
                                  double noise_scale) {
  if (d < 1 || hidden1 < 1 || hidden2 < 1 || noise_scale < 0.0) {
    throw Error("make_network_config: invalid dimensions or noise scale");
  }
  NetworkConfig cfg;
  cfg.input_dim = d;
  cfg.enc_bits = encode_bits(d);
  cfg.hidden1 = hidden1;
  cfg.hidden2 = hidden2;
  cfg.noise_scale = noise_scale;
  cfg.output_range = range;
  cfg.train_mode = false;
  return cfg;
}

NetworkParams zero_params(const NetworkConfig& cfg) {
  NetworkParams p;
  p.W1 = Matrix::Zero(cfg.hidden1, cfg.total_inputs());
  p.b1 = Vector::Zero(cfg.hidden1);
  p.W2 = Matrix::Zero(cfg.hidden2, cfg.hidden1);
  p.b2 = Vector::Zero(cfg.hidden2);
  p.w3 = Vector::Zero(cfg.hidden2);
  p.b3 = 0.0;
  return p;
}

NetworkParams init_params(const NetworkConfig& cfg, SeededRng& rng) {
  NetworkParams p = zero_params(cfg);
  auto fill = [&rng](Eigen::Ref<Matrix> W, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = rng.uniform(-bound, bound);
  };
  fill(p.W1, cfg.total_inputs());
  fill(p.W2, cfg.hidden1);
  Matrix w3 = Matrix::Zero(1, cfg.hidden2);
  fill(w3, cfg.hidden2);
  p.w3 = w3.row(0).transpose();
  return p;
}

Vector encode_position(int j, int d) {
  if (j < 0 || j >= d) throw IndexOutOfRangeError("encode_position: feature index out of range");
  const int bits = encode_bits(d);
  Vector enc(bits);
  for (int b = 0; b < bits; ++b) {
    enc(b) = static_cast<double>((j >> (bits - 1 - b)) & 1);
  }
  return enc;
}

ScalarTrace forward_one_traced(const NetworkParams& params, const NetworkConfig& cfg,
                               const Vector& x, int j, SeededRng rng) {
  check_shapes(params, cfg);
  if (x.size() != cfg.input_dim) throw DimensionMismatchError("forward_one: bad input length");
  if (!x.allFinite()) throw NonFiniteError("forward_one: non-finite input");
  if (j < 0 || j >= cfg.input_dim) throw IndexOutOfRangeError("forward_one: feature index");

  Vector masked = x;
  masked(j) = 0.0;
  const Vector enc = encode_position(j, cfg.input_dim);

  ScalarTrace tr;
  tr.input = Vector(cfg.total_inputs());
  tr.input << masked, enc;

  tr.preact1 = params.W1 * tr.input + params.b1;
  const bool add_noise =
      cfg.train_mode && cfg.noise_scale > 0.0 && !masked.isZero(0.0);
  if (add_noise) {
    for (Eigen::Index k = 0; k < tr.preact1.size(); ++k) {
      tr.preact1(k) += cfg.noise_scale * rng.normal();
    }
  }
  tr.h1 = tr.preact1.array().tanh();
  tr.h2 = (params.W2 * tr.h1 + params.b2).array().sin();
  tr.out_raw = params.w3.dot(tr.h2) + params.b3;
  tr.squashed = squash(tr.out_raw, cfg.output_range);

  // zero-input baseline for the same position, always noise-free
  Vector base_in = Vector::Zero(cfg.total_inputs());
  base_in.tail(cfg.enc_bits) = enc;
  const Vector h1_0 = (params.W1 * base_in + params.b1).array().tanh();
  const Vector h2_0 = (params.W2 * h1_0 + params.b2).array().sin();
  tr.baseline = squash(params.w3.dot(h2_0) + params.b3, cfg.output_range);

  tr.value = tr.squashed - tr.baseline;
  if (!std::isfinite(tr.value)) throw NonFiniteError("forward_one: overflow");
  return tr;
}

double forward_one(const NetworkParams& params, const NetworkConfig& cfg, const Vector& x,
                   int j, SeededRng rng) {
  return forward_one_traced(params, cfg, x, j, std::move(rng)).value;
}

std::pair<Matrix, ForwardCache> forward_matrix(const NetworkParams& params,
                                               const NetworkConfig& cfg, const Matrix& X,
                                               const SeededRng& rng) {
  check_shapes(params, cfg);
  if (X.cols() != cfg.input_dim) throw DimensionMismatchError("forward_matrix: bad X width");
  if (!X.allFinite()) throw NonFiniteError("forward_matrix: non-finite input");

  const Eigen::Index n = X.rows();
  const int d = cfg.input_dim;
  const auto W1d = params.W1.leftCols(d);
  const auto W1e = params.W1.rightCols(cfg.enc_bits);

  ForwardCache cache;
  cache.cfg = cfg;
  cache.params = params;
  cache.X = X;
  cache.cols.resize(static_cast<std::size_t>(d));

  Matrix G(n, d);
  // layer-1 data contribution is shared across positions: masking feature j
  // only removes a rank-1 term
  const Matrix shared = X * W1d.transpose();  // n x hidden1
  const bool noisy = cfg.train_mode && cfg.noise_scale > 0.0;
  auto masked_row_is_zero = [&X, d](Eigen::Index i, int j) {
    for (int k = 0; k < d; ++k) {
      if (k != j && X(i, k) != 0.0) return false;
    }
    return true;
  };

  for (int j = 0; j < d; ++j) {
    ColumnCache& col = cache.cols[static_cast<std::size_t>(j)];
    const Vector enc = encode_position(j, d);
    const Vector offset = W1e * enc + params.b1;  // per-position constant

    Matrix z1 = shared - X.col(j) * W1d.col(j).transpose();
    z1.rowwise() += offset.transpose();
    if (noisy) {
      for (Eigen::Index i = 0; i < n; ++i) {
        // a query whose masked input is exactly zero stays noise-free so the
        // zero-baseline constraint is exact even in train mode
        if (masked_row_is_zero(i, j)) continue;
        SeededRng cell = rng.fork(static_cast<std::uint64_t>(i) * d + j);
        for (int k = 0; k < cfg.hidden1; ++k) {
          z1(i, k) += cfg.noise_scale * cell.normal();
        }
      }
    }
    col.h1 = z1.array().tanh();
    Matrix z2 = col.h1 * params.W2.transpose();
    z2.rowwise() += params.b2.transpose();
    col.cos_z2 = z2.array().cos();
    col.h2 = z2.array().sin();
    col.t3 = ((col.h2 * params.w3).array() + params.b3).tanh();

    col.h1_0 = offset.array().tanh();
    Vector z2_0 = params.W2 * col.h1_0 + params.b2;
    col.cos_z2_0 = z2_0.array().cos();
    col.h2_0 = z2_0.array().sin();
    col.t3_0 = std::tanh(params.w3.dot(col.h2_0) + params.b3);

    const double scale = cfg.output_range == OutputRange::Regression ? 1.0 : 2.0;
    G.col(j) = scale * (col.t3.array() - col.t3_0);
    // a zero masked input makes both terms identical by definition; pin the
    // cancellation so the g(0) = 0 guarantee is exact rather than roundoff
    for (Eigen::Index i = 0; i < n; ++i) {
      if (masked_row_is_zero(i, j)) G(i, j) = 0.0;
    }
  }
  if (!G.allFinite()) throw NonFiniteError("forward_matrix: overflow");
  return {std::move(G), std::move(cache)};
}

NetworkGradients backward(const ForwardCache& cache, const Matrix& upstream) {
  const NetworkConfig& cfg = cache.cfg;
  const NetworkParams& params = cache.params;
  if (upstream.rows() != cache.X.rows() || upstream.cols() != cfg.input_dim ||
      cache.cols.size() != static_cast<std::size_t>(cfg.input_dim)) {
    throw StaleCacheError("backward: cache does not match upstream shape");
  }

  const int d = cfg.input_dim;
  NetworkGradients g = zero_params(cfg);
  auto gW1d = g.W1.leftCols(d);
  auto gW1e = g.W1.rightCols(cfg.enc_bits);

  Matrix dz1_sum = Matrix::Zero(cache.X.rows(), cfg.hidden1);
  Matrix rank1_fix = Matrix::Zero(cfg.hidden1, d);

  for (int j = 0; j < d; ++j) {
    const ColumnCache& col = cache.cols[static_cast<std::size_t>(j)];
    const Vector enc = encode_position(j, d);
    const Vector up = upstream.col(j);

    // query term
    Vector dz3 = up.array() *
                 col.t3.array().unaryExpr([&cfg](double t) {
                   return squash_prime_from_tanh(t, cfg.output_range);
                 });
    g.w3 += col.h2.transpose() * dz3;
    g.b3 += dz3.sum();
    Matrix dz2 = (dz3 * params.w3.transpose()).cwiseProduct(col.cos_z2);
    g.W2 += dz2.transpose() * col.h1;
    g.b2 += dz2.colwise().sum().transpose();
    Matrix dz1 = (dz2 * params.W2).cwiseProduct(
        (1.0 - col.h1.array().square()).matrix());
    dz1_sum += dz1;
    rank1_fix.col(j) = dz1.transpose() * cache.X.col(j);
    const Vector dz1_cols = dz1.colwise().sum().transpose();
    gW1e += dz1_cols * enc.transpose();
    g.b1 += dz1_cols;

    // subtracted baseline term (shared by every row of the column)
    const double w0 = -up.sum();
    const double dz3_0 = w0 * squash_prime_from_tanh(col.t3_0, cfg.output_range);
    g.w3 += dz3_0 * col.h2_0;
    g.b3 += dz3_0;
    Vector dz2_0 = (dz3_0 * params.w3).cwiseProduct(col.cos_z2_0);
    g.W2 += dz2_0 * col.h1_0.transpose();
    g.b2 += dz2_0;
    Vector dz1_0 = (params.W2.transpose() * dz2_0)
                       .cwiseProduct((1.0 - col.h1_0.array().square()).matrix());
    gW1e += dz1_0 * enc.transpose();
    g.b1 += dz1_0;
    // the baseline's data inputs are all zero, so W1 data columns get nothing
  }
  gW1d += dz1_sum.transpose() * cache.X - rank1_fix;
  return g;
}

std::pair<double, NetworkGradients> group_penalty(const NetworkParams& params,
                                                  const NetworkConfig& cfg,
                                                  double lambda_group) {
  check_shapes(params, cfg);
  if (lambda_group < 0.0) throw Error("group_penalty: lambda_group must be non-negative");
  NetworkGradients g = zero_params(cfg);
  double value = 0.0;
  for (int j = 0; j < cfg.input_dim; ++j) {
    const double norm = params.W1.col(j).norm();
    value += norm;
    if (norm > 0.0) {
      g.W1.col(j) = lambda_group * params.W1.col(j) / norm;
    }
  }
  return {lambda_group * value, std::move(g)};
}

Vector first_layer_column_norms(const NetworkParams& params, const NetworkConfig& cfg) {
  check_shapes(params, cfg);
  Vector norms(cfg.input_dim);
  for (int j = 0; j < cfg.input_dim; ++j) norms(j) = params.W1.col(j).norm();
  return norms;
}

}  // namespace nimo
