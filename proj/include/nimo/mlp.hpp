#pragma once

#include <utility>
#include <vector>

#include "nimo/numerics.hpp"

namespace nimo {

enum class OutputRange {
  Regression,      // squash to [-1, 1]
  Classification,  // squash to [-1, 3]
};

/// Shape/behaviour description of the shared correction network.
struct NetworkConfig {
  int input_dim = 0;  // d, number of data features
  int enc_bits = 0;   // floor(log2 d) + 1 positional-encoding bits
  int hidden1 = 32;
  int hidden2 = 16;
  double noise_scale = 0.2;  // stddev multiplier for layer-1 noise (train mode)
  OutputRange output_range = OutputRange::Regression;
  bool train_mode = false;

  int total_inputs() const { return input_dim + enc_bits; }
};

int encode_bits(int d);

NetworkConfig make_network_config(int d, OutputRange range, int hidden1 = 32,
                                  int hidden2 = 16, double noise_scale = 0.2);

/// Three fully-connected layers: tanh after layer 1 (post noise), sin after
/// layer 2, range squash after layer 3.
struct NetworkParams {
  Matrix W1;  // hidden1 x (d + enc_bits)
  Vector b1;  // hidden1
  Matrix W2;  // hidden2 x hidden1
  Vector b2;  // hidden2
  Vector w3;  // hidden2 (single output row)
  double b3 = 0.0;
};

/// Gradients share the parameter layout.
using NetworkGradients = NetworkParams;

NetworkParams zero_params(const NetworkConfig& cfg);

/// Uniform +-1/sqrt(fan_in) weights, zero biases.
NetworkParams init_params(const NetworkConfig& cfg, SeededRng& rng);

/// Big-endian binary expansion of j over floor(log2 d)+1 bits.
/// Throws IndexOutOfRange unless 0 <= j < d.
Vector encode_position(int j, int d);

/// Activation record of one scalar query, exposed for hand-trace tests.
struct ScalarTrace {
  Vector input;      // concat(mask_j(x), enc(j))
  Vector preact1;    // post-noise layer-1 preactivation
  Vector h1;         // tanh
  Vector h2;         // sin of layer-2 preactivation
  double out_raw;    // layer-3 preactivation
  double squashed;   // after range squash
  double baseline;   // squashed pipeline value at the zero input (noise-free)
  double value;      // squashed - baseline
};

/// Correction g(x_{-j}): the masked query is run through the network and the
/// squashed zero-input baseline for the same j is subtracted, so g(0) = 0
/// exactly.  In train mode Gaussian noise (scaled by cfg.noise_scale) is added
/// to the layer-1 preactivation of the query term only; the baseline term is
/// always noise-free, and a query whose masked input is exactly zero skips the
/// noise as well so the constraint survives training mode.
double forward_one(const NetworkParams& params, const NetworkConfig& cfg,
                   const Vector& x, int j, SeededRng rng);

ScalarTrace forward_one_traced(const NetworkParams& params, const NetworkConfig& cfg,
                               const Vector& x, int j, SeededRng rng);

/// Per-feature activation caches for one forward_matrix pass.
struct ColumnCache {
  Matrix h1;       // n x hidden1
  Matrix cos_z2;   // n x hidden2
  Matrix h2;       // n x hidden2
  Vector t3;       // n, tanh of layer-3 preactivation
  Vector h1_0;     // baseline activations (single zero-input query)
  Vector cos_z2_0;
  Vector h2_0;
  double t3_0 = 0.0;
};

struct ForwardCache {
  NetworkConfig cfg;
  NetworkParams params;  // snapshot used by the backward pass
  Matrix X;              // n x d inputs of the pass
  std::vector<ColumnCache> cols;
};

/// G[i][j] = forward_one(params, cfg, X.row(i), j).  Noise streams are derived
/// per (i, j) from `rng`, so evaluation order cannot change the result.
std::pair<Matrix, ForwardCache> forward_matrix(const NetworkParams& params,
                                               const NetworkConfig& cfg,
                                               const Matrix& X, const SeededRng& rng);

/// Exact reverse-mode gradients for the pass recorded in `cache`, including
/// the path through the subtracted zero-baseline term.
NetworkGradients backward(const ForwardCache& cache, const Matrix& upstream);

/// lambda_group * sum_j ||W1 column j||_2 over the d data-feature columns
/// (positional-encoding columns are exempt).  Returns the subgradient as well;
/// a zero column contributes a zero gradient block.
std::pair<double, NetworkGradients> group_penalty(const NetworkParams& params,
                                                  const NetworkConfig& cfg,
                                                  double lambda_group);

/// Euclidean norms of the d data-feature columns of W1.
Vector first_layer_column_norms(const NetworkParams& params, const NetworkConfig& cfg);

}  // namespace nimo
