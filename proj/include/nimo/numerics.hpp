#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "nimo/errors.hpp"

namespace nimo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-column location/scale computed from a reference sample (population
/// convention, i.e. variance divided by n).
struct StandardizationStats {
  Vector means;
  Vector stddevs;  // strictly positive
};

/// Column-wise standardization: returns (X - mean) / stddev together with the
/// stats needed to map new data into the same coordinates.
/// Throws ConstantColumnError for zero-variance columns, NonFiniteError on
/// NaN/inf input.
std::pair<Matrix, StandardizationStats> standardize(const Matrix& X);

/// Applies previously computed stats to new rows (e.g. validation/test data).
Matrix apply_standardization(const Matrix& X, const StandardizationStats& stats);

/// Solves A x = b for symmetric positive definite A via Cholesky.
/// If the factorization fails, retries with jitter A + eps*I escalating from
/// 1e-10 to 1e-6 (factor 10 per retry, 5 retries); throws NotSpdError when the
/// escalation is exhausted or the solution fails the residual check
/// ||Ax-b||_inf / (1+||b||_inf) <= 1e-8.
Vector solve_spd(const Matrix& A, const Vector& b);

/// Ridge estimate beta = (B'B + lambda I)^{-1} B' y.
/// With lambda = 0 the Gram matrix must be strictly positive definite; a
/// rank-deficient design raises NotSpdError (no jitter is applied in that
/// case, since silently regularizing an unpenalized solve would mask a
/// modelling error).
Vector ridge_closed_form(const Matrix& B, const Vector& y, double lambda);

/// Deterministic counter-based random source.  A (seed, stream) pair fully
/// determines the sequence, and fork() derives statistically independent
/// child streams without consuming parent state, so noise consumers can be
/// evaluated in any order.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Child stream addressed by index; does not advance this generator.
  SeededRng fork(std::uint64_t index) const;

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (pairs are cached, so draws come in a
  /// fixed deterministic order).
  double normal();

  /// Fisher-Yates shuffle of [0, n); used for reproducible data splits.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  SeededRng() = default;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nimo
