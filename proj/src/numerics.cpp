#include "nimo/numerics.hpp"

#include <cmath>
#include <numbers>

namespace nimo {

std::pair<Matrix, StandardizationStats> standardize(const Matrix& X) {
  if (!X.allFinite()) throw NonFiniteError("standardize: input contains NaN or inf");
  const auto n = static_cast<double>(X.rows());
  StandardizationStats stats;
  stats.means = X.colwise().mean();
  Matrix centered = X.rowwise() - stats.means.transpose();
  // population convention: divide by n, not n-1
  stats.stddevs = (centered.array().square().colwise().sum() / n).sqrt();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (stats.stddevs(j) <= 0.0) throw ConstantColumnError(static_cast<std::size_t>(j));
  }
  centered.array().rowwise() /= stats.stddevs.transpose().array();
  return {std::move(centered), std::move(stats)};
}

Matrix apply_standardization(const Matrix& X, const StandardizationStats& stats) {
  if (X.cols() != stats.means.size()) {
    throw DimensionMismatchError("apply_standardization: column count does not match stats");
  }
  Matrix out = X.rowwise() - stats.means.transpose();
  out.array().rowwise() /= stats.stddevs.transpose().array();
  return out;
}

namespace {

bool residual_ok(const Matrix& A, const Vector& x, const Vector& b) {
  const double resid = (A * x - b).cwiseAbs().maxCoeff();
  return resid / (1.0 + b.cwiseAbs().maxCoeff()) <= 1e-8;
}

}  // namespace

Vector solve_spd(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw DimensionMismatchError("solve_spd: A must be square and conformable with b");
  }
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(b);
    if (residual_ok(A, x, b)) return x;
  }
  // escalate jitter 1e-10 .. 1e-6
  for (double eps = 1e-10; eps <= 1e-6 * (1.0 + 1e-12); eps *= 10.0) {
    Matrix jittered = A;
    jittered.diagonal().array() += eps;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) continue;
    Vector x = llt.solve(b);
    if (residual_ok(A, x, b)) return x;
  }
  throw NotSpdError("solve_spd: matrix is not positive definite (jitter escalation exhausted)");
}

Vector ridge_closed_form(const Matrix& B, const Vector& y, double lambda) {
  if (B.rows() != y.size()) {
    throw DimensionMismatchError("ridge_closed_form: rows of B must match length of y");
  }
  if (lambda < 0.0) throw Error("ridge_closed_form: lambda must be non-negative");
  Matrix gram = B.transpose() * B;
  gram.diagonal().array() += lambda;
  const Vector rhs = B.transpose() * y;
  if (lambda == 0.0) {
    // unpenalized: demand a genuinely positive definite Gram matrix
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
      throw NotSpdError("ridge_closed_form: rank-deficient design with lambda = 0");
    }
    return llt.solve(rhs);
  }
  return solve_spd(gram, rhs);
}

namespace {

// splitmix64 finalizer (Vigna); also used to mix seeds and stream indices.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(mix64(seed) ^ mix64(~stream))) {}

SeededRng SeededRng::fork(std::uint64_t index) const {
  SeededRng child;
  child.state_ = mix64(state_ ^ mix64(index + 0x632be59bd9b4e019ULL));
  return child;
}

std::uint64_t SeededRng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is kept away from 0 so the log is finite
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<std::size_t> SeededRng::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform() * static_cast<double>(i));
    std::swap(idx[i - 1], idx[j < i ? j : i - 1]);
  }
  return idx;
}

}  // namespace nimo
