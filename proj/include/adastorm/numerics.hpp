#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace adastorm {

/// Point / gradient carrier. All library routines work in 64-bit floating point.
using DenseVector = Eigen::VectorXd;
/// Row-major semantics are not assumed anywhere; shapes are (rows x cols).
using DenseMatrix = Eigen::MatrixXd;

/// Sum of squares, computed as dot(v, v) so both agree bit for bit.
double norm_sq(const DenseVector& v);

double dot(const DenseVector& a, const DenseVector& b);

/// Returns a*x + y. Throws std::invalid_argument on a dimension mismatch.
DenseVector axpy(double a, const DenseVector& x, const DenseVector& y);

bool all_finite(const DenseVector& v);

/// Throws std::domain_error naming `what` if v has a NaN/Inf component.
void require_finite(const DenseVector& v, std::string_view what);

/// Counter-based, splittable random stream.
///
/// A stream is identified by a 64-bit key derived from the root seed and the
/// chain of split labels; draw k of a stream is a pure function of (key, k).
/// Splitting never advances the parent, so adding a new consumer under a new
/// label leaves every existing stream untouched.
///
/// Gaussian and uniform transforms are implemented here rather than through
/// <random> distributions, whose outputs are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream split(std::string_view purpose) const;
  RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// Standard normal via Box-Muller.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  RngStream(std::uint64_t key, int /*tag*/) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

/// i.i.d. N(0, sigma^2) components; sigma == 0 yields the zero vector
/// without consuming randomness.
DenseVector gaussian(RngStream& rng, Eigen::Index dim, double sigma);

}  // namespace adastorm
