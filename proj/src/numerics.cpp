#include "adastorm/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace adastorm {

namespace {

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double dot(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  return a.dot(b);
}

double norm_sq(const DenseVector& v) { return v.dot(v); }

DenseVector axpy(double a, const DenseVector& x, const DenseVector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("axpy: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  }
  return a * x + y;
}

bool all_finite(const DenseVector& v) { return v.allFinite(); }

void require_finite(const DenseVector& v, std::string_view what) {
  if (!v.allFinite()) {
    throw std::domain_error(std::string(what) + ": non-finite component");
  }
}

RngStream::RngStream(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

RngStream RngStream::split(std::string_view purpose) const {
  return RngStream(mix64(key_ ^ mix64(fnv1a(purpose))), 0);
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(mix64(key_ + kGolden * (index + 1) + 0x632be59bd9b4e019ULL), 0);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c * kGolden + 0xd1b54a32d192ed03ULL));
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Lemire's multiply-and-reject; unbiased.
  const std::uint64_t range = n;
  std::uint64_t x = next_u64();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<unsigned __int128>(x) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double RngStream::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

DenseVector gaussian(RngStream& rng, Eigen::Index dim, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian: sigma must be nonnegative");
  DenseVector out = DenseVector::Zero(dim);
  if (sigma == 0.0) return out;
  for (Eigen::Index j = 0; j < dim; ++j) out[j] = sigma * rng.normal();
  return out;
}

}  // namespace adastorm
