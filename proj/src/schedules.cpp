#include "adastorm/schedules.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adastorm {

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0 / 3.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1/3), got " + std::to_string(alpha));
  }
}

double ada_lr(double horizon, double alpha, double sum_sq) {
  if (!(horizon >= 1.0)) throw std::invalid_argument("ada_lr: horizon must be >= 1");
  validate_alpha(alpha);
  if (!(sum_sq >= 0.0)) throw std::invalid_argument("ada_lr: sum_sq must be >= 0");
  const double first = std::pow(horizon, -1.0 / 3.0);
  if (sum_sq == 0.0) return first;
  const double second = std::pow(horizon, -(1.0 - alpha) / 3.0) * std::pow(sum_sq, -alpha);
  return std::min(first, second);
}

double ada_beta(double horizon) {
  if (!(horizon >= 1.0)) throw std::invalid_argument("ada_beta: horizon must be >= 1");
  return std::min(1.0, std::pow(horizon, -2.0 / 3.0));
}

std::uint64_t stage_length(std::uint64_t t) {
  if (t < 1) throw std::invalid_argument("stage_length: t must be >= 1");
  return std::bit_floor(t);
}

DoublingParams doubling_params(std::uint64_t t, double alpha, double stage_sum_sq) {
  const std::uint64_t stage = stage_length(t);
  const auto len = static_cast<double>(stage);
  return DoublingParams{ada_lr(len, alpha, stage_sum_sq), ada_beta(len), stage, stage == t};
}

double finite_sum_lr(std::uint64_t n, double alpha, double sum_sq) {
  if (n < 1) throw std::invalid_argument("finite_sum_lr: n must be >= 1");
  validate_alpha(alpha);
  if (!(sum_sq >= 0.0)) throw std::invalid_argument("finite_sum_lr: sum_sq must be >= 0");
  const double s = std::max(sum_sq, kFiniteSumFloor);
  return std::pow(static_cast<double>(n), -(1.0 - alpha) / 2.0) * std::pow(s, -alpha);
}

double finite_sum_beta(std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("finite_sum_beta: n must be >= 1");
  return 1.0 / static_cast<double>(n);
}

StormOriginalParams storm_original_params(double k, double w, double c,
                                          double grad_norm_sum_sq) {
  if (!(k > 0.0 && w > 0.0 && c > 0.0)) {
    throw std::invalid_argument("storm_original_params: k, w, c must be positive");
  }
  const double eta = k / std::cbrt(w + grad_norm_sum_sq);
  return StormOriginalParams{eta, std::min(1.0, c * eta * eta)};
}

std::uint64_t initial_batch_size(std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("initial_batch_size: horizon must be >= 1");
  auto b = static_cast<std::uint64_t>(std::llround(std::cbrt(static_cast<double>(horizon))));
  while (b * b * b < horizon) ++b;
  while (b > 1 && (b - 1) * (b - 1) * (b - 1) >= horizon) --b;
  return b;
}

}  // namespace adastorm
