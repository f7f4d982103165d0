#pragma once

#include <cstdint>

namespace adastorm {

// Step-size / momentum laws. All functions are pure; the running sums they
// consume are owned by the optimizer loops.

inline constexpr double kDefaultAlpha = 0.3;
/// Sums below this are treated as this value by the finite-sum rate.
inline constexpr double kFiniteSumFloor = 1e-30;

/// Throws std::invalid_argument unless 0 < alpha < 1/3.
void validate_alpha(double alpha);

/// eta = min{ T^(-1/3), T^(-(1-alpha)/3) * sum_sq^(-alpha) }; sum_sq == 0
/// selects the first branch.
double ada_lr(double horizon, double alpha, double sum_sq);

/// beta = T^(-2/3), never above 1.
double ada_beta(double horizon);

struct DoublingParams {
  double eta;
  double beta;
  std::uint64_t stage_length;  ///< I_t = 2^floor(log2 t)
  bool stage_reset;            ///< t is a power of two: the stage sum restarts here
};

/// Largest power of two not exceeding t (t >= 1).
std::uint64_t stage_length(std::uint64_t t);

/// `stage_sum_sq` is sum of ||v_i||^2 for i = I_t .. t.
DoublingParams doubling_params(std::uint64_t t, double alpha, double stage_sum_sq);

/// eta = n^(-(1-alpha)/2) * max(sum_sq, kFiniteSumFloor)^(-alpha).
double finite_sum_lr(std::uint64_t n, double alpha, double sum_sq);

/// beta = 1/n.
double finite_sum_beta(std::uint64_t n);

struct StormOriginalParams {
  double eta;
  double beta;
};

/// eta = k / (w + sum ||grad sample||^2)^(1/3), beta = min(1, c eta^2).
StormOriginalParams storm_original_params(double k, double w, double c,
                                          double grad_norm_sum_sq);

/// Initial batch ceil(T^(1/3)), computed without floating-point surprises at
/// perfect cubes.
std::uint64_t initial_batch_size(std::uint64_t horizon);

}  // namespace adastorm
