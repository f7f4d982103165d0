#pragma once

#include <span>
#include <utility>
#include <vector>

#include "adastorm/optimizers.hpp"

namespace adastorm {

/// Relative slack allowed when checking the Lemma-1 style sandwich.
inline constexpr double kSandwichTolerance = 1e-9;

struct SandwichBounds {
  double lower;   ///< (sum c)^(1 - alpha)
  double middle;  ///< sum_i c_i / (c_1 + ... + c_i)^alpha
  double upper;   ///< lower / (1 - alpha)
};

/// Evaluates the three sides for a positive sequence and checks
/// lower <= middle <= upper up to kSandwichTolerance (relative).
/// Throws std::invalid_argument on nonpositive entries or alpha outside
/// (0, 1), and std::logic_error if the ordering fails.
SandwichBounds lemma1_bounds(std::span<const double> c, double alpha);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  std::vector<std::pair<double, double>> points;  ///< (ln T, ln metric)
};

/// Least squares line through (ln T, ln metric). Needs >= 2 points with
/// positive coordinates.
SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

struct RunSummary {
  std::size_t runs = 0;
  double mean_avg_grad_norm = 0.0;
  double se_avg_grad_norm = 0.0;
  double mean_tau_grad_norm = 0.0;
  double se_tau_grad_norm = 0.0;
  double mean_final_quarter = 0.0;
  double se_final_quarter = 0.0;
  bool operator==(const RunSummary&) const = default;
};

/// Per-run metrics.
double average_grad_norm(const RunRecord& record);
double tau_grad_norm(const RunRecord& record);
/// Mean grad norm over the last ceil(T/4) rows.
double final_quarter_grad_norm(const RunRecord& record);

/// Mean and standard error (sample stddev / sqrt(k)) of each metric over seeds.
/// Throws on empty input or mixed (algorithm, problem, T).
RunSummary summarize(std::span<const RunRecord> records);
RunSummary summarize(std::span<const RunRecord* const> records);

struct MeanAndError {
  double mean = 0.0;
  double standard_error = 0.0;
};
MeanAndError mean_and_standard_error(std::span<const double> values);

struct EstimatorErrorStats {
  double mse_last_half = 0.0;
  /// mse / reference variance; NaN when the reference variance is zero.
  double ratio = 0.0;
};

/// Mean of est_error^2 over the last floor(T/2) rows (at least one row),
/// against the record's single-sample variance.
EstimatorErrorStats estimator_error_stats(const RunRecord& record);

}  // namespace adastorm
