#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adastorm/analysis.hpp"
#include "adastorm/config.hpp"
#include "adastorm/optimizers.hpp"

namespace adastorm {

/// One (problem, algorithm, T, seed) cell. Exactly one of record / error is set.
struct CellResult {
  std::string algorithm;  ///< algorithm label
  std::string problem;    ///< problem label
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
  std::optional<RunRecord> record;
  std::string error;

  bool ok() const { return record.has_value(); }
};

struct SummaryRow {
  std::string algorithm;
  std::string problem;
  std::uint64_t horizon = 0;
  RunSummary stats;

  bool operator==(const SummaryRow&) const = default;
};

struct SlopeRow {
  std::string algorithm;
  std::string problem;
  std::string metric;  ///< "avg_grad_norm" or "final_quarter_grad_norm"
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;

  bool operator==(const SlopeRow&) const = default;
};

struct GridResult {
  std::vector<CellResult> cells;  ///< cell-index order
  std::vector<SummaryRow> summaries;
  std::vector<SlopeRow> slopes;

  bool all_ok() const;
};

/// Runs one cell; exceptions propagate.
RunRecord run_cell(const ProblemSpec& problem, const AlgorithmSpec& algorithm,
                   std::uint64_t horizon, std::uint64_t seed);

/// Executes every (problem, algorithm, T, seed) cell on up to `jobs` threads.
/// Failures are captured per cell. Results are ordered by cell index, never
/// by completion order, and aggregates do not depend on seed order.
GridResult run_grid(const ExperimentConfig& config, unsigned jobs = 1);

/// Summary rows per (algorithm, problem, T) and slope rows for every
/// (algorithm, problem) pair with at least three horizons.
void aggregate(GridResult& result);

/// Slope rows recomputed from summary rows alone.
std::vector<SlopeRow> fit_slopes(const std::vector<SummaryRow>& rows);

}  // namespace adastorm
