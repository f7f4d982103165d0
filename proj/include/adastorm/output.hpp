#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adastorm/config.hpp"
#include "adastorm/grid.hpp"

namespace adastorm {

// File layout under the output directory:
//
//   traces/<algorithm>__<problem>__T<T>__seed<seed>.csv
//       t,f,grad_norm,v_norm_sq,eta,beta,est_error
//   summary.csv      one row per (algorithm, problem, T)
//   slopes.csv       one row per (algorithm, problem, metric), >= 3 horizons
//   summary.json     config echo, rows, slopes, per-run metrics, failures
//   plot__<algorithm>__<problem>.csv
//       T,mean_avg_grad_norm,se_avg_grad_norm,mean_tau_grad_norm,mean_final_quarter_grad_norm
//
// Reals are written with 17 significant digits (CSV) or as the shortest
// round-tripping decimal (JSON); NaN is written as "nan" / null.

inline constexpr const char* kTraceHeader = "t,f,grad_norm,v_norm_sq,eta,beta,est_error";

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, locale independent.
std::string format_real(double value);

/// Writes rows with (t - 1) % thin == 0, plus the final row.
void write_trace_csv(std::ostream& out, const RunRecord& record, std::uint64_t thin);

std::string trace_file_name(const CellResult& cell);

std::string summary_json(const ExperimentConfig& config, const GridResult& result);

struct ParsedSummary {
  std::vector<SummaryRow> rows;
  std::vector<SlopeRow> slopes;
};

/// Reads back the rows and slopes of a summary.json document.
ParsedSummary parse_summary_json(std::string_view text);

/// Writes the full file set; returns the paths written. Throws OutputError
/// naming the offending path on I/O failure.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const GridResult& result,
                                                 const std::filesystem::path& directory);

}  // namespace adastorm
