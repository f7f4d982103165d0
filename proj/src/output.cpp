#include "adastorm/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace adastorm {

using nlohmann::json;

namespace {

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw OutputError("write failed for '" + path.string() + "'");
  written.push_back(path);
}

json stats_json(const RunSummary& s) {
  return {{"runs", s.runs},
          {"mean_avg_grad_norm", real(s.mean_avg_grad_norm)},
          {"se_avg_grad_norm", real(s.se_avg_grad_norm)},
          {"mean_tau_grad_norm", real(s.mean_tau_grad_norm)},
          {"se_tau_grad_norm", real(s.se_tau_grad_norm)},
          {"mean_final_quarter_grad_norm", real(s.mean_final_quarter)},
          {"se_final_quarter_grad_norm", real(s.se_final_quarter)}};
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const RunRecord& record, std::uint64_t thin) {
  if (thin < 1) thin = 1;
  out << kTraceHeader << '\n';
  const std::size_t n = record.rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    const TraceRow& r = record.rows[i];
    if ((r.t - 1) % thin != 0 && i + 1 != n) continue;
    out << r.t << ',' << format_real(r.f) << ',' << format_real(r.grad_norm) << ','
        << format_real(r.v_norm_sq) << ',' << format_real(r.eta) << ',' << format_real(r.beta)
        << ',' << format_real(r.est_error) << '\n';
  }
}

std::string trace_file_name(const CellResult& cell) {
  return cell.algorithm + "__" + cell.problem + "__T" + std::to_string(cell.horizon) + "__seed" +
         std::to_string(cell.seed) + ".csv";
}

std::string summary_json(const ExperimentConfig& config, const GridResult& result) {
  json root;
  root["config"] = json::parse(serialize_config(config));
  root["rows"] = json::array();
  for (const auto& row : result.summaries) {
    json j = stats_json(row.stats);
    j["algorithm"] = row.algorithm;
    j["problem"] = row.problem;
    j["T"] = row.horizon;
    root["rows"].push_back(std::move(j));
  }
  root["slopes"] = json::array();
  for (const auto& s : result.slopes) {
    root["slopes"].push_back({{"algorithm", s.algorithm},
                              {"problem", s.problem},
                              {"metric", s.metric},
                              {"slope", real(s.slope)},
                              {"intercept", real(s.intercept)},
                              {"r_squared", real(s.r_squared)},
                              {"points", s.points}});
  }
  root["runs"] = json::array();
  root["failures"] = json::array();
  for (const auto& cell : result.cells) {
    json j = {{"algorithm", cell.algorithm},
              {"problem", cell.problem},
              {"T", cell.horizon},
              {"seed", cell.seed}};
    if (cell.ok()) {
      const RunRecord& r = *cell.record;
      j["tau"] = r.tau;
      j["avg_grad_norm"] = real(average_grad_norm(r));
      j["tau_grad_norm"] = real(tau_grad_norm(r));
      j["final_quarter_grad_norm"] = real(final_quarter_grad_norm(r));
      root["runs"].push_back(std::move(j));
    } else {
      j["error"] = cell.error;
      root["failures"].push_back(std::move(j));
    }
  }
  return root.dump(2) + "\n";
}

ParsedSummary parse_summary_json(std::string_view text) {
  ParsedSummary out;
  try {
    const json root = json::parse(text);
    for (const auto& j : root.at("rows")) {
      SummaryRow row;
      row.algorithm = j.at("algorithm").get<std::string>();
      row.problem = j.at("problem").get<std::string>();
      row.horizon = j.at("T").get<std::uint64_t>();
      row.stats.runs = j.at("runs").get<std::size_t>();
      row.stats.mean_avg_grad_norm = real_from(j.at("mean_avg_grad_norm"));
      row.stats.se_avg_grad_norm = real_from(j.at("se_avg_grad_norm"));
      row.stats.mean_tau_grad_norm = real_from(j.at("mean_tau_grad_norm"));
      row.stats.se_tau_grad_norm = real_from(j.at("se_tau_grad_norm"));
      row.stats.mean_final_quarter = real_from(j.at("mean_final_quarter_grad_norm"));
      row.stats.se_final_quarter = real_from(j.at("se_final_quarter_grad_norm"));
      out.rows.push_back(std::move(row));
    }
    for (const auto& j : root.at("slopes")) {
      SlopeRow s;
      s.algorithm = j.at("algorithm").get<std::string>();
      s.problem = j.at("problem").get<std::string>();
      s.metric = j.at("metric").get<std::string>();
      s.slope = real_from(j.at("slope"));
      s.intercept = real_from(j.at("intercept"));
      s.r_squared = real_from(j.at("r_squared"));
      s.points = j.at("points").get<std::size_t>();
      out.slopes.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw OutputError(std::string("summary JSON: ") + e.what());
  }
  return out;
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const GridResult& result,
                                                 const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  const fs::path traces = directory / "traces";
  std::error_code ec;
  fs::create_directories(traces, ec);
  if (ec) throw OutputError("cannot create '" + traces.string() + "': " + ec.message());

  for (const auto& cell : result.cells) {
    if (!cell.ok()) continue;
    std::ostringstream os;
    write_trace_csv(os, *cell.record, config.output.thin);
    write_file(traces / trace_file_name(cell), os.str(), written);
  }

  {
    std::ostringstream os;
    os << "algorithm,problem,T,runs,mean_avg_grad_norm,se_avg_grad_norm,mean_tau_grad_norm,"
          "se_tau_grad_norm,mean_final_quarter_grad_norm,se_final_quarter_grad_norm\n";
    for (const auto& row : result.summaries) {
      const RunSummary& s = row.stats;
      os << row.algorithm << ',' << row.problem << ',' << row.horizon << ',' << s.runs << ','
         << format_real(s.mean_avg_grad_norm) << ',' << format_real(s.se_avg_grad_norm) << ','
         << format_real(s.mean_tau_grad_norm) << ',' << format_real(s.se_tau_grad_norm) << ','
         << format_real(s.mean_final_quarter) << ',' << format_real(s.se_final_quarter) << '\n';
    }
    write_file(directory / "summary.csv", os.str(), written);
  }

  {
    std::ostringstream os;
    os << "algorithm,problem,metric,slope,intercept,r_squared,points\n";
    for (const auto& s : result.slopes) {
      os << s.algorithm << ',' << s.problem << ',' << s.metric << ',' << format_real(s.slope)
         << ',' << format_real(s.intercept) << ',' << format_real(s.r_squared) << ',' << s.points
         << '\n';
    }
    write_file(directory / "slopes.csv", os.str(), written);
  }

  write_file(directory / "summary.json", summary_json(config, result), written);

  std::map<std::pair<std::string, std::string>, std::ostringstream> plots;
  for (const auto& row : result.summaries) {
    auto& os = plots[{row.algorithm, row.problem}];
    if (os.tellp() == 0) {
      os << "T,mean_avg_grad_norm,se_avg_grad_norm,mean_tau_grad_norm,"
            "mean_final_quarter_grad_norm\n";
    }
    os << row.horizon << ',' << format_real(row.stats.mean_avg_grad_norm) << ','
       << format_real(row.stats.se_avg_grad_norm) << ','
       << format_real(row.stats.mean_tau_grad_norm) << ','
       << format_real(row.stats.mean_final_quarter) << '\n';
  }
  for (const auto& [key, os] : plots) {
    write_file(directory / ("plot__" + key.first + "__" + key.second + ".csv"), os.str(), written);
  }
  return written;
}

}  // namespace adastorm
