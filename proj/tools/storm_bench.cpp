// storm_bench: run experiment grids, self-checks and slope reports.
//
//   storm_bench run <config.json> [--out DIR] [--jobs K] [--thin K] [--check]
//   storm_bench check
//   storm_bench slopes <summary.json>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "adastorm/checks.hpp"
#include "adastorm/config.hpp"
#include "adastorm/grid.hpp"
#include "adastorm/output.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool report_checks() {
  bool ok = true;
  for (const auto& r : adastorm::run_property_checks()) {
    std::printf("%-18s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok;
}

void print_slopes(const std::vector<adastorm::SlopeRow>& slopes) {
  std::printf("%-22s %-16s %-24s %10s %10s %6s\n", "algorithm", "problem", "metric", "slope",
              "r^2", "points");
  for (const auto& s : slopes) {
    std::printf("%-22s %-16s %-24s %10.4f %10.4f %6zu\n", s.algorithm.c_str(), s.problem.c_str(),
                s.metric.c_str(), s.slope, s.r_squared, s.points);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive STORM optimizers: experiment grids and self-checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute an experiment grid from a JSON config");
  std::string config_path;
  std::string out_dir;
  unsigned jobs = 1;
  std::uint64_t thin = 0;
  bool with_checks = false;
  run->add_option("config,--config", config_path, "Experiment config (JSON)");
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--jobs", jobs, "Concurrent grid cells")->check(CLI::PositiveNumber);
  run->add_option("--thin", thin, "Keep every k-th trace row")->check(CLI::PositiveNumber);
  run->add_flag("--check", with_checks, "Also run the property checks");

  auto* check = app.add_subcommand("check", "Run the built-in property checks");

  auto* slopes = app.add_subcommand("slopes", "Fit log-log slopes from a summary.json");
  std::string summary_path;
  slopes->add_option("summary", summary_path, "summary.json written by `run`")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (config_path.empty()) throw std::runtime_error("run: no config given");
      adastorm::ExperimentConfig cfg = adastorm::parse_config(read_file(config_path));
      if (!out_dir.empty()) cfg.output.directory = out_dir;
      if (thin > 0) cfg.output.thin = thin;
      const adastorm::GridResult result = adastorm::run_grid(cfg, jobs);
      const auto files = adastorm::write_outputs(cfg, result, cfg.output.directory);
      std::size_t failed = 0;
      for (const auto& cell : result.cells) {
        if (!cell.ok()) {
          ++failed;
          std::fprintf(stderr, "cell %s/%s T=%llu seed=%llu failed: %s\n", cell.algorithm.c_str(),
                       cell.problem.c_str(), static_cast<unsigned long long>(cell.horizon),
                       static_cast<unsigned long long>(cell.seed), cell.error.c_str());
        }
      }
      std::printf("%zu cells, %zu failed, %zu files written to %s\n", result.cells.size(), failed,
                  files.size(), cfg.output.directory.c_str());
      if (!result.slopes.empty()) print_slopes(result.slopes);
      bool ok = failed == 0;
      if (with_checks) ok = report_checks() && ok;
      return ok ? 0 : 1;
    }
    if (*check) return report_checks() ? 0 : 1;
    if (*slopes) {
      const auto parsed = adastorm::parse_summary_json(read_file(summary_path));
      print_slopes(adastorm::fit_slopes(parsed.rows));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
