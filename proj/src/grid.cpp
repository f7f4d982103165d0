#include "adastorm/grid.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <variant>

#include "adastorm/problems.hpp"

namespace adastorm {

namespace {

using AnyProblem = std::variant<std::shared_ptr<const StochasticProblem>,
                                std::shared_ptr<const CompositionalProblem>,
                                std::shared_ptr<const FiniteSumProblem>>;

AnyProblem build_problem(const ProblemSpec& spec) {
  if (spec.name == "quadratic") {
    return std::shared_ptr<const StochasticProblem>(
        make_noisy_quadratic(spec.dim, spec.L, spec.mu, spec.sigma, spec.seed));
  }
  if (spec.name == "nonconvex") {
    return std::shared_ptr<const StochasticProblem>(
        make_nonconvex_smooth(spec.dim, spec.sigma, spec.seed));
  }
  if (spec.name == "finite_sum") {
    return std::shared_ptr<const FiniteSumProblem>(make_finite_sum(spec.n, spec.dim, spec.seed));
  }
  if (spec.name == "compositional") {
    return std::shared_ptr<const CompositionalProblem>(
        make_compositional(spec.dim, spec.mid_dim, spec.sigma, spec.seed));
  }
  throw std::invalid_argument("unknown problem '" + spec.name + "'");
}

RunRecord dispatch(const AnyProblem& problem, const AlgorithmSpec& a, std::uint64_t T,
                   std::uint64_t seed) {
  if (const auto* p = std::get_if<std::shared_ptr<const StochasticProblem>>(&problem)) {
    const StochasticProblem& sp = **p;
    if (a.name == "ada_storm") return run_ada_storm(sp, T, a.alpha, seed);
    if (a.name == "ada_storm_doubling") return run_ada_storm_doubling(sp, T, a.alpha, seed);
    if (a.name == "sgd") return run_sgd(sp, T, a.eta0, a.decay, seed);
    if (a.name == "storm_original") return run_storm_original(sp, T, a.k, a.w, a.c, seed);
  } else if (const auto* c = std::get_if<std::shared_ptr<const CompositionalProblem>>(&problem)) {
    if (a.name == "comp_storm") return run_comp_storm(**c, T, a.alpha, seed);
  } else if (const auto* f = std::get_if<std::shared_ptr<const FiniteSumProblem>>(&problem)) {
    if (a.name == "fs_storm") return run_fs_storm(**f, T, a.alpha, seed);
    if (a.name == "fs_storm_svrg") {
      return run_fs_storm_svrg(**f, T, a.alpha, seed, SvrgOptions{a.period, a.eta});
    }
  }
  throw std::invalid_argument("algorithm '" + a.name + "' does not apply to this problem");
}

struct CellIndex {
  std::size_t problem;
  std::size_t algorithm;
  std::uint64_t horizon;
  std::uint64_t seed;
};

}  // namespace

bool GridResult::all_ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.ok(); });
}

RunRecord run_cell(const ProblemSpec& problem, const AlgorithmSpec& algorithm,
                   std::uint64_t horizon, std::uint64_t seed) {
  RunRecord r = dispatch(build_problem(problem), algorithm, horizon, seed);
  r.config.algorithm = algorithm.label;
  r.config.problem = problem.label;
  return r;
}

GridResult run_grid(const ExperimentConfig& config, unsigned jobs) {
  std::vector<std::optional<AnyProblem>> problems;
  std::vector<std::string> build_errors;
  for (const auto& spec : config.problems) {
    try {
      problems.emplace_back(build_problem(spec));
      build_errors.emplace_back();
    } catch (const std::exception& e) {
      problems.emplace_back();
      build_errors.emplace_back(e.what());
    }
  }

  std::vector<CellIndex> index;
  for (std::size_t p = 0; p < config.problems.size(); ++p) {
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
      for (auto T : config.grid.horizons) {
        for (auto s : config.grid.seeds) index.push_back({p, a, T, s});
      }
    }
  }

  GridResult result;
  result.cells.resize(index.size());
  auto run_one = [&](std::size_t i) {
    const CellIndex& ci = index[i];
    const AlgorithmSpec& alg = config.algorithms[ci.algorithm];
    CellResult& cell = result.cells[i];
    cell.algorithm = alg.label;
    cell.problem = config.problems[ci.problem].label;
    cell.horizon = ci.horizon;
    cell.seed = ci.seed;
    if (!problems[ci.problem]) {
      cell.error = "problem construction failed: " + build_errors[ci.problem];
      return;
    }
    try {
      RunRecord r = dispatch(*problems[ci.problem], alg, ci.horizon, ci.seed);
      r.config.algorithm = cell.algorithm;
      r.config.problem = cell.problem;
      cell.record = std::move(r);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(index.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < index.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < index.size(); i = next++) run_one(i);
      });
    }
  }
  aggregate(result);
  return result;
}

void aggregate(GridResult& result) {
  // Keyed by (algorithm, problem, T); std::map fixes the output order.
  std::map<std::tuple<std::string, std::string, std::uint64_t>, std::vector<const RunRecord*>> groups;
  for (const auto& cell : result.cells) {
    if (cell.ok()) groups[{cell.algorithm, cell.problem, cell.horizon}].push_back(&*cell.record);
  }
  result.summaries.clear();
  for (const auto& [key, records] : groups) {
    const auto& [alg, prob, T] = key;
    result.summaries.push_back(SummaryRow{alg, prob, T, summarize(records)});
  }
  result.slopes = fit_slopes(result.summaries);
}

std::vector<SlopeRow> fit_slopes(const std::vector<SummaryRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<const SummaryRow*>> pairs;
  for (const auto& row : rows) pairs[{row.algorithm, row.problem}].push_back(&row);

  std::vector<SlopeRow> out;
  for (auto& [key, group] : pairs) {
    if (group.size() < 3) continue;
    std::sort(group.begin(), group.end(),
              [](const SummaryRow* a, const SummaryRow* b) { return a->horizon < b->horizon; });
    const std::pair<const char*, double RunSummary::*> metrics[] = {
        {"avg_grad_norm", &RunSummary::mean_avg_grad_norm},
        {"final_quarter_grad_norm", &RunSummary::mean_final_quarter},
    };
    for (const auto& [name, member] : metrics) {
      std::vector<std::pair<double, double>> pts;
      for (const auto* row : group) {
        pts.emplace_back(static_cast<double>(row->horizon), row->stats.*member);
      }
      SlopeRow s{key.first, key.second, name, 0.0, 0.0, 0.0, pts.size()};
      try {
        const SlopeFit fit = fit_loglog_slope(pts);
        s.slope = fit.slope;
        s.intercept = fit.intercept;
        s.r_squared = fit.r_squared;
      } catch (const std::invalid_argument&) {
        // A zero metric (exact convergence) has no log; leave the row NaN.
        s.slope = s.intercept = s.r_squared = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace adastorm
