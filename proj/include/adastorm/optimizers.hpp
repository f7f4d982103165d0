#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adastorm/numerics.hpp"
#include "adastorm/problems.hpp"

namespace adastorm {

/// One iteration of a run, measured at x_t before the step is taken.
struct TraceRow {
  std::uint64_t t = 0;
  double f = 0.0;           ///< objective(x_t)
  double grad_norm = 0.0;   ///< ||true gradient(x_t)||
  double v_norm_sq = 0.0;   ///< ||v_t||^2
  double eta = 0.0;
  double beta = 0.0;
  double est_error = 0.0;   ///< ||v_t - true gradient(x_t)||
};

struct RunConfigEcho {
  std::string algorithm;
  std::string problem;
  std::uint64_t horizon = 0;
  double alpha = 0.0;  ///< 0 for non-adaptive baselines
  std::uint64_t seed = 0;
  /// Single-sample oracle variance E||grad sample - grad||^2 (0 for finite sums).
  double sample_variance = 0.0;
};

struct RunRecord {
  std::vector<TraceRow> rows;
  std::uint64_t tau = 0;  ///< one-based output index, uniform over 1..T
  DenseVector x_tau;
  RunConfigEcho config;
  /// Populated only with RunOptions::keep_iterates: x_1..x_{T+1} and v_1..v_T.
  std::vector<DenseVector> iterates;
  std::vector<DenseVector> estimates;
};

struct RunOptions {
  bool keep_iterates = false;
};

/// Adaptive STORM with fixed horizon T: beta = T^(-2/3), step from ada_lr,
/// initial batch ceil(T^(1/3)).
RunRecord run_ada_storm(const StochasticProblem& problem, std::uint64_t horizon, double alpha,
                        std::uint64_t seed, const RunOptions& options = {});

/// Horizon-free variant: stages of length 1, 2, 4, ...; at every stage start
/// the stage sum restarts and v is refreshed with a batch of ceil(I_t^(1/3)).
RunRecord run_ada_storm_doubling(const StochasticProblem& problem, std::uint64_t horizon,
                                 double alpha, std::uint64_t seed,
                                 const RunOptions& options = {});

/// Two-level STORM tracking both g(x_t) and the composite gradient. Throws
/// std::runtime_error if an iterate leaves the problem's working ball.
RunRecord run_comp_storm(const CompositionalProblem& problem, std::uint64_t horizon,
                         double alpha, std::uint64_t seed, const RunOptions& options = {});

/// Finite-sum STORM with a SAG-style gradient table; beta = 1/n.
RunRecord run_fs_storm(const FiniteSumProblem& problem, std::uint64_t horizon, double alpha,
                       std::uint64_t seed, const RunOptions& options = {});

struct SvrgOptions {
  std::size_t period = 0;             ///< refresh period I; 0 means I = n
  std::optional<double> constant_eta;  ///< replaces the adaptive step when set
};

/// Finite-sum STORM with periodic full-gradient anchors instead of a table.
RunRecord run_fs_storm_svrg(const FiniteSumProblem& problem, std::uint64_t horizon,
                            double alpha, std::uint64_t seed, const SvrgOptions& svrg = {},
                            const RunOptions& options = {});

/// Plain SGD, eta_t = eta0 / sqrt(1 + decay t).
RunRecord run_sgd(const StochasticProblem& problem, std::uint64_t horizon, double eta0,
                  double decay, std::uint64_t seed, const RunOptions& options = {});

/// STORM with its original schedule driven by sampled-gradient norms.
RunRecord run_storm_original(const StochasticProblem& problem, std::uint64_t horizon,
                             double k, double w, double c, std::uint64_t seed,
                             const RunOptions& options = {});

}  // namespace adastorm
