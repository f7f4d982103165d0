#include "adastorm/optimizers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "adastorm/estimators.hpp"
#include "adastorm/schedules.hpp"

namespace adastorm {

namespace {

// Purpose labels for the per-run random streams. Each consumer owns one
// stream, so e.g. the tau draw never shifts the oracle samples.
constexpr const char* kOracleStream = "oracle";
constexpr const char* kInitStream = "init";
constexpr const char* kTauStream = "tau";
constexpr const char* kIndexStream = "index";

void require_horizon(std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon T must be at least 1");
}

/// Collects trace rows, the tau iterate and (optionally) the full path.
class Recorder {
 public:
  Recorder(RunConfigEcho echo, std::uint64_t seed, const RunOptions& options)
      : keep_(options.keep_iterates) {
    record_.config = std::move(echo);
    record_.rows.reserve(record_.config.horizon);
    RngStream tau_rng = RngStream(seed).split(kTauStream);
    record_.tau = 1 + tau_rng.uniform_index(record_.config.horizon);
  }

  void row(std::uint64_t t, const DenseVector& x, double f, const DenseVector& true_grad,
           const DenseVector& v, double eta, double beta) {
    require_finite(v, "gradient estimator");
    TraceRow r;
    r.t = t;
    r.f = f;
    r.grad_norm = std::sqrt(norm_sq(true_grad));
    r.v_norm_sq = norm_sq(v);
    r.eta = eta;
    r.beta = beta;
    r.est_error = std::sqrt(norm_sq(v - true_grad));
    record_.rows.push_back(r);
    if (t == record_.tau) record_.x_tau = x;
    if (keep_) {
      if (record_.iterates.empty()) record_.iterates.push_back(x);
      record_.estimates.push_back(v);
    }
  }

  /// Call after each descent step with x_{t+1}.
  void stepped(const DenseVector& next) {
    require_finite(next, "iterate");
    if (keep_) record_.iterates.push_back(next);
  }

  RunRecord finish() && { return std::move(record_); }

 private:
  bool keep_;
  RunRecord record_;
};

RunConfigEcho echo(std::string algorithm, std::string problem, std::uint64_t horizon,
                   double alpha, std::uint64_t seed, double sample_variance) {
  return RunConfigEcho{std::move(algorithm), std::move(problem), horizon, alpha, seed,
                       sample_variance};
}

double sample_variance(const StochasticProblem& p) {
  return p.noise_stddev() * p.noise_stddev() * static_cast<double>(p.dim());
}

}  // namespace

RunRecord run_ada_storm(const StochasticProblem& problem, std::uint64_t horizon, double alpha,
                        std::uint64_t seed, const RunOptions& options) {
  require_horizon(horizon);
  validate_alpha(alpha);
  const RngStream root(seed);
  RngStream oracle = root.split(kOracleStream);
  RngStream init = root.split(kInitStream);
  Recorder rec(echo("ada_storm", problem.name(), horizon, alpha, seed, sample_variance(problem)),
               seed, options);

  const auto T = static_cast<double>(horizon);
  const double beta = ada_beta(T);
  DenseVector x = problem.start();
  DenseVector x_prev = x;
  StormState state = storm_init(problem, x, initial_batch_size(horizon), init);
  double sum_sq = 0.0;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    if (t > 1) {
      const SampleToken token = problem.draw(oracle);
      state = storm_update(state, beta, problem.grad_at(token, x), problem.grad_at(token, x_prev));
    }
    sum_sq += norm_sq(state.v);
    const double eta = ada_lr(T, alpha, sum_sq);
    rec.row(t, x, problem.objective(x), problem.true_grad(x), state.v, eta, beta);
    x_prev = x;
    x -= eta * state.v;
    rec.stepped(x);
  }
  return std::move(rec).finish();
}

RunRecord run_ada_storm_doubling(const StochasticProblem& problem, std::uint64_t horizon,
                                 double alpha, std::uint64_t seed, const RunOptions& options) {
  require_horizon(horizon);
  validate_alpha(alpha);
  const RngStream root(seed);
  RngStream oracle = root.split(kOracleStream);
  RngStream init = root.split(kInitStream);
  Recorder rec(echo("ada_storm_doubling", problem.name(), horizon, alpha, seed,
                    sample_variance(problem)),
               seed, options);

  DenseVector x = problem.start();
  DenseVector x_prev = x;
  StormState state;
  double stage_sum = 0.0;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::uint64_t stage = stage_length(t);
    const double beta = ada_beta(static_cast<double>(stage));
    if (stage == t) {
      state = storm_init(problem, x, initial_batch_size(stage), init);
      stage_sum = 0.0;
    } else {
      const SampleToken token = problem.draw(oracle);
      state = storm_update(state, beta, problem.grad_at(token, x), problem.grad_at(token, x_prev));
    }
    stage_sum += norm_sq(state.v);
    const DoublingParams p = doubling_params(t, alpha, stage_sum);
    rec.row(t, x, problem.objective(x), problem.true_grad(x), state.v, p.eta, p.beta);
    x_prev = x;
    x -= p.eta * state.v;
    rec.stepped(x);
  }
  return std::move(rec).finish();
}

RunRecord run_comp_storm(const CompositionalProblem& problem, std::uint64_t horizon,
                         double alpha, std::uint64_t seed, const RunOptions& options) {
  require_horizon(horizon);
  validate_alpha(alpha);
  const RngStream root(seed);
  RngStream inner = root.split(kOracleStream).split("inner");
  RngStream outer = root.split(kOracleStream).split("outer");
  RngStream init_inner = root.split(kInitStream).split("inner");
  RngStream init_outer = root.split(kInitStream).split("outer");
  // Reference variance: value noise plus outer-gradient noise per draw.
  const double s2 = problem.noise_stddev() * problem.noise_stddev();
  Recorder rec(echo("comp_storm", problem.name(), horizon, alpha, seed,
                    s2 * static_cast<double>(problem.mid_dim())),
               seed, options);

  const auto T = static_cast<double>(horizon);
  const double beta = ada_beta(T);
  DenseVector x = problem.start();
  DenseVector x_prev = x;
  CompState state = comp_init(problem, x, initial_batch_size(horizon), init_inner, init_outer);
  double sum_sq = 0.0;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    if (t > 1) {
      const InnerToken zeta = problem.draw_inner(inner);
      const OuterToken xi = problem.draw_outer(outer);
      const DenseVector u_prev = state.u;
      state = comp_inner_update(state, beta, problem.inner_value_at(zeta, x),
                                problem.inner_value_at(zeta, x_prev));
      state = comp_grad_update(state, beta, problem.outer_grad_at(xi, state.u),
                               problem.inner_jacobian_at(zeta, x), problem.outer_grad_at(xi, u_prev),
                               problem.inner_jacobian_at(zeta, x_prev));
    }
    sum_sq += norm_sq(state.v);
    const double eta = ada_lr(T, alpha, sum_sq);
    rec.row(t, x, problem.objective(x), problem.true_grad(x), state.v, eta, beta);
    x_prev = x;
    x -= eta * state.v;
    rec.stepped(x);
    if (x.norm() > problem.working_radius()) {
      throw std::runtime_error("comp_storm: iterate left the working ball of radius " +
                               std::to_string(problem.working_radius()) + " at t = " +
                               std::to_string(t));
    }
  }
  return std::move(rec).finish();
}

RunRecord run_fs_storm(const FiniteSumProblem& problem, std::uint64_t horizon, double alpha,
                       std::uint64_t seed, const RunOptions& options) {
  require_horizon(horizon);
  validate_alpha(alpha);
  RngStream index = RngStream(seed).split(kIndexStream);
  Recorder rec(echo("fs_storm", problem.name(), horizon, alpha, seed, 0.0), seed, options);

  const std::uint64_t n = problem.n();
  const double beta = finite_sum_beta(n);
  DenseVector x = problem.start();
  DenseVector x_prev = x;
  GradTable table = GradTable::full_pass(problem, x);
  StormState state{table.mean()};
  double sum_sq = 0.0;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    if (t > 1) {
      const std::size_t i = index.uniform_index(n);
      FiniteSumStep step = finite_sum_update(state, std::move(table), beta, i,
                                             problem.component_grad(i, x),
                                             problem.component_grad(i, x_prev));
      state = std::move(step.state);
      table = std::move(step.table);
    }
    sum_sq += norm_sq(state.v);
    const double eta = finite_sum_lr(n, alpha, sum_sq);
    rec.row(t, x, problem.objective(x), problem.full_grad(x), state.v, eta, beta);
    x_prev = x;
    x -= eta * state.v;
    rec.stepped(x);
  }
  return std::move(rec).finish();
}

RunRecord run_fs_storm_svrg(const FiniteSumProblem& problem, std::uint64_t horizon,
                            double alpha, std::uint64_t seed, const SvrgOptions& svrg,
                            const RunOptions& options) {
  require_horizon(horizon);
  validate_alpha(alpha);
  if (svrg.constant_eta && !(*svrg.constant_eta > 0.0)) {
    throw std::invalid_argument("fs_storm_svrg: constant eta must be positive");
  }
  RngStream index = RngStream(seed).split(kIndexStream);
  Recorder rec(echo("fs_storm_svrg", problem.name(), horizon, alpha, seed, 0.0), seed, options);

  const std::uint64_t n = problem.n();
  const std::size_t period = svrg.period == 0 ? n : svrg.period;
  const double beta = finite_sum_beta(n);
  DenseVector x = problem.start();
  DenseVector x_prev = x;
  SvrgSnapshot snapshot = SvrgSnapshot::refresh(problem, x, period);
  StormState state{snapshot.anchor_grad};
  double sum_sq = 0.0;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    if (t > 1) {
      if ((t - 1) % period == 0) {
        snapshot = SvrgSnapshot::refresh(problem, x, period);
      } else {
        ++snapshot.age;
      }
      const std::size_t i = index.uniform_index(n);
      state = svrg_update(state, snapshot, beta, problem.component_grad(i, x),
                          problem.component_grad(i, x_prev),
                          problem.component_grad(i, snapshot.anchor));
    }
    sum_sq += norm_sq(state.v);
    const double eta = svrg.constant_eta ? *svrg.constant_eta : finite_sum_lr(n, alpha, sum_sq);
    rec.row(t, x, problem.objective(x), problem.full_grad(x), state.v, eta, beta);
    x_prev = x;
    x -= eta * state.v;
    rec.stepped(x);
  }
  return std::move(rec).finish();
}

RunRecord run_sgd(const StochasticProblem& problem, std::uint64_t horizon, double eta0,
                  double decay, std::uint64_t seed, const RunOptions& options) {
  require_horizon(horizon);
  if (!(eta0 > 0.0)) throw std::invalid_argument("sgd: eta0 must be positive");
  if (!(decay >= 0.0)) throw std::invalid_argument("sgd: decay must be nonnegative");
  RngStream oracle = RngStream(seed).split(kOracleStream);
  Recorder rec(echo("sgd", problem.name(), horizon, 0.0, seed, sample_variance(problem)), seed,
               options);

  DenseVector x = problem.start();
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const DenseVector g = problem.grad_at(problem.draw(oracle), x);
    const double eta = eta0 / std::sqrt(1.0 + decay * static_cast<double>(t));
    rec.row(t, x, problem.objective(x), problem.true_grad(x), g, eta, 1.0);
    x -= eta * g;
    rec.stepped(x);
  }
  return std::move(rec).finish();
}

RunRecord run_storm_original(const StochasticProblem& problem, std::uint64_t horizon,
                             double k, double w, double c, std::uint64_t seed,
                             const RunOptions& options) {
  require_horizon(horizon);
  // Validates k, w, c up front.
  (void)storm_original_params(k, w, c, 0.0);
  RngStream oracle = RngStream(seed).split(kOracleStream);
  Recorder rec(echo("storm_original", problem.name(), horizon, 0.0, seed,
                    sample_variance(problem)),
               seed, options);

  DenseVector x = problem.start();
  DenseVector x_prev = x;
  StormState state;
  double grad_sum_sq = 0.0;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const SampleToken token = problem.draw(oracle);
    const DenseVector grad_new = problem.grad_at(token, x);
    grad_sum_sq += norm_sq(grad_new);
    const StormOriginalParams p = storm_original_params(k, w, c, grad_sum_sq);
    if (t == 1) {
      state.v = grad_new;
    } else {
      state = storm_update(state, p.beta, grad_new, problem.grad_at(token, x_prev));
    }
    rec.row(t, x, problem.objective(x), problem.true_grad(x), state.v, p.eta, p.beta);
    x_prev = x;
    x -= p.eta * state.v;
    rec.stepped(x);
  }
  return std::move(rec).finish();
}

}  // namespace adastorm
