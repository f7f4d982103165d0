#include "adastorm/checks.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <vector>

#include "adastorm/analysis.hpp"
#include "adastorm/estimators.hpp"
#include "adastorm/optimizers.hpp"
#include "adastorm/problems.hpp"
#include "adastorm/schedules.hpp"

namespace adastorm {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

CheckResult check_sandwich(RngStream rng) {
  const SandwichBounds hand = lemma1_bounds(std::vector<double>{1, 1, 1, 1}, 0.5);
  const double expected = 1.0 + 1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(3.0) + 0.5;
  if (std::abs(hand.middle - expected) > 1e-12 || hand.lower != 2.0 || hand.upper != 4.0) {
    return {"sandwich", false, "hand case mismatch"};
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 1 + rng.uniform_index(100);
    std::vector<double> c(len);
    for (auto& ci : c) ci = 10.0 * (1.0 - rng.uniform());  // (0, 10]
    const double alpha = 0.01 + 0.98 * rng.uniform();
    lemma1_bounds(c, alpha);  // throws on violation
  }
  return {"sandwich", true, "1000 random sequences + hand case"};
}

CheckResult check_gradients(RngStream rng) {
  const auto quad = make_noisy_quadratic(8, 4.0, 1.0, 1.0, 11);
  const auto ncvx = make_nonconvex_smooth(8, 1.0, 12);
  const auto fsum = make_finite_sum(50, 8, 13);
  const auto comp = make_compositional(8, 5, 1.0, 14);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const DenseVector x = gaussian(rng, 8, 2.0);
    worst = std::max({worst, grad_check(*quad, x, 1e-4), grad_check(*ncvx, x, 1e-5),
                      grad_check(*fsum, x, 1e-5), grad_check(*comp, x, 1e-4)});
  }
  return {"gradients", worst < 1e-6, "worst relative error " + fmt(worst)};
}

CheckResult check_fixed_point() {
  const auto quad = make_noisy_quadratic(10, 4.0, 1.0, 0.0, 21);
  const auto comp = make_compositional(6, 4, 0.0, 22);
  double worst = 0.0;
  for (const auto& r : {run_ada_storm(*quad, 1000, kDefaultAlpha, 1),
                        run_comp_storm(*comp, 1000, kDefaultAlpha, 1)}) {
    for (const auto& row : r.rows) worst = std::max(worst, row.est_error);
  }
  return {"fixed_point", worst <= 1e-12, "max estimator error " + fmt(worst)};
}

CheckResult check_grad_table(RngStream rng) {
  const std::size_t n = 17;
  std::vector<DenseVector> init;
  for (std::size_t i = 0; i < n; ++i) init.push_back(gaussian(rng, 4, 1.0));
  GradTable table(init);
  for (int step = 0; step < 10000; ++step) {
    table.overwrite(rng.uniform_index(n), gaussian(rng, 4, 3.0));
  }
  DenseVector direct = DenseVector::Zero(4);
  for (std::size_t i = 0; i < n; ++i) direct += table.entry(i);
  direct /= static_cast<double>(n);
  const double drift = (direct - table.mean()).cwiseAbs().maxCoeff();
  return {"grad_table", drift <= 1e-10, "mean drift " + fmt(drift)};
}

// Averages the post-update estimator over every equally likely index and
// compares with the recursion driven by exact full gradients.
CheckResult check_conditional_means() {
  const auto problem = make_finite_sum(4, 3, 31);
  const std::size_t n = problem->n();
  const double beta = 0.3;
  DenseVector x_prev = problem->start();
  const GradTable table = GradTable::full_pass(*problem, x_prev);
  const StormState state{table.mean() + DenseVector::Constant(3, 0.1)};
  const DenseVector x = x_prev - 0.2 * state.v;
  const SvrgSnapshot snap = SvrgSnapshot::refresh(*problem, x_prev - DenseVector::Constant(3, 0.05), 4);

  const DenseVector target = (1.0 - beta) * state.v + problem->full_grad(x) -
                             (1.0 - beta) * problem->full_grad(x_prev);
  DenseVector sag = DenseVector::Zero(3);
  DenseVector svrg = DenseVector::Zero(3);
  for (std::size_t i = 0; i < n; ++i) {
    const DenseVector gn = problem->component_grad(i, x);
    const DenseVector go = problem->component_grad(i, x_prev);
    sag += finite_sum_update(state, table, beta, i, gn, go).state.v;
    svrg += svrg_update(state, snap, beta, gn, go, problem->component_grad(i, snap.anchor)).v;
  }
  sag /= static_cast<double>(n);
  svrg /= static_cast<double>(n);
  const double err = std::max((sag - target).cwiseAbs().maxCoeff(),
                              (svrg - target).cwiseAbs().maxCoeff());
  return {"conditional_mean", err <= 1e-10, "max deviation " + fmt(err)};
}

}  // namespace

std::vector<CheckResult> run_property_checks(std::uint64_t seed) {
  const RngStream root = RngStream(seed).split("checks");
  std::vector<CheckResult> out;
  out.push_back(guarded("sandwich", [&] { return check_sandwich(root.split("sandwich")); }));
  out.push_back(guarded("gradients", [&] { return check_gradients(root.split("gradients")); }));
  out.push_back(guarded("fixed_point", [] { return check_fixed_point(); }));
  out.push_back(guarded("grad_table", [&] { return check_grad_table(root.split("table")); }));
  out.push_back(guarded("conditional_mean", [] { return check_conditional_means(); }));
  return out;
}

}  // namespace adastorm
