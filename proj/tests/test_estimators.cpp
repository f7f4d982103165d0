#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <functional>

#include "adastorm/estimators.hpp"
#include "adastorm/schedules.hpp"

using namespace adastorm;

namespace {

DenseVector vec(std::initializer_list<double> xs) {
  DenseVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

double max_abs(const DenseVector& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("storm_init") {
  const auto exact = make_noisy_quadratic(4, 3.0, 1.0, 0.0, 1);
  RngStream rng(5);
  const DenseVector x = exact->start();
  CHECK(max_abs(storm_init(*exact, x, 7, rng).v - exact->true_grad(x)) < 1e-14);

  const auto noisy = make_noisy_quadratic(4, 3.0, 1.0, 1.0, 1);
  RngStream a(9);
  RngStream b(9);
  CHECK(storm_init(*noisy, x, 1, a).v == noisy->grad_at(noisy->draw(b), x));
  CHECK_THROWS_AS(storm_init(*noisy, x, 0, a), std::invalid_argument);
}

TEST_CASE("storm_init: variance of the batch mean") {
  // E||v - grad||^2 = sigma^2 dim / B0.
  const Eigen::Index dim = 5;
  const std::size_t batch = 10000;
  const auto p = make_noisy_quadratic(dim, 3.0, 1.0, 1.0, 2);
  RngStream rng(11);
  double mse = 0.0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    mse += norm_sq(storm_init(*p, p->start(), batch, rng).v - p->true_grad(p->start()));
  }
  mse /= reps;
  const double expected = static_cast<double>(dim) / static_cast<double>(batch);
  CHECK(mse > expected / 3.0);
  CHECK(mse < expected * 3.0);
}

TEST_CASE("storm_update") {
  const StormState s{vec({1.0, 0.0})};
  CHECK(storm_update(s, 1.0, vec({0.3, 0.7}), vec({5.0, 5.0})).v == vec({0.3, 0.7}));
  const DenseVector v = storm_update(s, 0.5, vec({0.0, 1.0}), vec({0.5, 0.5})).v;
  CHECK(v[0] == doctest::Approx(0.25));
  CHECK(v[1] == doctest::Approx(0.75));
  // Matches the momentum-plus-correction form.
  const double beta = 0.37;
  const DenseVector gn = vec({0.2, -1.1});
  const DenseVector go = vec({0.9, 0.4});
  const DenseVector expanded = (1 - beta) * s.v + beta * gn + (1 - beta) * (gn - go);
  CHECK(max_abs(storm_update(s, beta, gn, go).v - expanded) < 1e-15);
  CHECK_THROWS_AS(storm_update(s, 0.5, vec({1.0}), vec({1.0})), std::invalid_argument);
  CHECK_THROWS_AS(storm_update(s, 1.5, gn, go), std::invalid_argument);
}

TEST_CASE("storm_update: noiseless recursion keeps the true gradient") {
  const auto p = make_nonconvex_smooth(6, 0.0, 3);
  RngStream rng(1);
  RngStream walk(2);
  DenseVector x_prev = p->start();
  StormState s = storm_init(*p, x_prev, 1, rng);
  for (int t = 0; t < 200; ++t) {
    const DenseVector x = x_prev + gaussian(walk, 6, 0.1);
    const SampleToken tok = p->draw(rng);
    s = storm_update(s, 0.01, p->grad_at(tok, x), p->grad_at(tok, x_prev));
    CHECK(max_abs(s.v - p->true_grad(x)) <= 1e-12);
    x_prev = x;
  }
}

TEST_CASE("comp_inner_update / comp_grad_update") {
  const CompState s{vec({1.0, 1.0}), vec({1.0})};
  CHECK(comp_inner_update(s, 1.0, vec({2.0, 0.0}), vec({9.0, 9.0})).u == vec({2.0, 0.0}));
  const DenseVector u = comp_inner_update(s, 0.5, vec({2.0, 0.0}), vec({1.5, 0.5})).u;
  CHECK(u[0] == doctest::Approx(1.75));
  CHECK(u[1] == doctest::Approx(0.25));

  const CompState one{vec({0.0}), vec({1.0})};
  const DenseMatrix j2 = DenseMatrix::Constant(1, 1, 2.0);
  const DenseMatrix j1 = DenseMatrix::Constant(1, 1, 1.0);
  CHECK(comp_grad_update(one, 0.5, vec({3.0}), j2, vec({1.0}), j1).v[0] == doctest::Approx(6.0));
  CHECK(comp_grad_update(one, 1.0, vec({3.0}), j2, vec({1.0}), j1).v[0] == doctest::Approx(6.0));
  CHECK_THROWS_AS(comp_grad_update(one, 0.5, vec({3.0, 1.0}), j2, vec({1.0}), j1),
                  std::invalid_argument);
  CHECK_THROWS_AS(comp_inner_update(s, 0.5, vec({1.0}), vec({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("compositional recursion: noiseless fixed point") {
  const auto p = make_compositional(4, 3, 0.0, 6);
  RngStream in(1);
  RngStream out(2);
  RngStream walk(3);
  DenseVector x_prev = p->start();
  CompState s = comp_init(*p, x_prev, 3, in, out);
  for (int t = 0; t < 200; ++t) {
    const DenseVector x = x_prev + gaussian(walk, 4, 0.05);
    const InnerToken z = p->draw_inner(in);
    const OuterToken xi = p->draw_outer(out);
    const DenseVector u_prev = s.u;
    s = comp_inner_update(s, 0.02, p->inner_value_at(z, x), p->inner_value_at(z, x_prev));
    CHECK(max_abs(s.u - p->inner_value(x)) <= 1e-12);
    s = comp_grad_update(s, 0.02, p->outer_grad_at(xi, s.u), p->inner_jacobian_at(z, x),
                         p->outer_grad_at(xi, u_prev), p->inner_jacobian_at(z, x_prev));
    CHECK(max_abs(s.v - p->true_grad(x)) <= 1e-12);
    x_prev = x;
  }
}

TEST_CASE("finite_sum_update: hand case and beta-zero limit") {
  GradTable table({vec({0.5}), vec({1.5})});
  const StormState s{vec({1.0})};
  const FiniteSumStep step = finite_sum_update(s, table, 0.5, 0, vec({2.0}), vec({1.0}));
  CHECK(step.state.v[0] == doctest::Approx(2.25));
  CHECK(step.table.entry(0)[0] == 2.0);
  CHECK(step.table.mean()[0] == doctest::Approx(1.75));

  const FiniteSumStep sarah = finite_sum_update(s, table, 0.0, 1, vec({2.0}), vec({0.25}));
  CHECK(sarah.state.v[0] == doctest::Approx(1.0 + 2.0 - 0.25));
  CHECK_THROWS_AS(finite_sum_update(s, table, 0.5, 2, vec({2.0}), vec({1.0})), std::out_of_range);
}

TEST_CASE("GradTable mean tracks the direct average") {
  RngStream rng(4);
  const std::size_t n = 13;
  std::vector<DenseVector> init;
  for (std::size_t i = 0; i < n; ++i) init.push_back(gaussian(rng, 3, 1.0));
  GradTable t(init);
  for (int step = 0; step < 10000; ++step) {
    t.overwrite(rng.uniform_index(n), gaussian(rng, 3, 5.0));
    if (step % 997 == 0 || step == 9999) {
      DenseVector direct = DenseVector::Zero(3);
      for (std::size_t i = 0; i < n; ++i) direct += t.entry(i);
      direct /= static_cast<double>(n);
      CHECK(max_abs(direct - t.mean()) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(GradTable(std::vector<DenseVector>{}), std::invalid_argument);
}

TEST_CASE("finite-sum estimators: conditional mean by enumeration") {
  // For every n <= 5, average the post-update estimator over all n indices and
  // compare with the same recursion on full gradients.
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto p = make_finite_sum(n, 3, 100 + n);
    RngStream rng(n);
    const DenseVector x_prev = gaussian(rng, 3, 1.0);
    const DenseVector x = x_prev + gaussian(rng, 3, 0.3);
    // A table filled at assorted earlier points, not just x_prev.
    std::vector<DenseVector> entries;
    for (std::size_t i = 0; i < n; ++i) entries.push_back(p->component_grad(i, gaussian(rng, 3, 1.0)));
    const GradTable table(entries);
    const StormState s{gaussian(rng, 3, 1.0)};
    SvrgSnapshot snap = SvrgSnapshot::refresh(*p, gaussian(rng, 3, 1.0), 3);
    snap.age = 2;

    for (double beta : {0.0, 1.0 / static_cast<double>(n), 0.7, 1.0}) {
      const DenseVector target =
          (1 - beta) * s.v + p->full_grad(x) - (1 - beta) * p->full_grad(x_prev);
      DenseVector sag = DenseVector::Zero(3);
      DenseVector svrg = DenseVector::Zero(3);
      for (std::size_t i = 0; i < n; ++i) {
        const DenseVector gn = p->component_grad(i, x);
        const DenseVector go = p->component_grad(i, x_prev);
        sag += finite_sum_update(s, table, beta, i, gn, go).state.v;
        svrg += svrg_update(s, snap, beta, gn, go, p->component_grad(i, snap.anchor)).v;
      }
      CHECK(max_abs(sag / static_cast<double>(n) - target) <= 1e-10);
      CHECK(max_abs(svrg / static_cast<double>(n) - target) <= 1e-10);
    }
  }
}

TEST_CASE("svrg_update") {
  const auto p = make_finite_sum(6, 2, 3);
  const DenseVector anchor = p->start() + DenseVector::Constant(2, 0.3);
  SvrgSnapshot snap = SvrgSnapshot::refresh(*p, anchor, 4);
  CHECK(snap.anchor_grad == p->full_grad(anchor));

  // Stationary anchor: x_t = x_{t-1} = anchor and v = grad F(anchor).
  const StormState s{snap.anchor_grad};
  for (std::size_t i = 0; i < p->n(); ++i) {
    const DenseVector gi = p->component_grad(i, anchor);
    const DenseVector v = svrg_update(s, snap, 0.25, gi, gi, gi).v;
    CHECK(max_abs(v - snap.anchor_grad) <= 1e-15);
  }

  const DenseVector gn = vec({1.0, 2.0});
  const DenseVector go = vec({0.5, -1.0});
  CHECK(svrg_update(s, snap, 0.0, gn, go, vec({7.0, 7.0})).v == s.v + gn - go);

  snap.age = 4;
  CHECK_THROWS_AS(svrg_update(s, snap, 0.25, gn, go, gn), std::logic_error);
}

TEST_CASE("variance reduction along a frozen slow path") {
  const Eigen::Index dim = 20;
  const auto p = make_noisy_quadratic(dim, 4.0, 1.0, 1.0, 5);
  const std::uint64_t T = 10000;
  const double beta = ada_beta(static_cast<double>(T));
  RngStream rng(8);
  RngStream init(9);
  DenseVector x_prev = p->start();
  StormState s = storm_init(*p, x_prev, initial_batch_size(T), init);
  double mse = 0.0;
  for (std::uint64_t t = 2; t <= T; ++t) {
    const DenseVector x = x_prev - 1e-6 * p->true_grad(x_prev);
    const SampleToken tok = p->draw(rng);
    s = storm_update(s, beta, p->grad_at(tok, x), p->grad_at(tok, x_prev));
    if (t > T / 2) mse += norm_sq(s.v - p->true_grad(x));
    x_prev = x;
  }
  mse /= static_cast<double>(T / 2);
  CHECK(mse / static_cast<double>(dim) < 0.5);
}
