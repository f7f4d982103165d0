#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "adastorm/problems.hpp"

using namespace adastorm;

namespace {

DenseVector vec(std::initializer_list<double> xs) {
  DenseVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("quadratic: scalar identity") {
  const NoisyQuadratic q(DenseMatrix::Identity(1, 1), DenseVector::Zero(1), 0.0, vec({3.0}));
  CHECK(q.true_grad(vec({2.5}))[0] == 2.5);
  CHECK(q.objective(vec({2.0})) == 2.0);
  CHECK(q.metadata().L == doctest::Approx(1.0));
  CHECK(q.metadata().delta_f == doctest::Approx(4.5));
}

TEST_CASE("quadratic: factory validation and spectrum") {
  CHECK_THROWS_AS(make_noisy_quadratic(3, 1.0, 2.0, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_noisy_quadratic(3, 1.0, 0.0, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_noisy_quadratic(3, 1.0, 0.5, -0.1, 1), std::invalid_argument);

  const auto q = make_noisy_quadratic(6, 5.0, 0.5, 1.0, 42);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(q->hessian());
  CHECK(eig.eigenvalues().minCoeff() == doctest::Approx(0.5));
  CHECK(eig.eigenvalues().maxCoeff() == doctest::Approx(5.0));
  CHECK(q->true_grad(q->minimizer()).norm() < 1e-12);
}

TEST_CASE("quadratic: same-token noise cancels") {
  const auto q = make_noisy_quadratic(5, 4.0, 1.0, 2.0, 3);
  RngStream rng(1);
  RngStream pts(2);
  for (int k = 0; k < 20; ++k) {
    const SampleToken t = q->draw(rng);
    const DenseVector x = gaussian(pts, 5, 1.0);
    const DenseVector y = gaussian(pts, 5, 1.0);
    const DenseVector diff = q->grad_at(t, x) - q->grad_at(t, y);
    CHECK((diff - q->hessian() * (x - y)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(diff.norm() <= q->metadata().L * (x - y).norm() * (1 + 1e-12));
    // Purity: re-evaluation is bit-identical.
    CHECK(q->grad_at(t, x) == q->grad_at(t, x));
  }
}

TEST_CASE("quadratic: Monte-Carlo unbiasedness") {
  const auto q = make_noisy_quadratic(4, 4.0, 1.0, 1.0, 8);
  RngStream rng(77);
  const DenseVector x = q->start();
  DenseVector mean = DenseVector::Zero(4);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) mean += q->grad_at(q->draw(rng), x);
  mean /= draws;
  // sd of the mean is sigma / 100 per coordinate.
  CHECK((mean - q->true_grad(x)).cwiseAbs().maxCoeff() <= 3.0 * 1.0 / 100.0);
}

TEST_CASE("nonconvex: hand values and finite differences") {
  const NonconvexSmooth p(vec({1.0}), 0.0, 0.0, vec({2.0}));
  CHECK(p.true_grad(vec({1.0}))[0] == doctest::Approx(1.0));  // 2x/(1+x^2)
  CHECK(p.objective(vec({1.0})) == doctest::Approx(std::log(2.0)));

  const auto q = make_nonconvex_smooth(10, 0.5, 9);
  CHECK(q->true_grad(DenseVector::Zero(10)).norm() == 0.0);
  RngStream rng(10);
  for (int k = 0; k < 100; ++k) {
    CHECK(grad_check(*q, gaussian(rng, 10, 3.0), 1e-5) < 1e-6);
  }
}

TEST_CASE("finite sum: exact component average") {
  const auto single = make_finite_sum(1, 4, 5);
  RngStream rng(6);
  const DenseVector x = gaussian(rng, 4, 1.0);
  CHECK(single->full_grad(x) == single->component_grad(0, x));

  const auto p = make_finite_sum(25, 4, 5);
  for (int k = 0; k < 20; ++k) {
    const DenseVector y = gaussian(rng, 4, 1.0);
    DenseVector avg = DenseVector::Zero(4);
    for (std::size_t i = 0; i < p->n(); ++i) avg += p->component_grad(i, y);
    avg /= 25.0;
    CHECK((p->full_grad(y) - avg).cwiseAbs().maxCoeff() <= 1e-14);
  }
  CHECK_THROWS_AS(p->component_grad(25, x), std::out_of_range);
  CHECK_THROWS_AS(make_finite_sum(0, 4, 1), std::invalid_argument);
}

TEST_CASE("finite sum: loss derivative against central differences") {
  for (double r : {-3.0, -1.0, -0.2, 0.0, 0.4, 1.0, 2.5}) {
    const double h = 1e-6;
    const double fd = (robust_loss(r + h) - robust_loss(r - h)) / (2 * h);
    const double d = robust_loss_derivative(r);
    const double err = std::abs(d) < 1e-12 ? std::abs(fd - d) : std::abs(fd - d) / std::abs(d);
    CHECK(err < 1e-6);
  }
}

TEST_CASE("compositional: hand chain rule and stationary point") {
  const LinearQuadraticComposite p((DenseMatrix(1, 1) << 2.0).finished(), vec({0.0}), 0.0,
                                   vec({1.0}));
  CHECK(p.true_grad(vec({1.0}))[0] == doctest::Approx(4.0));

  // Square invertible map: the root of Mx + c is a stationary point.
  const DenseMatrix M = (DenseMatrix(2, 2) << 2, 1, 0, 1).finished();
  const DenseVector c = vec({1.0, -2.0});
  const LinearQuadraticComposite q(M, c, 0.0, vec({0.0, 0.0}));
  const DenseVector root = M.lu().solve(-c);
  CHECK(q.true_grad(root).norm() < 1e-14);
}

TEST_CASE("compositional: Monte-Carlo unbiasedness of the sampled chain") {
  const auto p = make_compositional(3, 2, 0.5, 4);
  RngStream inner(1);
  RngStream outer(2);
  const DenseVector x = p->start();
  const DenseVector u = p->inner_value(x);
  const int draws = 10000;
  DenseVector mean = DenseVector::Zero(3);
  DenseVector mean_sq = DenseVector::Zero(3);
  for (int i = 0; i < draws; ++i) {
    const InnerToken z = p->draw_inner(inner);
    const OuterToken xi = p->draw_outer(outer);
    // Independent zeta and xi make J(x; zeta)' grad f(u; xi) unbiased at the true u.
    const DenseVector s = p->inner_jacobian_at(z, x).transpose() * p->outer_grad_at(xi, u);
    mean += s;
    mean_sq += s.cwiseProduct(s);
  }
  mean /= draws;
  mean_sq /= draws;
  const DenseVector sd = (mean_sq - mean.cwiseProduct(mean)).cwiseSqrt() / std::sqrt(draws);
  const DenseVector dev = (mean - p->true_grad(x)).cwiseAbs();
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(dev[j] <= 3.0 * sd[j]);
}

TEST_CASE("grad_check: exactness cases and errors") {
  const auto linear = [](const DenseVector& x) { return 3.0 * x[0] - 2.0 * x[1] + 1.0; };
  const auto linear_grad = [](const DenseVector&) { return (DenseVector(2) << 3.0, -2.0).finished(); };
  for (double h : {1e-6, 1e-3, 1.0, 10.0}) {
    CHECK(grad_check(linear, linear_grad, (DenseVector(2) << 0.5, -1.0).finished(), h) <= 1e-8);
  }
  const auto q = make_noisy_quadratic(5, 3.0, 1.0, 0.0, 2);
  RngStream rng(3);
  for (int k = 0; k < 20; ++k) CHECK(grad_check(*q, gaussian(rng, 5, 1.0), 1e-4) <= 1e-9);

  // Zero gradient: absolute error is reported.
  const auto zero = [](const DenseVector&) { return 1.0; };
  const auto zero_grad = [](const DenseVector& x) { return DenseVector::Zero(x.size()).eval(); };
  CHECK(grad_check(zero, zero_grad, DenseVector::Ones(3), 1e-3) == 0.0);

  CHECK_THROWS_AS(grad_check(*q, DenseVector::Zero(5), 0.0), std::invalid_argument);
}
