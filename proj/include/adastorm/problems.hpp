#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "adastorm/numerics.hpp"

namespace adastorm {

/// Problem constants recorded alongside each synthetic instance.
struct ProblemMetadata {
  double L = 0.0;        ///< smoothness (mean-square for stochastic oracles)
  double sigma = 0.0;    ///< bound on sqrt(E||oracle - truth||^2)
  double delta_f = 0.0;  ///< upper bound on objective(start) - inf objective
  double C = 0.0;        ///< compositional only: Lipschitz constant over the working ball
};

/// Frozen randomness of one stochastic-gradient draw. For the additive-noise
/// oracles used here it is the realized noise vector, so grad_at(token, x)
/// and grad_at(token, y) share exactly the same sample.
struct SampleToken {
  DenseVector noise;
};

/// Stochastic first-order oracle for min_x f(x) = E[f(x; xi)].
///
/// The default oracle is additive: grad_at(token, x) = true_grad(x) + noise,
/// with i.i.d. N(0, noise_stddev^2) components per draw.
class StochasticProblem {
 public:
  virtual ~StochasticProblem() = default;

  virtual std::string name() const = 0;
  Eigen::Index dim() const { return start_.size(); }
  virtual double objective(const DenseVector& x) const = 0;
  virtual DenseVector true_grad(const DenseVector& x) const = 0;

  virtual SampleToken draw(RngStream& rng) const;
  virtual DenseVector grad_at(const SampleToken& token, const DenseVector& x) const;

  const DenseVector& start() const { return start_; }
  double noise_stddev() const { return noise_stddev_; }
  const ProblemMetadata& metadata() const { return meta_; }

 protected:
  StochasticProblem(DenseVector start, double noise_stddev);

  DenseVector start_;
  double noise_stddev_;
  ProblemMetadata meta_;
};

/// f(x) = 1/2 x'Ax + b'x with symmetric positive definite A.
class NoisyQuadratic final : public StochasticProblem {
 public:
  NoisyQuadratic(DenseMatrix A, DenseVector b, double noise_stddev, DenseVector start);

  std::string name() const override { return "quadratic"; }
  double objective(const DenseVector& x) const override;
  DenseVector true_grad(const DenseVector& x) const override;

  const DenseMatrix& hessian() const { return A_; }
  const DenseVector& linear_term() const { return b_; }
  DenseVector minimizer() const;

 private:
  DenseMatrix A_;
  DenseVector b_;
};

/// f(x) = sum_j c_j log(1 + x_j^2) + eps/2 ||x||^2. Non-convex for |x_j| > 1
/// when eps is small; the unique minimizer is the origin.
class NonconvexSmooth final : public StochasticProblem {
 public:
  NonconvexSmooth(DenseVector weights, double eps, double noise_stddev, DenseVector start);

  std::string name() const override { return "nonconvex"; }
  double objective(const DenseVector& x) const override;
  DenseVector true_grad(const DenseVector& x) const override;

 private:
  DenseVector c_;
  double eps_;
};

/// Noise realization for the inner map g: value noise and Jacobian noise.
struct InnerToken {
  DenseVector value_noise;
  DenseMatrix jac_noise;
};

/// Noise realization for the outer gradient.
struct OuterToken {
  DenseVector noise;
};

/// Two-level problem F(x) = f(g(x)), g: R^d -> R^m.
/// Jacobians are stored m x d, so grad F(x) = J(x)' grad f(g(x)).
class CompositionalProblem {
 public:
  virtual ~CompositionalProblem() = default;

  virtual std::string name() const = 0;
  Eigen::Index dim() const { return start_.size(); }
  virtual Eigen::Index mid_dim() const = 0;

  virtual DenseVector inner_value(const DenseVector& x) const = 0;
  virtual DenseMatrix inner_jacobian(const DenseVector& x) const = 0;
  virtual DenseVector outer_grad(const DenseVector& u) const = 0;
  virtual double outer_value(const DenseVector& u) const = 0;

  InnerToken draw_inner(RngStream& rng) const;
  OuterToken draw_outer(RngStream& rng) const;
  DenseVector inner_value_at(const InnerToken& token, const DenseVector& x) const;
  DenseMatrix inner_jacobian_at(const InnerToken& token, const DenseVector& x) const;
  DenseVector outer_grad_at(const OuterToken& token, const DenseVector& u) const;

  double objective(const DenseVector& x) const;
  /// J(x)' grad f(g(x)), evaluated through the same products the estimator uses.
  DenseVector true_grad(const DenseVector& x) const;

  const DenseVector& start() const { return start_; }
  double noise_stddev() const { return noise_stddev_; }
  const ProblemMetadata& metadata() const { return meta_; }
  /// Iterates are expected to stay within this radius (where C and L hold).
  double working_radius() const { return working_radius_; }

 protected:
  CompositionalProblem(DenseVector start, double noise_stddev);

  DenseVector start_;
  double noise_stddev_;
  double working_radius_ = 1e3;
  ProblemMetadata meta_;
};

/// g(x) = Mx + c, f(u) = 1/2 ||u||^2, so F(x) = 1/2 ||Mx + c||^2.
class LinearQuadraticComposite final : public CompositionalProblem {
 public:
  LinearQuadraticComposite(DenseMatrix M, DenseVector c, double noise_stddev,
                           DenseVector start);

  std::string name() const override { return "compositional"; }
  Eigen::Index mid_dim() const override { return M_.rows(); }
  DenseVector inner_value(const DenseVector& x) const override;
  DenseMatrix inner_jacobian(const DenseVector& x) const override;
  DenseVector outer_grad(const DenseVector& u) const override;
  double outer_value(const DenseVector& u) const override;

 private:
  DenseMatrix M_;
  DenseVector c_;
};

/// F(x) = (1/n) sum_i f_i(x). Component indices are zero-based.
class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t n() const = 0;
  Eigen::Index dim() const { return start_.size(); }
  virtual double component_value(std::size_t i, const DenseVector& x) const = 0;
  virtual DenseVector component_grad(std::size_t i, const DenseVector& x) const = 0;

  double objective(const DenseVector& x) const;
  /// Arithmetic mean of all component gradients.
  DenseVector full_grad(const DenseVector& x) const;

  const DenseVector& start() const { return start_; }
  const ProblemMetadata& metadata() const { return meta_; }

 protected:
  explicit FiniteSumProblem(DenseVector start);

  DenseVector start_;
  ProblemMetadata meta_;
};

/// Robust regression loss l(r) = r^2 / (1 + r^2) on residuals a_i'x - b_i.
double robust_loss(double r);
double robust_loss_derivative(double r);

class RobustRegression final : public FiniteSumProblem {
 public:
  /// Rows of `features` are the a_i.
  RobustRegression(DenseMatrix features, DenseVector targets, DenseVector start);

  std::string name() const override { return "finite_sum"; }
  std::size_t n() const override { return static_cast<std::size_t>(A_.rows()); }
  double component_value(std::size_t i, const DenseVector& x) const override;
  DenseVector component_grad(std::size_t i, const DenseVector& x) const override;

 private:
  double residual(std::size_t i, const DenseVector& x) const;

  DenseMatrix A_;
  DenseVector b_;
};

/// Spectrum of A spans [mu, L]; b and the start point are seeded Gaussians.
/// Throws std::invalid_argument unless 0 < mu <= L and sigma >= 0.
std::unique_ptr<NoisyQuadratic> make_noisy_quadratic(Eigen::Index dim, double L, double mu,
                                                     double sigma, std::uint64_t seed);

/// Weights c_j in [0.5, 2], eps = 1e-2, start point drawn away from the origin.
std::unique_ptr<NonconvexSmooth> make_nonconvex_smooth(Eigen::Index dim, double sigma,
                                                       std::uint64_t seed);

std::unique_ptr<RobustRegression> make_finite_sum(std::size_t n, Eigen::Index dim,
                                                  std::uint64_t seed);

std::unique_ptr<LinearQuadraticComposite> make_compositional(Eigen::Index dim,
                                                             Eigen::Index mid_dim,
                                                             double sigma,
                                                             std::uint64_t seed);

/// Below this gradient scale grad_check reports absolute rather than relative error.
inline constexpr double kGradCheckFloor = 1e-12;

/// Central finite differences of `objective` against `gradient` at x.
/// Returns ||fd - g||_inf / ||g||_inf, or the plain ||fd - g||_inf when
/// ||g||_inf < kGradCheckFloor. Throws std::invalid_argument unless h > 0.
double grad_check(const std::function<double(const DenseVector&)>& objective,
                  const std::function<DenseVector(const DenseVector&)>& gradient,
                  const DenseVector& x, double h);
double grad_check(const StochasticProblem& problem, const DenseVector& x, double h);
double grad_check(const CompositionalProblem& problem, const DenseVector& x, double h);
double grad_check(const FiniteSumProblem& problem, const DenseVector& x, double h);

}  // namespace adastorm
