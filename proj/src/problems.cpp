#include "adastorm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adastorm {

namespace {

DenseMatrix gaussian_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols,
                            double sigma) {
  DenseMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = sigma * rng.normal();
  }
  return m;
}

void require_dim(Eigen::Index d, const char* what) {
  if (d < 1) throw std::invalid_argument(std::string(what) + " must be at least 1");
}

void require_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be finite and nonnegative");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// StochasticProblem

StochasticProblem::StochasticProblem(DenseVector start, double noise_stddev)
    : start_(std::move(start)), noise_stddev_(noise_stddev) {
  require_sigma(noise_stddev);
  require_dim(start_.size(), "dim");
}

SampleToken StochasticProblem::draw(RngStream& rng) const {
  return SampleToken{gaussian(rng, dim(), noise_stddev_)};
}

DenseVector StochasticProblem::grad_at(const SampleToken& token, const DenseVector& x) const {
  DenseVector g = true_grad(x);
  if (token.noise.size() != g.size()) {
    throw std::invalid_argument("grad_at: token dimension does not match problem");
  }
  g += token.noise;
  return g;
}

NoisyQuadratic::NoisyQuadratic(DenseMatrix A, DenseVector b, double noise_stddev,
                               DenseVector start)
    : StochasticProblem(std::move(start), noise_stddev), A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != dim() || A_.cols() != dim() || b_.size() != dim()) {
    throw std::invalid_argument("NoisyQuadratic: inconsistent dimensions");
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(A_);
  const auto& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    throw std::invalid_argument("NoisyQuadratic: Hessian must be positive definite");
  }
  meta_.L = ev.maxCoeff();
  meta_.sigma = noise_stddev * std::sqrt(static_cast<double>(dim()));
  meta_.delta_f = objective(start_) - objective(minimizer());
}

double NoisyQuadratic::objective(const DenseVector& x) const {
  return 0.5 * x.dot(A_ * x) + b_.dot(x);
}

DenseVector NoisyQuadratic::true_grad(const DenseVector& x) const {
  DenseVector g = A_ * x;
  g += b_;
  return g;
}

DenseVector NoisyQuadratic::minimizer() const { return A_.ldlt().solve(-b_); }

NonconvexSmooth::NonconvexSmooth(DenseVector weights, double eps, double noise_stddev,
                                 DenseVector start)
    : StochasticProblem(std::move(start), noise_stddev), c_(std::move(weights)), eps_(eps) {
  if (c_.size() != dim()) throw std::invalid_argument("NonconvexSmooth: weight dimension");
  if (c_.minCoeff() <= 0.0) throw std::invalid_argument("NonconvexSmooth: weights must be > 0");
  if (eps_ < 0.0) throw std::invalid_argument("NonconvexSmooth: eps must be >= 0");
  // |d^2/dx^2 c log(1+x^2)| = 2c|1-x^2|/(1+x^2)^2 peaks at x = 0.
  meta_.L = 2.0 * c_.maxCoeff() + eps_;
  meta_.sigma = noise_stddev * std::sqrt(static_cast<double>(dim()));
  meta_.delta_f = objective(start_);
}

double NonconvexSmooth::objective(const DenseVector& x) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) s += c_[j] * std::log1p(x[j] * x[j]);
  return s + 0.5 * eps_ * x.dot(x);
}

DenseVector NonconvexSmooth::true_grad(const DenseVector& x) const {
  DenseVector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    g[j] = 2.0 * c_[j] * x[j] / (1.0 + x[j] * x[j]) + eps_ * x[j];
  }
  return g;
}

// ---------------------------------------------------------------------------
// CompositionalProblem

CompositionalProblem::CompositionalProblem(DenseVector start, double noise_stddev)
    : start_(std::move(start)), noise_stddev_(noise_stddev) {
  require_sigma(noise_stddev);
  require_dim(start_.size(), "dim");
}

InnerToken CompositionalProblem::draw_inner(RngStream& rng) const {
  InnerToken token;
  token.value_noise = gaussian(rng, mid_dim(), noise_stddev_);
  token.jac_noise = DenseMatrix::Zero(mid_dim(), dim());
  if (noise_stddev_ > 0.0) {
    for (Eigen::Index j = 0; j < dim(); ++j) {
      for (Eigen::Index i = 0; i < mid_dim(); ++i) token.jac_noise(i, j) = noise_stddev_ * rng.normal();
    }
  }
  return token;
}

OuterToken CompositionalProblem::draw_outer(RngStream& rng) const {
  return OuterToken{gaussian(rng, mid_dim(), noise_stddev_)};
}

DenseVector CompositionalProblem::inner_value_at(const InnerToken& token,
                                                 const DenseVector& x) const {
  DenseVector g = inner_value(x);
  g += token.value_noise;
  return g;
}

DenseMatrix CompositionalProblem::inner_jacobian_at(const InnerToken& token,
                                                    const DenseVector& x) const {
  DenseMatrix j = inner_jacobian(x);
  j += token.jac_noise;
  return j;
}

DenseVector CompositionalProblem::outer_grad_at(const OuterToken& token,
                                                const DenseVector& u) const {
  DenseVector g = outer_grad(u);
  g += token.noise;
  return g;
}

double CompositionalProblem::objective(const DenseVector& x) const {
  return outer_value(inner_value(x));
}

DenseVector CompositionalProblem::true_grad(const DenseVector& x) const {
  return inner_jacobian(x).transpose() * outer_grad(inner_value(x));
}

LinearQuadraticComposite::LinearQuadraticComposite(DenseMatrix M, DenseVector c,
                                                   double noise_stddev, DenseVector start)
    : CompositionalProblem(std::move(start), noise_stddev), M_(std::move(M)), c_(std::move(c)) {
  if (M_.cols() != dim() || M_.rows() != c_.size() || M_.rows() < 1) {
    throw std::invalid_argument("LinearQuadraticComposite: inconsistent dimensions");
  }
  const double m_norm = Eigen::JacobiSVD<DenseMatrix>(M_).singularValues()(0);
  // Over the ball ||x|| <= R: ||grad f(g(x))|| = ||Mx + c|| <= ||M|| R + ||c||.
  const double outer_lip = m_norm * working_radius_ + c_.norm();
  meta_.C = std::max(m_norm * m_norm, outer_lip * outer_lip);
  meta_.L = std::max(1.0, m_norm * m_norm);
  meta_.sigma = noise_stddev * std::sqrt(static_cast<double>(mid_dim() * std::max<Eigen::Index>(dim(), 1)));
  meta_.delta_f = objective(start_);
}

DenseVector LinearQuadraticComposite::inner_value(const DenseVector& x) const {
  DenseVector g = M_ * x;
  g += c_;
  return g;
}

DenseMatrix LinearQuadraticComposite::inner_jacobian(const DenseVector&) const { return M_; }

DenseVector LinearQuadraticComposite::outer_grad(const DenseVector& u) const { return u; }

double LinearQuadraticComposite::outer_value(const DenseVector& u) const {
  return 0.5 * u.dot(u);
}

// ---------------------------------------------------------------------------
// FiniteSumProblem

FiniteSumProblem::FiniteSumProblem(DenseVector start) : start_(std::move(start)) {
  require_dim(start_.size(), "dim");
}

double FiniteSumProblem::objective(const DenseVector& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n(); ++i) s += component_value(i, x);
  return s / static_cast<double>(n());
}

DenseVector FiniteSumProblem::full_grad(const DenseVector& x) const {
  DenseVector sum = DenseVector::Zero(dim());
  for (std::size_t i = 0; i < n(); ++i) sum += component_grad(i, x);
  return sum / static_cast<double>(n());
}

double robust_loss(double r) { return r * r / (1.0 + r * r); }

double robust_loss_derivative(double r) {
  const double q = 1.0 + r * r;
  return 2.0 * r / (q * q);
}

RobustRegression::RobustRegression(DenseMatrix features, DenseVector targets,
                                   DenseVector start)
    : FiniteSumProblem(std::move(start)), A_(std::move(features)), b_(std::move(targets)) {
  if (A_.rows() < 1 || A_.rows() != b_.size() || A_.cols() != dim()) {
    throw std::invalid_argument("RobustRegression: inconsistent dimensions");
  }
  // sup |l''| = l''(0) = 2, so f_i is 2||a_i||^2-smooth.
  meta_.L = 2.0 * A_.rowwise().squaredNorm().maxCoeff();
  meta_.delta_f = objective(start_);
}

double RobustRegression::residual(std::size_t i, const DenseVector& x) const {
  if (i >= n()) throw std::out_of_range("RobustRegression: component index out of range");
  return A_.row(static_cast<Eigen::Index>(i)).dot(x) - b_[static_cast<Eigen::Index>(i)];
}

double RobustRegression::component_value(std::size_t i, const DenseVector& x) const {
  return robust_loss(residual(i, x));
}

DenseVector RobustRegression::component_grad(std::size_t i, const DenseVector& x) const {
  const double s = robust_loss_derivative(residual(i, x));
  return s * A_.row(static_cast<Eigen::Index>(i)).transpose();
}

// ---------------------------------------------------------------------------
// Factories

std::unique_ptr<NoisyQuadratic> make_noisy_quadratic(Eigen::Index dim, double L, double mu,
                                                     double sigma, std::uint64_t seed) {
  require_dim(dim, "dim");
  require_sigma(sigma);
  if (!(mu > 0.0) || !(mu <= L) || !std::isfinite(L)) {
    throw std::invalid_argument("make_noisy_quadratic: need 0 < mu <= L, got mu=" +
                                std::to_string(mu) + ", L=" + std::to_string(L));
  }
  RngStream root = RngStream(seed).split("problem/quadratic");
  RngStream rot_rng = root.split("rotation");
  RngStream b_rng = root.split("offset");
  RngStream x_rng = root.split("start");

  DenseVector spectrum(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    spectrum[j] = dim == 1 ? L : mu + (L - mu) * static_cast<double>(j) / static_cast<double>(dim - 1);
  }
  const DenseMatrix Q = gaussian_matrix(rot_rng, dim, dim, 1.0).householderQr().householderQ();
  DenseMatrix A = Q * spectrum.asDiagonal() * Q.transpose();
  A = 0.5 * (A + A.transpose()).eval();

  DenseVector b = gaussian(b_rng, dim, 1.0);
  DenseVector start = gaussian(x_rng, dim, 1.0);
  return std::make_unique<NoisyQuadratic>(std::move(A), std::move(b), sigma, std::move(start));
}

std::unique_ptr<NonconvexSmooth> make_nonconvex_smooth(Eigen::Index dim, double sigma,
                                                       std::uint64_t seed) {
  require_dim(dim, "dim");
  require_sigma(sigma);
  RngStream root = RngStream(seed).split("problem/nonconvex");
  RngStream c_rng = root.split("weights");
  RngStream x_rng = root.split("start");
  DenseVector c(dim);
  for (Eigen::Index j = 0; j < dim; ++j) c[j] = 0.5 + 1.5 * c_rng.uniform();
  DenseVector start(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = 1.0 + 2.0 * x_rng.uniform();
    start[j] = x_rng.uniform() < 0.5 ? -mag : mag;
  }
  return std::make_unique<NonconvexSmooth>(std::move(c), 1e-2, sigma, std::move(start));
}

std::unique_ptr<RobustRegression> make_finite_sum(std::size_t n, Eigen::Index dim,
                                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("make_finite_sum: n must be at least 1");
  require_dim(dim, "dim");
  RngStream root = RngStream(seed).split("problem/finite_sum");
  RngStream a_rng = root.split("features");
  RngStream w_rng = root.split("truth");
  RngStream e_rng = root.split("residuals");

  const auto rows = static_cast<Eigen::Index>(n);
  DenseMatrix A = gaussian_matrix(a_rng, rows, dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  const DenseVector truth = gaussian(w_rng, dim, 1.0);
  DenseVector b = A * truth;
  for (Eigen::Index i = 0; i < rows; ++i) {
    b[i] += 0.1 * e_rng.normal();
    // Roughly one in ten targets is a gross outlier.
    if (e_rng.uniform() < 0.1) b[i] += 5.0 * e_rng.normal();
  }
  return std::make_unique<RobustRegression>(std::move(A), std::move(b), DenseVector::Zero(dim));
}

std::unique_ptr<LinearQuadraticComposite> make_compositional(Eigen::Index dim,
                                                             Eigen::Index mid_dim,
                                                             double sigma,
                                                             std::uint64_t seed) {
  require_dim(dim, "dim");
  require_dim(mid_dim, "mid_dim");
  require_sigma(sigma);
  RngStream root = RngStream(seed).split("problem/compositional");
  RngStream m_rng = root.split("map");
  RngStream c_rng = root.split("shift");
  RngStream x_rng = root.split("start");
  DenseMatrix M = gaussian_matrix(m_rng, mid_dim, dim, 1.0 / std::sqrt(static_cast<double>(mid_dim)));
  DenseVector c = gaussian(c_rng, mid_dim, 1.0);
  DenseVector start = gaussian(x_rng, dim, 1.0);
  return std::make_unique<LinearQuadraticComposite>(std::move(M), std::move(c), sigma,
                                                    std::move(start));
}

// ---------------------------------------------------------------------------
// Gradient checking

double grad_check(const std::function<double(const DenseVector&)>& objective,
                  const std::function<DenseVector(const DenseVector&)>& gradient,
                  const DenseVector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: step h must be positive");
  const DenseVector g = gradient(x);
  if (g.size() != x.size()) throw std::invalid_argument("grad_check: gradient dimension");
  double worst = 0.0;
  DenseVector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double fp = objective(probe);
    probe[j] = x[j] - h;
    const double fm = objective(probe);
    probe[j] = x[j];
    worst = std::max(worst, std::abs((fp - fm) / (2.0 * h) - g[j]));
  }
  const double scale = g.cwiseAbs().maxCoeff();
  return scale < kGradCheckFloor ? worst : worst / scale;
}

double grad_check(const StochasticProblem& problem, const DenseVector& x, double h) {
  return grad_check([&](const DenseVector& p) { return problem.objective(p); },
                    [&](const DenseVector& p) { return problem.true_grad(p); }, x, h);
}

double grad_check(const CompositionalProblem& problem, const DenseVector& x, double h) {
  return grad_check([&](const DenseVector& p) { return problem.objective(p); },
                    [&](const DenseVector& p) { return problem.true_grad(p); }, x, h);
}

double grad_check(const FiniteSumProblem& problem, const DenseVector& x, double h) {
  return grad_check([&](const DenseVector& p) { return problem.objective(p); },
                    [&](const DenseVector& p) { return problem.full_grad(p); }, x, h);
}

}  // namespace adastorm
