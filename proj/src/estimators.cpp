#include "adastorm/estimators.hpp"

#include <stdexcept>
#include <string>

namespace adastorm {

namespace {

void require_same_dim(const DenseVector& a, const DenseVector& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
  }
}

void require_beta(double beta, const char* what) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": beta must lie in [0, 1]");
  }
}

}  // namespace

GradTable::GradTable(std::vector<DenseVector> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("GradTable: needs at least one entry");
  for (const auto& e : entries_) require_same_dim(e, entries_.front(), "GradTable");
  resync();
}

GradTable GradTable::full_pass(const FiniteSumProblem& problem, const DenseVector& x) {
  std::vector<DenseVector> entries;
  entries.reserve(problem.n());
  for (std::size_t i = 0; i < problem.n(); ++i) entries.push_back(problem.component_grad(i, x));
  return GradTable(std::move(entries));
}

void GradTable::overwrite(std::size_t i, DenseVector grad) {
  if (i >= entries_.size()) throw std::out_of_range("GradTable: index out of range");
  require_same_dim(grad, mean_, "GradTable::overwrite");
  mean_ += (grad - entries_[i]) / static_cast<double>(entries_.size());
  entries_[i] = std::move(grad);
  if (++since_resync_ >= kResyncPeriod) resync();
}

void GradTable::resync() {
  DenseVector sum = DenseVector::Zero(entries_.front().size());
  for (const auto& e : entries_) sum += e;
  mean_ = sum / static_cast<double>(entries_.size());
  since_resync_ = 0;
}

SvrgSnapshot SvrgSnapshot::refresh(const FiniteSumProblem& problem, const DenseVector& x,
                                   std::size_t period) {
  if (period < 1) throw std::invalid_argument("SvrgSnapshot: period must be at least 1");
  return SvrgSnapshot{x, problem.full_grad(x), 0, period};
}

StormState storm_init(const StochasticProblem& problem, const DenseVector& x, std::size_t batch,
                      RngStream& rng) {
  if (batch < 1) throw std::invalid_argument("storm_init: batch size must be at least 1");
  DenseVector sum = DenseVector::Zero(problem.dim());
  for (std::size_t i = 0; i < batch; ++i) sum += problem.grad_at(problem.draw(rng), x);
  return StormState{sum / static_cast<double>(batch)};
}

StormState storm_update(const StormState& state, double beta, const DenseVector& grad_new,
                        const DenseVector& grad_old) {
  require_beta(beta, "storm_update");
  require_same_dim(state.v, grad_new, "storm_update");
  require_same_dim(state.v, grad_old, "storm_update");
  // Same recursion as (1-b)v + b*g_new + (1-b)(g_new - g_old); this grouping
  // reproduces g_new bit for bit whenever v == g_old.
  return StormState{grad_new + (1.0 - beta) * (state.v - grad_old)};
}

CompState comp_init(const CompositionalProblem& problem, const DenseVector& x, std::size_t batch,
                    RngStream& inner_rng, RngStream& outer_rng) {
  if (batch < 1) throw std::invalid_argument("comp_init: batch size must be at least 1");
  std::vector<InnerToken> inner;
  inner.reserve(batch);
  DenseVector u = DenseVector::Zero(problem.mid_dim());
  for (std::size_t i = 0; i < batch; ++i) {
    inner.push_back(problem.draw_inner(inner_rng));
    u += problem.inner_value_at(inner.back(), x);
  }
  u /= static_cast<double>(batch);
  DenseVector v = DenseVector::Zero(problem.dim());
  for (std::size_t i = 0; i < batch; ++i) {
    const OuterToken xi = problem.draw_outer(outer_rng);
    v += problem.inner_jacobian_at(inner[i], x).transpose() * problem.outer_grad_at(xi, u);
  }
  v /= static_cast<double>(batch);
  return CompState{std::move(u), std::move(v)};
}

CompState comp_inner_update(const CompState& state, double beta, const DenseVector& g_new,
                            const DenseVector& g_old) {
  require_beta(beta, "comp_inner_update");
  require_same_dim(state.u, g_new, "comp_inner_update");
  require_same_dim(state.u, g_old, "comp_inner_update");
  return CompState{g_new + (1.0 - beta) * (state.u - g_old), state.v};
}

CompState comp_grad_update(const CompState& state, double beta, const DenseVector& outer_new,
                           const DenseMatrix& jac_new, const DenseVector& outer_old,
                           const DenseMatrix& jac_old) {
  require_beta(beta, "comp_grad_update");
  if (jac_new.rows() != outer_new.size() || jac_old.rows() != outer_old.size() ||
      jac_new.cols() != state.v.size() || jac_old.cols() != state.v.size()) {
    throw std::invalid_argument("comp_grad_update: dimension mismatch");
  }
  const DenseVector product_new = jac_new.transpose() * outer_new;
  const DenseVector product_old = jac_old.transpose() * outer_old;
  return CompState{state.u, product_new + (1.0 - beta) * (state.v - product_old)};
}

FiniteSumStep finite_sum_update(const StormState& state, GradTable table, double beta,
                                std::size_t index, const DenseVector& grad_i_new,
                                const DenseVector& grad_i_old) {
  require_beta(beta, "finite_sum_update");
  if (index >= table.size()) {
    throw std::out_of_range("finite_sum_update: component index " + std::to_string(index) +
                            " out of range for n = " + std::to_string(table.size()));
  }
  require_same_dim(state.v, grad_i_new, "finite_sum_update");
  require_same_dim(state.v, grad_i_old, "finite_sum_update");
  DenseVector v = grad_i_new + (1.0 - beta) * (state.v - grad_i_old) -
                  beta * (table.entry(index) - table.mean());
  table.overwrite(index, grad_i_new);
  return FiniteSumStep{StormState{std::move(v)}, std::move(table)};
}

StormState svrg_update(const StormState& state, const SvrgSnapshot& snapshot, double beta,
                       const DenseVector& grad_i_new, const DenseVector& grad_i_old,
                       const DenseVector& grad_i_anchor) {
  require_beta(beta, "svrg_update");
  if (snapshot.age >= snapshot.period) {
    throw std::logic_error("svrg_update: snapshot is " + std::to_string(snapshot.age) +
                           " steps old, refresh period is " + std::to_string(snapshot.period));
  }
  require_same_dim(state.v, grad_i_new, "svrg_update");
  require_same_dim(state.v, grad_i_old, "svrg_update");
  require_same_dim(state.v, grad_i_anchor, "svrg_update");
  return StormState{grad_i_new + (1.0 - beta) * (state.v - grad_i_old) -
                    beta * (grad_i_anchor - snapshot.anchor_grad)};
}

}  // namespace adastorm
