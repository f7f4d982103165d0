#pragma once

#include <cstddef>
#include <vector>

#include "adastorm/numerics.hpp"
#include "adastorm/problems.hpp"

namespace adastorm {

// Recursive momentum estimators. Every update is a pure function returning
// the next state; callers own sampling so that both evaluation points of a
// step share one token.

struct StormState {
  DenseVector v;
};

struct CompState {
  DenseVector u;  ///< tracks g(x_t)
  DenseVector v;  ///< tracks J(x_t)' grad f(g(x_t))
};

/// Per-component gradient memory with an incrementally maintained mean.
class GradTable {
 public:
  /// Re-average from scratch after this many overwrites.
  static constexpr std::size_t kResyncPeriod = 1000;

  GradTable() = default;
  explicit GradTable(std::vector<DenseVector> entries);

  /// g^i <- grad_i for every component at x (one full pass).
  static GradTable full_pass(const FiniteSumProblem& problem, const DenseVector& x);

  std::size_t size() const { return entries_.size(); }
  const DenseVector& entry(std::size_t i) const { return entries_.at(i); }
  const DenseVector& mean() const { return mean_; }

  void overwrite(std::size_t i, DenseVector grad);
  void resync();

 private:
  std::vector<DenseVector> entries_;
  DenseVector mean_;
  std::size_t since_resync_ = 0;
};

struct SvrgSnapshot {
  DenseVector anchor;
  DenseVector anchor_grad;  ///< full gradient at `anchor`
  std::size_t age = 0;      ///< iterations since refresh
  std::size_t period = 1;   ///< refresh period I

  static SvrgSnapshot refresh(const FiniteSumProblem& problem, const DenseVector& x,
                              std::size_t period);
};

/// v = mean of `batch` independent oracle gradients at x.
StormState storm_init(const StochasticProblem& problem, const DenseVector& x, std::size_t batch,
                      RngStream& rng);

/// v <- grad_new + (1 - beta)(v - grad_old); both gradients under one sample.
StormState storm_update(const StormState& state, double beta, const DenseVector& grad_new,
                        const DenseVector& grad_old);

/// u = mean of g(x; zeta_i); v = mean of J(x; zeta_i)' grad f(u; xi_i) over the batch.
CompState comp_init(const CompositionalProblem& problem, const DenseVector& x, std::size_t batch,
                    RngStream& inner_rng, RngStream& outer_rng);

/// u <- g_new + (1 - beta)(u - g_old).
CompState comp_inner_update(const CompState& state, double beta, const DenseVector& g_new,
                            const DenseVector& g_old);

/// v <- J_new' o_new + (1 - beta)(v - J_old' o_old).
CompState comp_grad_update(const CompState& state, double beta, const DenseVector& outer_new,
                           const DenseMatrix& jac_new, const DenseVector& outer_old,
                           const DenseMatrix& jac_old);

struct FiniteSumStep {
  StormState state;
  GradTable table;
};

/// SAG-corrected recursion. The correction uses the table entry *before*
/// it is overwritten with grad_i_new; index is zero-based.
FiniteSumStep finite_sum_update(const StormState& state, GradTable table, double beta,
                                std::size_t index, const DenseVector& grad_i_new,
                                const DenseVector& grad_i_old);

/// SVRG-corrected recursion. Throws std::logic_error if the snapshot is
/// older than its refresh period.
StormState svrg_update(const StormState& state, const SvrgSnapshot& snapshot, double beta,
                       const DenseVector& grad_i_new, const DenseVector& grad_i_old,
                       const DenseVector& grad_i_anchor);

}  // namespace adastorm
