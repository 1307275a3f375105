#pragma once

#include <vector>

#include "ftrl/core.hpp"
#include "ftrl/regularizers.hpp"

namespace ftrl {

/// Running regret bookkeeping for one play sequence.
///
/// Stores the player's cumulative loss and the best expert's cumulative loss
/// after every round, the final per-expert cumulative losses, and the
/// cumulative loss of any fixed comparators registered up front.
class RegretTrajectory {
 public:
  explicit RegretTrajectory(Index experts, std::vector<WeightVector> tracked = {});

  /// Adds one round. `played` is the distribution used that round.
  void record(const WeightVector& played, const Vector& loss);
  /// Adds one round given its realized mixture loss.
  void record(double mixture_loss, const Vector& loss);

  Index experts() const noexcept { return expert_cumulative_.size(); }
  Index rounds() const noexcept { return static_cast<Index>(player_.size()); }

  /// Player cumulative loss after rounds 1..t (entry t-1).
  const std::vector<double>& player_cumulative() const noexcept { return player_; }
  /// min_i L_t(i) after rounds 1..t.
  const std::vector<double>& best_cumulative() const noexcept { return best_; }
  const Vector& expert_cumulative() const noexcept { return expert_cumulative_; }
  double player_total() const { return player_.empty() ? 0.0 : player_.back(); }

  /// Regret against the best expert after round t (1-based).
  double best_regret(Index t) const;
  const std::vector<WeightVector>& tracked() const noexcept { return tracked_; }
  /// Regret against tracked comparator k after round t (1-based).
  double tracked_regret(std::size_t k, Index t) const;

 private:
  std::vector<double> player_;
  std::vector<double> best_;
  Vector expert_cumulative_;
  std::vector<WeightVector> tracked_;
  std::vector<std::vector<double>> tracked_cumulative_;
};

/// Final regret against q. A QuantileIndex resolves to the point mass on the
/// expert of that rank under the final cumulative losses.
double regret_vs(const RegretTrajectory& traj, const Comparator& q);

/// Regret against the i_eps-th best expert (ties by index).
double quantile_regret(const RegretTrajectory& traj, Index i_eps);

/// Regret against the uniform distribution over the i_eps best experts.
double regret_vs_uniform_top(const RegretTrajectory& traj, Index i_eps);

/// Uniform distribution over the `count` smallest entries of `cumulative`.
WeightVector uniform_top(const Vector& cumulative, Index count);

/// sum_i nu_i f(q_i / nu_i) for a probability prior. Throws ContractError
/// when q charges an expert of zero prior mass.
double f_divergence(const DivergenceGenerator& gen, const WeightVector& q, const Prior& prior);
/// KL(q || prior)
double kl_divergence(const WeightVector& q, const Prior& prior);

/// H_A(w) = sum_i w_i sqrt(2 log(1/w_i))
double entropy_a(const WeightVector& w);
/// H_B(w) = sum_i h_B(w_i) with N = w.size()
double entropy_b(const WeightVector& w);

}  // namespace ftrl
