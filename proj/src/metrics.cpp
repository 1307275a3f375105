#include "ftrl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ftrl/errors.hpp"

namespace ftrl {

RegretTrajectory::RegretTrajectory(Index experts, std::vector<WeightVector> tracked)
    : expert_cumulative_(Vector::Zero(experts)),
      tracked_(std::move(tracked)),
      tracked_cumulative_(tracked_.size()) {
  if (experts < 1) throw ContractError("trajectory: no experts");
  for (const auto& q : tracked_) {
    if (q.size() != experts) throw ContractError("trajectory: comparator length mismatch");
  }
}

void RegretTrajectory::record(const WeightVector& played, const Vector& loss) {
  if (played.size() != experts()) throw ContractError("trajectory: weight length mismatch");
  record(played.values().dot(loss), loss);
}

void RegretTrajectory::record(double mixture_loss, const Vector& loss) {
  if (loss.size() != experts()) throw ContractError("trajectory: loss length mismatch");
  expert_cumulative_ += loss;
  player_.push_back(player_total() + mixture_loss);
  best_.push_back(expert_cumulative_.minCoeff());
  for (std::size_t k = 0; k < tracked_.size(); ++k) {
    auto& series = tracked_cumulative_[k];
    const double previous = series.empty() ? 0.0 : series.back();
    series.push_back(previous + tracked_[k].values().dot(loss));
  }
}

double RegretTrajectory::best_regret(Index t) const {
  if (t < 1 || t > rounds()) throw ContractError("trajectory: round out of range");
  return player_[static_cast<std::size_t>(t - 1)] - best_[static_cast<std::size_t>(t - 1)];
}

double RegretTrajectory::tracked_regret(std::size_t k, Index t) const {
  if (k >= tracked_.size()) throw ContractError("trajectory: unknown comparator");
  if (t < 1 || t > rounds()) throw ContractError("trajectory: round out of range");
  const auto i = static_cast<std::size_t>(t - 1);
  return player_[i] - tracked_cumulative_[k][i];
}

double regret_vs(const RegretTrajectory& traj, const Comparator& q) {
  validate(q, traj.experts());
  if (const auto* rank = std::get_if<QuantileIndex>(&q)) {
    return quantile_regret(traj, rank->rank);
  }
  const auto& w = std::get<WeightVector>(q);
  return traj.player_total() - w.values().dot(traj.expert_cumulative());
}

double quantile_regret(const RegretTrajectory& traj, Index i_eps) {
  if (i_eps < 1 || i_eps > traj.experts()) throw ContractError("quantile index out of range");
  const auto order = ascending_order(traj.expert_cumulative());
  return traj.player_total() - traj.expert_cumulative()(order[static_cast<std::size_t>(i_eps - 1)]);
}

WeightVector uniform_top(const Vector& cumulative, Index count) {
  if (count < 1 || count > cumulative.size()) throw ContractError("top count out of range");
  const auto order = ascending_order(cumulative);
  Vector w = Vector::Zero(cumulative.size());
  for (Index k = 0; k < count; ++k) w(order[static_cast<std::size_t>(k)]) = 1.0 / static_cast<double>(count);
  return WeightVector(std::move(w));
}

double regret_vs_uniform_top(const RegretTrajectory& traj, Index i_eps) {
  return regret_vs(traj, uniform_top(traj.expert_cumulative(), i_eps));
}

double f_divergence(const DivergenceGenerator& gen, const WeightVector& q, const Prior& prior) {
  if (q.size() != prior.size()) throw ContractError("divergence: length mismatch");
  if (std::abs(prior.total_mass() - 1.0) > kSimplexTolerance) {
    throw ContractError("divergence: prior is not a probability measure");
  }
  double total = 0.0;
  for (Index i = 0; i < q.size(); ++i) {
    const double nu = prior.mass(i);
    if (nu == 0.0) {
      if (q(i) > 0.0) {
        throw ContractError("divergence: q is not absolutely continuous at expert " +
                            std::to_string(i));
      }
      continue;
    }
    total += nu * gen.value(q(i) / nu);
  }
  return total;
}

double kl_divergence(const WeightVector& q, const Prior& prior) {
  return f_divergence(make_shannon(), q, prior);
}

double entropy_a(const WeightVector& w) {
  double total = 0.0;
  for (Index i = 0; i < w.size(); ++i) total += h_a(std::min(w(i), 1.0));
  return total;
}

double entropy_b(const WeightVector& w) {
  if (w.size() < 2) throw ContractError("entropy_b: needs at least two experts");
  double total = 0.0;
  for (Index i = 0; i < w.size(); ++i) total += h_b(std::min(w(i), 1.0), w.size());
  return total;
}

}  // namespace ftrl
