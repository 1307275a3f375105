#pragma once

#include <optional>

#include "ftrl/core.hpp"
#include "ftrl/learner.hpp"

namespace ftrl {

/// Bookkeeping for NormalHedge.
struct NormalHedgeState {
  explicit NormalHedgeState(Index experts)
      : expert_cumulative(Vector::Zero(experts)), regret(Vector::Zero(experts)) {}

  double player_cumulative = 0.0;  ///< sum_s <l_s, w_s>
  Vector expert_cumulative;        ///< L_{t-1}(i)
  Vector regret;                   ///< R_i = player_cumulative - L_{t-1}(i)
  double scale = 0.0;              ///< c_{t-1}; 0 while no regret is positive
};

/// Solves sum_i exp([R_i]_+^2 / (2c)) = e N for c by bisection on log c.
/// Requires some R_i > 0. Throws NumericError if no bracket is found.
double normalhedge_scale(const Vector& regret);

/// w_i proportional to [R_i]_+ exp([R_i]_+^2 / (2c)). Uniform when every
/// R_i <= 0. Writes the solved scale back into `state`.
WeightVector normalhedge_predict(NormalHedgeState& state, Index experts);

class NormalHedge final : public Learner {
 public:
  explicit NormalHedge(Index experts);

  std::string name() const override { return "normalhedge"; }
  Index experts() const override { return experts_; }
  const WeightVector& predict() override;
  double update(const Vector& loss) override;

  const NormalHedgeState& state() const noexcept { return state_; }

 private:
  Index experts_;
  NormalHedgeState state_;
  std::optional<WeightVector> current_;
};

}  // namespace ftrl
