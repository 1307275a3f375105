#include "ftrl/baselines.hpp"

#include <cmath>

#include "ftrl/errors.hpp"

namespace ftrl {

namespace {

// sum_i exp(p_i^2 / (2c)) - e N with p = [R]_+, evaluated in log space.
double scale_residual(const Eigen::ArrayXd& positive_sq, double c, double target_log) {
  const Eigen::ArrayXd exponent = positive_sq / (2.0 * c);
  const double peak = exponent.maxCoeff();
  const double log_sum = peak + std::log((exponent - peak).exp().sum());
  return log_sum - target_log;
}

}  // namespace

double normalhedge_scale(const Vector& regret) {
  const Index n = regret.size();
  if (n < 1) throw ContractError("normalhedge: no experts");
  const Eigen::ArrayXd positive = regret.array().max(0.0);
  if (!(positive.maxCoeff() > 0.0)) throw ContractError("normalhedge: no positive regret");
  const Eigen::ArrayXd positive_sq = positive.square();
  const double target_log = 1.0 + std::log(static_cast<double>(n));

  double lo = 1e-12;
  double hi = 1.0;
  // The residual decreases in c.
  int guard = 0;
  while (scale_residual(positive_sq, hi, target_log) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw NumericError("normalhedge: scale bracket failure");
  }
  if (scale_residual(positive_sq, lo, target_log) < 0.0) {
    throw NumericError("normalhedge: scale bracket failure");
  }
  // Bisect in log c to machine precision.
  double llo = std::log(lo);
  double lhi = std::log(hi);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (llo + lhi);
    if (mid <= llo || mid >= lhi) break;
    if (scale_residual(positive_sq, std::exp(mid), target_log) > 0.0) {
      llo = mid;
    } else {
      lhi = mid;
    }
  }
  return std::exp(0.5 * (llo + lhi));
}

WeightVector normalhedge_predict(NormalHedgeState& state, Index experts) {
  if (experts < 1) throw ContractError("normalhedge: no experts");
  if (state.regret.size() != experts) throw ContractError("normalhedge: state size mismatch");
  const Eigen::ArrayXd positive = state.regret.array().max(0.0);
  if (!(positive.maxCoeff() > 0.0)) {
    state.scale = 0.0;
    return WeightVector::uniform(experts);
  }
  state.scale = normalhedge_scale(state.regret);
  const Eigen::ArrayXd exponent = positive.square() / (2.0 * state.scale);
  const double peak = exponent.maxCoeff();
  Eigen::ArrayXd w = positive * (exponent - peak).exp();
  w /= w.sum();
  return WeightVector(w.matrix());
}

NormalHedge::NormalHedge(Index experts) : experts_(experts), state_(experts) {
  if (experts < 1) throw ContractError("normalhedge: no experts");
}

const WeightVector& NormalHedge::predict() {
  if (!current_) current_ = normalhedge_predict(state_, experts_);
  return *current_;
}

double NormalHedge::update(const Vector& loss) {
  if (!current_) throw ContractError("normalhedge: update before predict");
  if (loss.size() != experts_) throw ContractError("normalhedge: loss length mismatch");
  const double realized = current_->values().dot(loss);
  state_.player_cumulative += realized;
  state_.expert_cumulative += loss;
  state_.regret = (state_.player_cumulative - state_.expert_cumulative.array()).matrix();
  current_.reset();
  return realized;
}

}  // namespace ftrl
