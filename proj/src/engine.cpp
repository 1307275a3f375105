#include "ftrl/engine.hpp"

#include <cmath>
#include <sstream>

#include "ftrl/errors.hpp"

namespace ftrl {

double variance_adaptive_eta(const VarianceState& state) {
  const double base = state.mode == VarianceMode::prior
                          ? state.curvature_bound * state.total_mass * (0.25 + state.accumulated)
                          : state.curvature_bound * (0.5 + state.accumulated);
  return 1.0 / std::sqrt(base);
}

Schedule Schedule::inverse_root(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ContractError("schedule: scale must be positive");
  Schedule s;
  s.fixed_ = InverseRoot{scale};
  return s;
}

Schedule Schedule::carl_default() { return inverse_root(2.0); }

Schedule Schedule::hedge_default(double multiplier) {
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
    throw ContractError("schedule: multiplier must be positive");
  }
  Schedule s;
  s.fixed_ = HedgeDefault{multiplier};
  return s;
}

Schedule Schedule::variance_adaptive(double curvature_bound, VarianceMode mode) {
  if (!(curvature_bound > 0.0) || !std::isfinite(curvature_bound)) {
    throw ContractError("schedule: curvature bound must be positive");
  }
  Schedule s;
  s.variance_ = VarianceState{curvature_bound, mode, 1.0, 0.0};
  return s;
}

double Schedule::eta(Index t, Index experts) const {
  if (t < 1) throw ContractError("schedule: rounds start at 1");
  if (variance_) return variance_adaptive_eta(*variance_);
  const double root_t = std::sqrt(static_cast<double>(t));
  if (const auto* r = std::get_if<InverseRoot>(&fixed_)) return r->scale / root_t;
  const double m = std::get<HedgeDefault>(fixed_).multiplier;
  // A single expert has log N = 0; any positive rate plays the same point mass.
  const double log_n = experts > 1 ? std::log(static_cast<double>(experts)) : 1.0;
  return m * std::sqrt(log_n) / root_t;
}

void Schedule::bind_total_mass(double total_mass) {
  if (variance_) variance_->total_mass = total_mass;
}

void Schedule::accumulate_variance(double variance) {
  if (!variance_) throw ContractError("schedule: not variance adaptive");
  variance_->accumulated += variance;
}

std::string Schedule::describe() const {
  std::ostringstream out;
  if (variance_) {
    out << "variance_adaptive(C=" << variance_->curvature_bound << ", mode="
        << (variance_->mode == VarianceMode::prior ? "prior" : "played") << ")";
  } else if (const auto* r = std::get_if<InverseRoot>(&fixed_)) {
    out << "inverse_root(" << r->scale << ")";
  } else {
    out << "hedge_default(" << std::get<HedgeDefault>(fixed_).multiplier << ")";
  }
  return out.str();
}

double weighted_variance(const Vector& p, const Vector& values) {
  if (p.size() != values.size()) throw ContractError("weighted_variance: length mismatch");
  const double mean = p.dot(values);
  const double var = p.dot((values.array() - mean).square().matrix());
  return var;
}

Session::Session(DivergenceGenerator generator, Prior prior, Schedule schedule,
                 SessionOptions options, std::string name)
    : generator_(std::move(generator)),
      prior_(std::move(prior)),
      schedule_(std::move(schedule)),
      options_(options),
      name_(std::move(name)),
      record_(prior_.size(), options.keep_history) {
  schedule_.bind_total_mass(prior_.total_mass());
}

const WeightVector& Session::predict() {
  if (current_) return *current_;
  last_eta_ = schedule_.eta(round_, prior_.size());
  const Vector scaled = last_eta_ * record_.cumulative();
  auto solved = normalized_densities(generator_, prior_, scaled, options_.solver);
  max_residual_ = std::max(max_residual_, solved.report.residual);
  last_report_ = solved.report;
  current_ = weights_from_densities(prior_, solved.densities);
  return *current_;
}

double Session::update(const Vector& loss) {
  if (!current_) throw ContractError("session: update before predict in round " + std::to_string(round_));
  if (loss.size() != prior_.size()) throw ContractError("session: loss length mismatch");
  const Vector& w = current_->values();
  const double realized = w.dot(loss);
  record_.append(loss, options_.strict_losses);

  if (schedule_.is_variance_adaptive()) {
    if (schedule_.variance_state()->mode == VarianceMode::prior) {
      schedule_.accumulate_variance(weighted_variance(prior_.masses() / prior_.total_mass(), loss));
    } else if (previous_loss_) {
      schedule_.accumulate_variance(weighted_variance(w, *previous_loss_));
    }
    previous_loss_ = loss;
  }
  current_.reset();
  ++round_;
  return realized;
}

Session make_abnormal(Index experts, SessionOptions options) {
  // c2 = 1/sqrt(2), eta_t = sqrt(c2/t)
  const double scale = std::pow(2.0, -0.25);
  return Session(make_root_log(), Prior::uniform(experts), Schedule::inverse_root(scale), options,
                 "abnormal");
}

Session make_ftrl_carl(Index experts, SessionOptions options) {
  return Session(make_carl(experts), Prior::counting(experts), Schedule::carl_default(), options,
                 "carl");
}

Session make_hedge(Index experts, double multiplier, SessionOptions options) {
  return Session(make_shannon(), Prior::counting(experts), Schedule::hedge_default(multiplier),
                 options, "hedge");
}

}  // namespace ftrl
