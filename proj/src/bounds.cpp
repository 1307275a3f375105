#include "ftrl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ftrl/errors.hpp"
#include "ftrl/special_math.hpp"

namespace ftrl {

namespace {

void require_horizon(double T) {
  if (!(T >= 1.0) || !std::isfinite(T)) throw ContractError("bound: horizon must be >= 1");
}

double log_count(Index n) { return std::log(static_cast<double>(n)); }

}  // namespace

SemiAdvProfile::SemiAdvProfile(Index experts, Index effective, std::vector<double> gaps)
    : experts_(experts), effective_(effective), gaps_(std::move(gaps)) {
  if (experts < 2) throw ContractError("profile: needs at least two experts");
  if (effective < 1 || effective > experts) throw ContractError("profile: effective count out of range");
  if (static_cast<Index>(gaps_.size()) != experts - effective) {
    throw ContractError("profile: expected one gap per ineffective expert");
  }
  const double log_n = log_count(experts);
  thresholds_.reserve(gaps_.size());
  for (double gap : gaps_) {
    if (!(gap > 0.0) || !std::isfinite(gap)) throw ContractError("profile: gaps must be positive");
    thresholds_.push_back(std::ceil(8.0 * log_n / (gap * gap)));
  }
  sorted_ = gaps_;
  std::sort(sorted_.begin(), sorted_.end());
  if (!thresholds_.empty()) t0_ = *std::max_element(thresholds_.begin(), thresholds_.end());
}

double SemiAdvProfile::min_gap() const noexcept {
  return sorted_.empty() ? std::numeric_limits<double>::infinity() : sorted_.front();
}

std::vector<double> SemiAdvProfile::telescoping_weights() const {
  const double root_log_n = std::sqrt(log_count(experts_));
  std::vector<double> w;
  w.reserve(sorted_.size());
  for (std::size_t j = 0; j < sorted_.size(); ++j) {
    const double base = static_cast<double>(effective_) + static_cast<double>(j);
    w.push_back((std::sqrt(std::log(base + 1.0)) - std::sqrt(std::log(base))) / root_log_n);
  }
  return w;
}

double bound_abnormal(double T, double kl) {
  require_horizon(T);
  if (!(kl >= 0.0)) throw ContractError("bound_abnormal: kl must be nonnegative");
  return 2.0 * std::sqrt((T + 1.0) * (1.0 + kl)) + std::sqrt(8.0 * T);
}

double bound_carl(double T, Index experts) {
  require_horizon(T);
  if (experts < 2) throw ContractError("bound_carl: needs at least two experts");
  return std::sqrt(2.0 * T * log_count(experts));
}

double bound_carl_simple(double T, const SemiAdvProfile& profile) {
  const double worst = bound_carl(T, profile.experts());
  const double gap = profile.min_gap();
  if (!std::isfinite(gap)) return std::sqrt(2.0 * T * log_count(profile.effective()));
  const double log_n0 = log_count(profile.effective());
  if (!(T > 8.0 * log_n0 / (gap * gap))) return worst;
  return std::sqrt(2.0 * T * log_n0) + 25.0 * log_count(profile.experts()) / gap;
}

double bound_carl_refined(double T, const SemiAdvProfile& profile) {
  const double worst = bound_carl(T, profile.experts());
  if (!(T > profile.t0())) return worst;
  const double log_n = log_count(profile.experts());
  const double n = static_cast<double>(profile.experts());

  double ordered = 0.0;
  const auto w = profile.telescoping_weights();
  for (std::size_t j = 0; j < w.size(); ++j) ordered += w[j] / profile.sorted_gaps()[j];

  double resolved = 0.0;
  for (std::size_t i = 0; i < profile.gaps().size(); ++i) {
    if (T > profile.thresholds()[i]) resolved += 1.0 / profile.gaps()[i];
  }
  const double indicator = profile.effective() == 1 ? 1.0 : 0.0;
  const double tail_coeff =
      5.0 * special::kSqrt2 / (n * std::sqrt(log_n)) * (std::exp(-0.5) + indicator);

  return std::sqrt(2.0 * T * log_count(profile.effective())) + 4.0 * log_n * ordered +
         tail_coeff * resolved + std::sqrt(log_n);
}

double bound_lower_quantile(double T, Index experts, Index i_eps) {
  require_horizon(T);
  if (experts < 4) throw ContractError("bound_lower_quantile: needs at least four experts");
  if (i_eps < 1 || 4 * i_eps > experts) {
    throw ContractError("bound_lower_quantile: i_eps must lie in [1, N/4]");
  }
  const double eps = static_cast<double>(i_eps) / static_cast<double>(experts);
  const double radicand = std::log(1.0 / eps) - 2.0 * std::log(2.0) + 1.0 / special::kPi;
  return std::sqrt(0.5 * T * radicand) - special::kSqrtTwoOverPi - 2.0 * log_count(experts) -
         std::log(2.0);
}

}  // namespace ftrl
