#pragma once

#include <vector>

#include "ftrl/core.hpp"

namespace ftrl {

/// Gap profile of a semi-adversarial constraint: N experts of which N0 are
/// effective, and one effective gap Delta_i > 0 per ineffective expert.
class SemiAdvProfile {
 public:
  /// Throws ContractError unless N >= 2, 1 <= N0 <= N, gaps.size() == N - N0
  /// and every gap is finite and positive.
  SemiAdvProfile(Index experts, Index effective, std::vector<double> gaps);

  Index experts() const noexcept { return experts_; }
  Index effective() const noexcept { return effective_; }
  const std::vector<double>& gaps() const noexcept { return gaps_; }
  /// Gaps in increasing order; the first is Delta_0.
  const std::vector<double>& sorted_gaps() const noexcept { return sorted_; }
  /// T_i = ceil(8 log N / Delta_i^2), aligned with gaps().
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  /// T_0 = max_i T_i; 0 when every expert is effective.
  double t0() const noexcept { return t0_; }
  /// Smallest gap; +inf when every expert is effective.
  double min_gap() const noexcept;
  /// W_j = (sqrt(log(N0 + j + 1)) - sqrt(log(N0 + j))) / sqrt(log N), j = 0..N-N0-1.
  std::vector<double> telescoping_weights() const;

 private:
  Index experts_;
  Index effective_;
  std::vector<double> gaps_;
  std::vector<double> sorted_;
  std::vector<double> thresholds_;
  double t0_ = 0.0;
};

/// abNormal: 2 sqrt((T + 1)(1 + kl)) + sqrt(8 T)
double bound_abnormal(double T, double kl);

/// FTRL-CARL worst case: sqrt(2 T log N). Throws ContractError for N < 2.
double bound_carl(double T, Index experts);

/// FTRL-CARL gap-dependent form: sqrt(2 T log N0) + 25 log N / Delta_0 when
/// T > 8 log(N0) / Delta_0^2, otherwise the worst-case value.
double bound_carl_simple(double T, const SemiAdvProfile& profile);

/// Four-term refined FTRL-CARL bound, valid when T > T_0; the worst-case
/// value is returned otherwise.
double bound_carl_refined(double T, const SemiAdvProfile& profile);

/// Quantile lower bound
/// sqrt((T/2)(log(1/eps) - 2 log 2 + 1/pi)) - sqrt(2/pi) - 2 log N - log 2
/// with eps = i_eps / N. Negative values are returned as is.
double bound_lower_quantile(double T, Index experts, Index i_eps);

}  // namespace ftrl
