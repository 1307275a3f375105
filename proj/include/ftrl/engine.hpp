#pragma once

#include <optional>
#include <string>
#include <variant>

#include "ftrl/core.hpp"
#include "ftrl/learner.hpp"
#include "ftrl/normalization.hpp"
#include "ftrl/regularizers.hpp"

namespace ftrl {

/// eta_t = scale / sqrt(t)
struct InverseRoot {
  double scale = 1.0;
};

/// eta_t = multiplier * sqrt(log N / t)
struct HedgeDefault {
  double multiplier = 1.0;
};

enum class VarianceMode {
  prior,   ///< variances under the normalized prior (exact schedule)
  played,  ///< variances under the played weights (approximation)
};

/// Accumulated state of a variance-adaptive schedule.
///
/// prior mode:  eta_{t+1} = (C nu(Theta) [1/4 + sum_{s<=t} Var_{nu/nu(Theta)} l_s])^{-1/2}
/// played mode: eta_{t+1} = (C [1/2 + sum_{s<t} Var_{w_{s+1}} l_s])^{-1/2}
/// The played mode substitutes the played w_{s+1} for an intermediate point
/// between w_s and w_{s+1} that the learner never observes.
struct VarianceState {
  double curvature_bound = 1.0;  ///< C, with 1/f'' <= C (prior) or <= C x (played)
  VarianceMode mode = VarianceMode::prior;
  double total_mass = 1.0;       ///< nu(Theta), used in prior mode
  double accumulated = 0.0;      ///< running variance sum
};

/// Current learning rate of a variance-adaptive schedule.
double variance_adaptive_eta(const VarianceState& state);

/// Learning-rate (regularizer scaling) schedule eta_t > 0.
class Schedule {
 public:
  static Schedule inverse_root(double scale);
  /// eta_t = 2 / sqrt(t), the FTRL-CARL scaling.
  static Schedule carl_default();
  static Schedule hedge_default(double multiplier = 1.0);
  static Schedule variance_adaptive(double curvature_bound, VarianceMode mode);

  /// eta for round t >= 1 over `experts` experts.
  double eta(Index t, Index experts) const;

  bool is_variance_adaptive() const { return variance_.has_value(); }
  const std::optional<VarianceState>& variance_state() const { return variance_; }
  /// Variance-adaptive schedules only: sets nu(Theta) and adds one variance term.
  void bind_total_mass(double total_mass);
  void accumulate_variance(double variance);

  std::string describe() const;

 private:
  std::variant<InverseRoot, HedgeDefault> fixed_{InverseRoot{}};
  std::optional<VarianceState> variance_;
};

/// Variance of `values` under the probability weights `p`.
double weighted_variance(const Vector& p, const Vector& values);

struct SessionOptions {
  SolverOptions solver;
  bool strict_losses = true;   ///< reject losses outside [0,1]
  bool keep_history = false;   ///< retain per-round losses in the LossRecord
};

/// FTRL with a linearly decomposable regularizer: each round plays
/// w_t = nu * x_t with x_t the normalized densities for eta_t L_{t-1}.
class Session final : public Learner {
 public:
  Session(DivergenceGenerator generator, Prior prior, Schedule schedule,
          SessionOptions options = {}, std::string name = "ftrl");

  std::string name() const override { return name_; }
  Index experts() const override { return prior_.size(); }
  const WeightVector& predict() override;
  double update(const Vector& loss) override;

  /// Round about to be played (1-based).
  Index round() const noexcept { return round_; }
  const LossRecord& losses() const noexcept { return record_; }
  const Prior& prior() const noexcept { return prior_; }
  const DivergenceGenerator& generator() const noexcept { return generator_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  /// Solver report of the latest predict(); nullopt before the first.
  const std::optional<SolveReport>& last_report() const noexcept { return last_report_; }
  /// Largest normalization residual over all predictions so far.
  double max_residual() const noexcept { return max_residual_; }
  double last_eta() const noexcept { return last_eta_; }

 private:
  DivergenceGenerator generator_;
  Prior prior_;
  Schedule schedule_;
  SessionOptions options_;
  std::string name_;
  LossRecord record_;
  Index round_ = 1;
  std::optional<WeightVector> current_;
  std::optional<SolveReport> last_report_;
  std::optional<Vector> previous_loss_;
  double max_residual_ = 0.0;
  double last_eta_ = 0.0;
};

/// abNormal: root-log generator, uniform probability prior,
/// eta_t = sqrt(c2 / t) with c2 = 1/sqrt(2).
Session make_abnormal(Index experts, SessionOptions options = {});
/// FTRL-CARL: CARL generator, counting measure, eta_t = 2/sqrt(t).
Session make_ftrl_carl(Index experts, SessionOptions options = {});
/// Hedge: Shannon generator, counting measure, eta_t = m sqrt(log N / t).
Session make_hedge(Index experts, double multiplier = 1.0, SessionOptions options = {});

}  // namespace ftrl
