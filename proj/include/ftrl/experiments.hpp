#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ftrl/core.hpp"
#include "ftrl/environments.hpp"
#include "ftrl/learner.hpp"
#include "ftrl/metrics.hpp"
#include "ftrl/normalization.hpp"

namespace ftrl {

enum class ExperimentKind { quantile, semiadv, lowerbound, custom };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);

/// One learner to run. `name` picks a preset:
///   abnormal     root-log, uniform prior, eta_t = 2^{-1/4} / sqrt(t)
///   carl         FTRL-CARL, counting measure, eta_t = 2 / sqrt(t)
///   hedge        Shannon, counting measure, eta_t = multiplier sqrt(log N / t)
///   normalhedge  NormalHedge
///   chi_squared  chi-squared, uniform prior, eta_t = scale / sqrt(t)
///   ftrl         any generator / prior / schedule combination below
struct AlgorithmSpec {
  std::string name = "hedge";
  std::string label;                    ///< output name; defaults to name
  std::string generator = "shannon";    ///< shannon | chi_squared | root_log | carl
  std::string prior = "uniform";        ///< uniform | counting
  std::string schedule = "inverse_root";  ///< inverse_root | carl_default | hedge_default | variance_prior | variance_played
  double scale = 1.0;                   ///< inverse_root
  double multiplier = 1.0;              ///< hedge_default
  double curvature_bound = 1.0;         ///< variance-adaptive schedules

  std::string display_name() const { return label.empty() ? name : label; }
  bool operator==(const AlgorithmSpec&) const = default;
};

/// Environment parameters; a value of 0 selects the experiment default.
struct EnvironmentSpec {
  Index good_experts = 10;                      ///< Hadamard K
  std::vector<Index> replications{1, 2, 4, 8, 16, 32, 64};
  Index rounds = 0;                             ///< T
  Index experts = 0;                            ///< N
  std::vector<std::string> variants{"one_effective", "two_effective", "all_effective"};
  std::uint64_t seed = 7;
  Index repetitions = 200;
  Index quantile_index = 4;                     ///< i_eps for lowerbound
  std::string csv_path;
  double bernoulli_p = 0.5;
  bool lenient = false;                         ///< clip CSV values into [0,1]

  bool operator==(const EnvironmentSpec&) const = default;
};

/// Regret comparator for the custom experiment.
///   best         running best expert (min_i L_t(i)) at each round
///   quantile     the index-th best expert under the final cumulative losses
///   uniform_top  uniform over the `index` best experts under the final losses
///   expert       point mass on expert `index` (0-based)
///   weights      the fixed distribution `weights`
struct ComparatorSpec {
  std::string kind = "best";
  Index index = 1;
  std::vector<double> weights;

  std::string column_name() const;
  bool operator==(const ComparatorSpec&) const = default;
};

struct ToleranceSpec {
  double solver = 1e-12;    ///< normalization residual target
  double residual = 1e-10;  ///< max residual accepted in a finished run

  bool operator==(const ToleranceSpec&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::quantile;
  std::vector<AlgorithmSpec> algorithms;  ///< empty selects the experiment default
  EnvironmentSpec environment;
  std::string output_dir = "out";
  std::vector<ComparatorSpec> comparators;
  ToleranceSpec tolerances;
  std::vector<Index> checkpoints;  ///< semiadv; empty selects log-spaced points plus T
  Index snapshot_every = 0;        ///< custom: weight rows every k rounds, 0 for none
  unsigned threads = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the JSON schema. Throws ConfigError on unknown keys, wrong types,
/// or invalid values.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// As parse_config, for a known experiment: a missing "experiment" key takes
/// `kind`, and a different value is a ConfigError.
ExperimentConfig parse_config_for(std::string_view json_text, ExperimentKind kind);
ExperimentConfig load_config_for(const std::filesystem::path& path, ExperimentKind kind);
std::string serialize_config(const ExperimentConfig& config);

/// Builds a learner for `experts` experts.
std::unique_ptr<Learner> make_learner(const AlgorithmSpec& spec, Index experts,
                                      const SolverOptions& solver = {});

/// Called once per round after predict() with the 1-based round, the played
/// weights and the revealed losses.
using RoundObserver = std::function<void(Index, const WeightVector&, const Vector&)>;

struct PlayResult {
  RegretTrajectory trajectory;
  double max_residual = 0.0;  ///< 0 for learners without a normalization step
};

/// Plays `learner` through every round of `losses`.
PlayResult play(Learner& learner, const LossMatrix& losses, const RoundObserver& observer = {},
                std::vector<WeightVector> tracked = {});

/// Default semiadv checkpoints 1, 2, 5, 10, 20, 50, ... below T, then T.
std::vector<Index> default_checkpoints(Index rounds);

struct QuantileRow {
  Index experts;
  std::string algorithm;
  Index good;
  Index replication;
  double quantile_regret;
  double abnormal_bound;
};

struct SemiAdvRow {
  std::string variant;
  std::string algorithm;
  Index t;
  double regret;
  double carl_bound;
  double carl_refined_bound;
};

struct LowerBoundRow {
  Index experts;
  Index i_eps;
  Index rounds;
  Index repetitions;
  double mean_regret;
  double standard_error;
  double lower_bound;
};

struct CustomRow {
  std::string algorithm;
  Index t;
  double mixture_loss;
  std::vector<double> regrets;  ///< one per comparator
};

struct WeightSnapshot {
  std::string algorithm;
  Index t;
  Vector weights;
};

struct QuantileResult {
  std::vector<QuantileRow> rows;
  double max_residual = 0.0;
};
struct SemiAdvResult {
  std::vector<SemiAdvRow> rows;
  double max_residual = 0.0;
};
struct LowerBoundResult {
  LowerBoundRow row;
  std::vector<double> regrets;  ///< per repetition
  double max_residual = 0.0;
};
struct CustomResult {
  std::vector<std::string> comparator_columns;
  std::vector<CustomRow> rows;
  std::vector<WeightSnapshot> snapshots;
  double max_residual = 0.0;
};

/// Computations only; no files are written. Each throws ConfigError when the
/// configuration does not fit the experiment and NumericError when the
/// largest normalization residual exceeds tolerances.residual.
QuantileResult compute_quantile(const ExperimentConfig& config);
SemiAdvResult compute_semiadv(const ExperimentConfig& config);
LowerBoundResult compute_lowerbound(const ExperimentConfig& config);
CustomResult compute_custom(const ExperimentConfig& config);

std::string quantile_csv(const QuantileResult& result);
std::string semiadv_csv(const SemiAdvResult& result);
std::string lowerbound_csv(const LowerBoundResult& result);
std::string trajectory_csv(const CustomResult& result);
std::string weights_csv(const CustomResult& result);

/// Compute and write CSV and SVG output under config.output_dir. Returns the
/// paths written.
std::vector<std::filesystem::path> run_quantile_experiment(const ExperimentConfig& config);
std::vector<std::filesystem::path> run_semiadv_experiment(const ExperimentConfig& config);
std::vector<std::filesystem::path> run_lowerbound_experiment(const ExperimentConfig& config);
std::vector<std::filesystem::path> run_custom(const ExperimentConfig& config);
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line chart with axes, one polyline per series and a legend.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series,
                           bool log_x);

}  // namespace ftrl
