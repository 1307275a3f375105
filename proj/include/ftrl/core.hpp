#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace ftrl {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerance on the total mass of a played distribution.
inline constexpr double kSimplexTolerance = 1e-9;

/// Finite nonnegative measure over experts 0..N-1 (the base measure of the
/// regularizer). Zero masses are allowed and exclude the expert.
class Prior {
 public:
  /// Throws ContractError on empty input, negative or non-finite masses, or
  /// when every mass is zero.
  explicit Prior(Vector masses);

  static Prior uniform(Index n);   ///< probability prior, mass 1/n each
  static Prior counting(Index n);  ///< counting measure, mass 1 each

  const Vector& masses() const noexcept { return masses_; }
  double mass(Index i) const { return masses_(i); }
  Index size() const noexcept { return masses_.size(); }
  double total_mass() const noexcept { return total_mass_; }
  /// Smallest strictly positive mass.
  double min_positive_mass() const noexcept { return min_positive_mass_; }
  /// Upper end of the density domain, 1 / min_positive_mass().
  double density_upper_bound() const noexcept { return 1.0 / min_positive_mass_; }

 private:
  Vector masses_;
  double total_mass_ = 0.0;
  double min_positive_mass_ = 0.0;
};

/// Probability weights over experts.
class WeightVector {
 public:
  /// Throws ContractError if an entry is negative/non-finite or the entries
  /// do not sum to one within `tolerance`.
  explicit WeightVector(Vector weights, double tolerance = kSimplexTolerance);

  static WeightVector uniform(Index n);
  static WeightVector one_hot(Index n, Index i);

  const Vector& values() const noexcept { return weights_; }
  double operator()(Index i) const { return weights_(i); }
  Index size() const noexcept { return weights_.size(); }

 private:
  Vector weights_;
};

/// Densities of a played distribution with respect to a prior: x_i = w_i / nu_i.
class DensityVector {
 public:
  /// Validates against `prior`: nonnegative, bounded by 1/min mass, and
  /// integrating to one within `tolerance`.
  DensityVector(Vector densities, const Prior& prior, double tolerance = kSimplexTolerance);

  const Vector& values() const noexcept { return densities_; }
  double operator()(Index i) const { return densities_(i); }
  Index size() const noexcept { return densities_.size(); }

 private:
  Vector densities_;
};

/// Per-round losses in [0,1] with running cumulative sums. Long runs may
/// drop the per-round history and keep only the cumulative vector.
class LossRecord {
 public:
  explicit LossRecord(Index experts, bool keep_history = true);

  /// Appends one round. Throws ContractError on a length mismatch, and on an
  /// entry outside [0,1] when `strict` is set.
  void append(const Vector& losses, bool strict = true);

  Index experts() const noexcept { return cumulative_.size(); }
  Index rounds() const noexcept { return rounds_; }
  bool keeps_history() const noexcept { return keep_history_; }
  const Vector& cumulative() const noexcept { return cumulative_; }
  /// Losses of round t (0-based). Requires history.
  const Vector& round(Index t) const;

 private:
  std::vector<Vector> per_round_;
  Vector cumulative_;
  Index rounds_ = 0;
  bool keep_history_;
};

/// Point mass on the expert ranked `rank` (1-based) by final cumulative loss.
struct QuantileIndex {
  Index rank = 1;
};

/// Comparator for regret: an explicit distribution or a quantile rank.
using Comparator = std::variant<WeightVector, QuantileIndex>;

/// Validates a comparator against the expert count. Throws ContractError.
void validate(const Comparator& q, Index experts);

/// w_i = nu_i x_i. Throws ContractError on length mismatch and NumericError
/// when the result does not sum to one.
WeightVector weights_from_densities(const Prior& prior, const DensityVector& x);

/// x_i = w_i / nu_i, with x_i = 0 wherever nu_i = 0 (which requires w_i = 0).
DensityVector densities_from_weights(const Prior& prior, const WeightVector& w);

/// <loss, w>. Throws ContractError on length mismatch or a loss outside [0,1].
double mixture_loss(const WeightVector& w, const Vector& loss);

/// Prior over a disjoint union of model classes: every expert of class m
/// (1-based) receives mass proportional to 1 / (m^2 |class m|), normalized to
/// a probability measure.
Prior model_selection_prior(std::span<const Index> class_sizes);

/// Indices of `values` sorted ascending, ties broken by smaller index.
std::vector<Index> ascending_order(const Vector& values);

}  // namespace ftrl
