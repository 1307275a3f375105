#include "ftrl/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ftrl/errors.hpp"

namespace ftrl {

namespace {

bool is_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

Prior::Prior(Vector masses) : masses_(std::move(masses)) {
  if (masses_.size() == 0) throw ContractError("prior: no experts");
  if (!is_finite(masses_)) throw ContractError("prior: non-finite mass");
  if ((masses_.array() < 0.0).any()) throw ContractError("prior: negative mass");
  total_mass_ = masses_.sum();
  min_positive_mass_ = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < masses_.size(); ++i) {
    if (masses_(i) > 0.0) min_positive_mass_ = std::min(min_positive_mass_, masses_(i));
  }
  if (!(total_mass_ > 0.0)) throw ContractError("prior: every mass is zero");
}

Prior Prior::uniform(Index n) {
  if (n < 1) throw ContractError("prior: no experts");
  return Prior(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Prior Prior::counting(Index n) {
  if (n < 1) throw ContractError("prior: no experts");
  return Prior(Vector::Ones(n));
}

WeightVector::WeightVector(Vector weights, double tolerance) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw ContractError("weights: empty");
  if (!is_finite(weights_)) throw ContractError("weights: non-finite entry");
  if ((weights_.array() < 0.0).any()) throw ContractError("weights: negative entry");
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > tolerance) {
    throw ContractError("weights: sum " + std::to_string(total) + " is not 1");
  }
}

WeightVector WeightVector::uniform(Index n) {
  return WeightVector(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::one_hot(Index n, Index i) {
  if (i < 0 || i >= n) throw ContractError("one_hot: index out of range");
  Vector w = Vector::Zero(n);
  w(i) = 1.0;
  return WeightVector(std::move(w));
}

DensityVector::DensityVector(Vector densities, const Prior& prior, double tolerance)
    : densities_(std::move(densities)) {
  if (densities_.size() != prior.size()) throw ContractError("densities: length mismatch with prior");
  if (!is_finite(densities_)) throw ContractError("densities: non-finite entry");
  if ((densities_.array() < 0.0).any()) throw ContractError("densities: negative entry");
  if (densities_.maxCoeff() > prior.density_upper_bound() + tolerance) {
    throw ContractError("densities: entry exceeds 1/min prior mass");
  }
  const double mass = prior.masses().dot(densities_);
  if (std::abs(mass - 1.0) > tolerance) {
    throw ContractError("densities: integral " + std::to_string(mass) + " is not 1");
  }
}

LossRecord::LossRecord(Index experts, bool keep_history)
    : cumulative_(Vector::Zero(std::max<Index>(experts, 0))), keep_history_(keep_history) {
  if (experts < 1) throw ContractError("loss record: no experts");
}

const Vector& LossRecord::round(Index t) const {
  if (!keep_history_) throw ContractError("loss record: history not kept");
  if (t < 0 || t >= rounds_) throw ContractError("loss record: round out of range");
  return per_round_[static_cast<std::size_t>(t)];
}

void LossRecord::append(const Vector& losses, bool strict) {
  if (losses.size() != cumulative_.size()) throw ContractError("loss record: length mismatch");
  if (!losses.allFinite()) throw ContractError("loss record: non-finite loss");
  if (strict) {
    for (Index i = 0; i < losses.size(); ++i) {
      if (losses(i) < 0.0 || losses(i) > 1.0) {
        throw ContractError("loss record: loss " + std::to_string(losses(i)) + " of expert " +
                            std::to_string(i) + " outside [0,1]");
      }
    }
  }
  if (keep_history_) per_round_.push_back(losses);
  cumulative_ += losses;
  ++rounds_;
}

void validate(const Comparator& q, Index experts) {
  if (const auto* w = std::get_if<WeightVector>(&q)) {
    if (w->size() != experts) throw ContractError("comparator: length mismatch");
  } else {
    const Index rank = std::get<QuantileIndex>(q).rank;
    if (rank < 1 || rank > experts) throw ContractError("comparator: quantile index out of range");
  }
}

WeightVector weights_from_densities(const Prior& prior, const DensityVector& x) {
  if (prior.size() != x.size()) throw ContractError("weights_from_densities: length mismatch");
  Vector w = prior.masses().cwiseProduct(x.values());
  const double total = w.sum();
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw NumericError("weights_from_densities: normalization failure, sum = " + std::to_string(total));
  }
  return WeightVector(std::move(w));
}

DensityVector densities_from_weights(const Prior& prior, const WeightVector& w) {
  if (prior.size() != w.size()) throw ContractError("densities_from_weights: length mismatch");
  Vector x(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    if (prior.mass(i) > 0.0) {
      x(i) = w(i) / prior.mass(i);
    } else if (w(i) > 0.0) {
      throw ContractError("densities_from_weights: weight on an expert with zero prior mass");
    } else {
      x(i) = 0.0;
    }
  }
  return DensityVector(std::move(x), prior);
}

double mixture_loss(const WeightVector& w, const Vector& loss) {
  if (w.size() != loss.size()) throw ContractError("mixture_loss: length mismatch");
  if ((loss.array() < 0.0).any() || (loss.array() > 1.0).any()) {
    throw ContractError("mixture_loss: loss outside [0,1]");
  }
  return w.values().dot(loss);
}

Prior model_selection_prior(std::span<const Index> class_sizes) {
  if (class_sizes.empty()) throw ContractError("model_selection_prior: no classes");
  Index total = 0;
  for (Index s : class_sizes) {
    if (s < 1) throw ContractError("model_selection_prior: class size must be positive");
    total += s;
  }
  Vector masses(total);
  Index at = 0;
  for (std::size_t m = 0; m < class_sizes.size(); ++m) {
    const double rank = static_cast<double>(m + 1);
    const double mass = 1.0 / (rank * rank * static_cast<double>(class_sizes[m]));
    masses.segment(at, class_sizes[m]).setConstant(mass);
    at += class_sizes[m];
  }
  masses /= masses.sum();
  return Prior(std::move(masses));
}

std::vector<Index> ascending_order(const Vector& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) < values(b); });
  return order;
}

}  // namespace ftrl
