#pragma once

#include <string>

#include "ftrl/core.hpp"

namespace ftrl {

/// Full-information online learner over a fixed expert set.
///
/// Each round the caller asks for the played distribution, then reveals the
/// loss vector; predict() may only use losses from earlier rounds.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual std::string name() const = 0;
  virtual Index experts() const = 0;
  /// Distribution for the current round. Idempotent within a round.
  virtual const WeightVector& predict() = 0;
  /// Ingests the current round's losses and returns the realized mixture loss.
  virtual double update(const Vector& loss) = 0;
};

}  // namespace ftrl
