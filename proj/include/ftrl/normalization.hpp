#pragma once

#include <utility>

#include "ftrl/core.hpp"
#include "ftrl/regularizers.hpp"

namespace ftrl {

/// Outcome of one normalization solve.
struct SolveReport {
  double k_star = 0.0;     ///< normalization constant
  double residual = 0.0;   ///< |sum_i nu_i x_i - 1| of the returned densities
  int iterations = 0;      ///< bisection steps taken
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

struct SolverOptions {
  double tolerance = 1e-12;  ///< on the residual
  int max_iterations = 200;
};

struct NormalizedDensities {
  DensityVector densities;
  SolveReport report;
};

/// g(k) = sum_i nu_i [f']^{-1}(tau(k - s_i)) for scaled cumulative losses s.
/// Nondecreasing in k. The generator is restricted to the prior's density
/// domain [0, 1/min mass] first.
double normalization_mass(const DivergenceGenerator& gen, const Prior& prior,
                          const Vector& scaled_losses, double k);

/// Bracket [lo, hi] with g(lo) <= 1 <= g(hi). Starts from a = f'(1/nu(Theta)):
/// lo = min s + a, and hi is the smaller of max s + a and the point where the
/// best expert alone carries all the mass. Falls back to geometric expansion
/// around f' at the domain midpoint when a is not finite.
std::pair<double, double> initial_bracket(const DivergenceGenerator& gen, const Prior& prior,
                                          const Vector& scaled_losses);

/// Densities minimizing <s, x>_nu + D_f(x) over probability densities:
/// x_i = [f']^{-1}(tau(k* - s_i)) with k* chosen so that sum_i nu_i x_i = 1.
///
/// Solved by bisection on k (g may be flat where tau clamps) with one secant
/// polish step. Experts with zero prior mass receive density 0. When the best
/// expert alone absorbs all mass with every other density clamped at zero, the
/// one-hot density is returned directly.
///
/// Throws ContractError on non-finite or mismatched input (or a CARL
/// generator with min prior mass below 1) and NumericError when no bracket is
/// found or the tolerance is not met within the iteration cap.
NormalizedDensities normalized_densities(const DivergenceGenerator& gen, const Prior& prior,
                                         const Vector& scaled_losses, SolverOptions options = {});

}  // namespace ftrl
