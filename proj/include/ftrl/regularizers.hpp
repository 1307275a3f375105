#pragma once

#include <limits>
#include <string>

#include "ftrl/core.hpp"

namespace ftrl {

enum class GeneratorKind { shannon, chi_squared, root_log, carl };

/// Scalar convex function f defining the linearly decomposable regularizer
/// D_f(x) = sum_i nu_i f(x_i), on the domain [0, domain_upper()].
///
/// Besides f, f' and f'', a generator exposes the inverse derivative composed
/// with the range clamp tau(y) = max(min(y, M), m), where m and M are the
/// infimum and supremum of f' over the domain.
///
/// f' may carry an additive constant (`derivative_offset()`; nonzero only for
/// CARL). The solver works in offset-free "centered" coordinates z = y - offset
/// to keep precision when the constant is large.
class DivergenceGenerator {
 public:
  GeneratorKind kind() const noexcept { return kind_; }
  std::string name() const;
  /// Expert count baked into the CARL generator; 0 otherwise.
  Index carl_experts() const noexcept { return carl_experts_; }

  double domain_upper() const noexcept { return upper_; }
  double deriv_min() const noexcept { return deriv_min_; }
  double deriv_max() const noexcept { return deriv_max_; }
  double derivative_offset() const noexcept { return offset_; }

  /// f(x). Throws ContractError for x outside the domain.
  double value(double x) const;
  /// f'(x); -inf at x = 0 for shannon and CARL.
  double derivative(double x) const;
  /// f''(x) on the interior of the domain; +inf at endpoints where it diverges.
  double curvature(double x) const;
  /// tau(y)
  double clamp_derivative(double y) const;
  /// [f']^{-1}(tau(y)); always lands in the domain.
  double inverse_derivative(double y) const;
  /// [f']^{-1}(tau(z + offset)) without forming z + offset.
  double inverse_derivative_centered(double z) const;
  /// f'(x) - offset
  double centered_derivative(double x) const;
  /// Upper clamp of the centered argument, M - offset.
  double centered_deriv_max() const noexcept { return centered_max_; }
  double centered_deriv_min() const noexcept { return centered_min_; }

  /// Same f on [0, min(domain_upper(), upper)].
  DivergenceGenerator restricted_to(double upper) const;

  friend DivergenceGenerator make_shannon(double domain_upper);
  friend DivergenceGenerator make_chi_squared(double domain_upper);
  friend DivergenceGenerator make_root_log(double domain_upper);
  friend DivergenceGenerator make_carl(Index experts);

 private:
  DivergenceGenerator(GeneratorKind kind, double upper, Index carl_experts);
  void check_domain(double x, const char* what) const;

  GeneratorKind kind_;
  double upper_;
  Index carl_experts_;
  double offset_ = 0.0;
  double deriv_min_ = 0.0;
  double deriv_max_ = 0.0;
  double centered_min_ = 0.0;
  double centered_max_ = 0.0;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// f(x) = x log x (KL divergence; Hedge)
DivergenceGenerator make_shannon(double domain_upper = kUnbounded);
/// f(x) = x^2 - 1 (chi-squared divergence)
DivergenceGenerator make_chi_squared(double domain_upper = kUnbounded);
/// f(x) = int_1^x sqrt(2 log(1 + s)) ds (root-logarithmic; abNormal)
DivergenceGenerator make_root_log(double domain_upper = kUnbounded);
/// f = -h_B on [0,1] for N experts under counting measure (FTRL-CARL).
/// Throws ContractError if experts < 2.
DivergenceGenerator make_carl(Index experts);

/// One-dimensional Bregman divergence f(x) - f(y) - f'(y)(x - y). Throws
/// ContractError if f'(y) diverges.
double bregman(const DivergenceGenerator& gen, double x, double y);

/// h_A(x) = x sqrt(2 log(1/x)), h_A(0) = 0.
double h_a(double x);
/// h_B(x) = h_A(x) - sqrt(pi/2) erf(sqrt(log(1/x))) + x (N - 1) sqrt(pi/2),
/// h_B(0) = -sqrt(pi/2).
double h_b(double x, Index experts);

/// Root-log f evaluated by adaptive quadrature of sqrt(2 log(1 + s)); the
/// independent cross-check for the closed form used by value().
double root_log_value_by_quadrature(double x, double abs_tol = 1e-12);

}  // namespace ftrl
