#pragma once

#include <functional>

namespace ftrl::special {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341145183;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
/// sqrt(pi / 2)
inline constexpr double kSqrtHalfPi = 1.253314137315500251207882642405522627;
/// sqrt(2 / pi)
inline constexpr double kSqrtTwoOverPi = 0.797884560802865355879892119868763737;

// Error functions use W. J. Cody's rational Chebyshev approximations
// (Math. Comp. 1969), accurate to about 1e-16 relative in double precision.
// All throw ContractError on NaN or infinite arguments unless noted.

double erf(double x);
double erfc(double x);
/// exp(x^2) erfc(x)
double erfcx(double x);

/// Dawson's integral F(x) = exp(-x^2) int_0^x exp(t^2) dt, via a Maclaurin
/// series near zero and Rybicki's exponentially convergent sum elsewhere.
double dawson(double x);

/// Imaginary error function erfi(x) = -i erf(ix) = 2/sqrt(pi) exp(x^2) F(x).
double erfi(double x);

/// Standard normal upper tail 1 - Phi(x).
double normal_tail(double x);

/// Solves normal_tail(x) = y for y in (0, 1). Throws ContractError otherwise.
double normal_tail_inverse(double y);

struct QuadratureResult {
  double value = 0.0;
  double estimated_error = 0.0;  ///< >= 0
};

/// Adaptive Simpson quadrature of `integrand` over [a, b] with Richardson
/// error control. Throws QuadratureError (carrying the best estimate) if some
/// panel cannot meet its share of `abs_tol` within the depth cap.
QuadratureResult adaptive_integral(const std::function<double(double)>& integrand, double a,
                                   double b, double abs_tol = 1e-12, int max_depth = 50);

}  // namespace ftrl::special
