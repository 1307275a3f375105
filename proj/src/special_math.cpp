#include "ftrl/special_math.hpp"

#include <array>
#include <cmath>
#include <string>

#include "ftrl/errors.hpp"

namespace ftrl::special {

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw ContractError(std::string(name) + ": non-finite argument");
}

// Cody, "Rational Chebyshev approximations for the error function".
// erf on |x| <= 0.46875
constexpr std::array<double, 5> kA = {3.16112374387056560e00, 1.13864154151050156e02,
                                      3.77485237685302021e02, 3.20937758913846947e03,
                                      1.85777706184603153e-1};
constexpr std::array<double, 4> kB = {2.36012909523441209e01, 2.44024637934444173e02,
                                      1.28261652607737228e03, 2.84423683343917062e03};
// erfc on 0.46875 < |x| <= 4
constexpr std::array<double, 9> kC = {5.64188496988670089e-1, 8.88314979438837594e00,
                                      6.61191906371416295e01, 2.98635138197400131e02,
                                      8.81952221241769090e02, 1.71204761263407058e03,
                                      2.05107837782607147e03, 1.23033935479799725e03,
                                      2.15311535474403846e-8};
constexpr std::array<double, 8> kD = {1.57449261107098347e01, 1.17693950891312499e02,
                                      5.37181101862009858e02, 1.62138957456669019e03,
                                      3.29079923573345963e03, 4.36261909014324716e03,
                                      3.43936767414372164e03, 1.23033935480374942e03};
// erfc on |x| > 4
constexpr std::array<double, 6> kP = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                      1.25781726111229246e-1, 1.60837851487422766e-2,
                                      6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ = {2.56852019228982242e00, 1.87295284992346047e00,
                                      5.27905102951428412e-1, 6.05183413124413191e-2,
                                      2.33520497626869185e-3};

constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kSmallThreshold = 0.46875;
constexpr double kErfcUnderflow = 26.543;  // erfc(x) underflows beyond this

// erf(y) for 0 <= y <= 0.46875
double erf_small(double y) {
  const double ysq = y * y;
  double num = kA[4] * ysq;
  double den = ysq;
  for (int i = 0; i < 3; ++i) {
    num = (num + kA[i]) * ysq;
    den = (den + kB[i]) * ysq;
  }
  return y * (num + kA[3]) / (den + kB[3]);
}

// exp(y^2) erfc(y) for y > 0.46875
double erfcx_large(double y) {
  if (y <= 4.0) {
    double num = kC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + kC[i]) * y;
      den = (den + kD[i]) * y;
    }
    return (num + kC[7]) / (den + kD[7]);
  }
  const double inv_sq = 1.0 / (y * y);
  double num = kP[5] * inv_sq;
  double den = inv_sq;
  for (int i = 0; i < 4; ++i) {
    num = (num + kP[i]) * inv_sq;
    den = (den + kQ[i]) * inv_sq;
  }
  const double r = inv_sq * (num + kP[4]) / (den + kQ[4]);
  return (kInvSqrtPi - r) / y;
}

// exp(-y^2) evaluated in two pieces so the rounding of y^2 does not leak into
// the result.
double exp_minus_square(double y) {
  const double head = std::trunc(y * 16.0) / 16.0;
  const double tail = (y - head) * (y + head);
  return std::exp(-head * head) * std::exp(-tail);
}

// erfc(y) for y >= 0
double erfc_nonnegative(double y) {
  if (y <= kSmallThreshold) return 1.0 - erf_small(y);
  if (y >= kErfcUnderflow) return 0.0;
  return exp_minus_square(y) * erfcx_large(y);
}

}  // namespace

double erf(double x) {
  require_finite(x, "erf");
  const double y = std::abs(x);
  double r;
  if (y <= kSmallThreshold) {
    r = erf_small(y);
  } else {
    r = 1.0 - erfc_nonnegative(y);
  }
  return std::signbit(x) ? -r : r;
}

double erfc(double x) {
  require_finite(x, "erfc");
  if (x >= 0.0) return erfc_nonnegative(x);
  return 2.0 - erfc_nonnegative(-x);
}

double erfcx(double x) {
  require_finite(x, "erfcx");
  if (x < 0.0) {
    // 2 exp(x^2) - erfcx(-x); overflows to +inf for very negative x.
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x <= kSmallThreshold) return std::exp(x * x) * (1.0 - erf_small(x));
  return erfcx_large(x);
}

double dawson(double x) {
  require_finite(x, "dawson");
  const double ax = std::abs(x);
  double result;
  if (ax < 0.2) {
    // F(x) = sum_n (-1)^n 2^n x^(2n+1) / (2n+1)!!
    const double x2 = x * x;
    double term = ax;
    double sum = ax;
    for (int n = 1; n < 40 && std::abs(term) > 1e-18 * sum; ++n) {
      term *= -2.0 * x2 / static_cast<double>(2 * n + 1);
      sum += term;
    }
    result = sum;
  } else {
    // Rybicki: F(x) ~ (1/sqrt(pi)) sum_{n odd} exp(-(x - n h)^2) / n, shifted
    // to the even multiple of h nearest x. Truncation error ~ exp(-(pi/2h)^2).
    constexpr double kStep = 0.2;
    constexpr int kTerms = 20;
    static const std::array<double, kTerms> weights = [] {
      std::array<double, kTerms> w{};
      for (int i = 0; i < kTerms; ++i) {
        const double z = (2.0 * i + 1.0) * kStep;
        w[static_cast<std::size_t>(i)] = std::exp(-z * z);
      }
      return w;
    }();
    const double n0 = 2.0 * std::nearbyint(0.5 * ax / kStep);
    const double xp = ax - n0 * kStep;
    double e1 = std::exp(2.0 * xp * kStep);
    const double e2 = e1 * e1;
    double d1 = n0 + 1.0;
    double d2 = d1 - 2.0;
    double sum = 0.0;
    for (int i = 0; i < kTerms; ++i) {
      sum += weights[static_cast<std::size_t>(i)] * (e1 / d1 + 1.0 / (d2 * e1));
      d1 += 2.0;
      d2 -= 2.0;
      e1 *= e2;
    }
    result = kInvSqrtPi * std::exp(-xp * xp) * sum;
  }
  return std::signbit(x) ? -result : result;
}

double erfi(double x) {
  require_finite(x, "erfi");
  return 2.0 / kSqrtPi * std::exp(x * x) * dawson(x);
}

double normal_tail(double x) {
  require_finite(x, "normal_tail");
  return 0.5 * erfc(x / kSqrt2);
}

double normal_tail_inverse(double y) {
  if (!(y > 0.0 && y < 1.0)) throw ContractError("normal_tail_inverse: argument must lie in (0,1)");
  if (y == 0.5) return 0.0;
  if (y > 0.5) return -normal_tail_inverse(1.0 - y);

  // Starting point from Acklam's rational approximation of the normal
  // quantile (relative error ~1e-9), refined by Halley steps on the tail.
  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLowRegion = 0.02425;

  double quantile;  // Phi^{-1}(y) < 0
  if (y < kLowRegion) {
    const double q = std::sqrt(-2.0 * std::log(y));
    quantile = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = y - 0.5;
    const double r = q * q;
    quantile = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  double x = -quantile;
  for (int i = 0; i < 3; ++i) {
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    const double u = (normal_tail(x) - y) / density;
    x += u / (1.0 - 0.5 * x * u);
  }
  return x;
}

namespace {

struct SimpsonPanel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

class SimpsonIntegrator {
 public:
  explicit SimpsonIntegrator(const std::function<double(double)>& f, int max_depth)
      : f_(f), max_depth_(max_depth) {}

  void integrate(const SimpsonPanel& p, double tol, int depth) {
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (std::abs(delta) <= 15.0 * tol) {
      value_ += left + right + delta / 15.0;
      error_ += std::abs(delta) / 15.0;
      return;
    }
    if (depth >= max_depth_) {
      value_ += left + right + delta / 15.0;
      error_ += std::abs(delta) / 15.0;
      failed_ = true;
      return;
    }
    integrate({p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1);
    integrate({p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1);
  }

  double eval(double x) const {
    const double y = f_(x);
    if (!std::isfinite(y)) throw ContractError("adaptive_integral: integrand not finite");
    return y;
  }

  double value_ = 0.0;
  double error_ = 0.0;
  bool failed_ = false;

 private:
  const std::function<double(double)>& f_;
  int max_depth_;
};

}  // namespace

QuadratureResult adaptive_integral(const std::function<double(double)>& integrand, double a,
                                   double b, double abs_tol, int max_depth) {
  require_finite(a, "adaptive_integral");
  require_finite(b, "adaptive_integral");
  if (a > b) throw ContractError("adaptive_integral: a > b");
  if (!(abs_tol > 0.0)) throw ContractError("adaptive_integral: tolerance must be positive");
  if (a == b) return {0.0, 0.0};

  SimpsonIntegrator integrator(integrand, max_depth);
  const double m = 0.5 * (a + b);
  const double fa = integrator.eval(a);
  const double fm = integrator.eval(m);
  const double fb = integrator.eval(b);
  integrator.integrate({a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb)}, abs_tol, 0);
  if (integrator.failed_ || integrator.error_ > abs_tol) {
    throw QuadratureError("adaptive_integral: tolerance not reached", integrator.value_,
                          integrator.error_);
  }
  return {integrator.value_, integrator.error_};
}

}  // namespace ftrl::special
