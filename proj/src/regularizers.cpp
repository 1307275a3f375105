#include "ftrl/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ftrl/errors.hpp"
#include "ftrl/special_math.hpp"

namespace ftrl {

namespace {

using special::kSqrt2;
using special::kSqrtHalfPi;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Antiderivative of sqrt(2 log v) in v, written with Dawson's integral:
// v sqrt(2 log v) - sqrt(pi/2) erfi(sqrt(log v)) = sqrt(2) v (s - F(s)), s = sqrt(log v).
double root_log_antiderivative(double v) {
  const double s = std::sqrt(std::log(v));
  return kSqrt2 * v * (s - special::dawson(s));
}

const double kRootLogAtOne = root_log_antiderivative(2.0);

}  // namespace

double h_a(double x) {
  if (x < 0.0 || x > 1.0) throw ContractError("h_a: argument outside [0,1]");
  if (x == 0.0) return 0.0;
  return x * std::sqrt(-2.0 * std::log(x));
}

double h_b(double x, Index experts) {
  if (x < 0.0 || x > 1.0) throw ContractError("h_b: argument outside [0,1]");
  if (x == 0.0) return -kSqrtHalfPi;
  const double log_inv = -std::log(x);
  return x * std::sqrt(2.0 * log_inv) - kSqrtHalfPi * special::erf(std::sqrt(log_inv)) +
         x * static_cast<double>(experts - 1) * kSqrtHalfPi;
}

double root_log_value_by_quadrature(double x, double abs_tol) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ContractError("root_log quadrature: x must be finite and >= 0");
  auto integrand = [](double s) { return std::sqrt(2.0 * std::log1p(s)); };
  if (x >= 1.0) return special::adaptive_integral(integrand, 1.0, x, abs_tol).value;
  return -special::adaptive_integral(integrand, x, 1.0, abs_tol).value;
}

DivergenceGenerator::DivergenceGenerator(GeneratorKind kind, double upper, Index carl_experts)
    : kind_(kind), upper_(upper), carl_experts_(carl_experts) {
  if (!(upper_ > 0.0)) throw ContractError("generator: domain upper bound must be positive");
  switch (kind_) {
    case GeneratorKind::shannon:
      centered_min_ = -kInf;
      centered_max_ = std::isinf(upper_) ? kInf : 1.0 + std::log(upper_);
      break;
    case GeneratorKind::chi_squared:
      centered_min_ = 0.0;
      centered_max_ = 2.0 * upper_;
      break;
    case GeneratorKind::root_log:
      centered_min_ = 0.0;
      centered_max_ = std::isinf(upper_) ? kInf : std::sqrt(2.0 * std::log1p(upper_));
      break;
    case GeneratorKind::carl:
      offset_ = -static_cast<double>(carl_experts_ - 1) * kSqrtHalfPi;
      centered_min_ = -kInf;
      centered_max_ = -std::sqrt(-2.0 * std::log(upper_));
      break;
  }
  deriv_min_ = centered_min_ + offset_;
  deriv_max_ = centered_max_ + offset_;
}

std::string DivergenceGenerator::name() const {
  switch (kind_) {
    case GeneratorKind::shannon: return "shannon";
    case GeneratorKind::chi_squared: return "chi_squared";
    case GeneratorKind::root_log: return "root_log";
    case GeneratorKind::carl: return "carl";
  }
  return "unknown";
}

void DivergenceGenerator::check_domain(double x, const char* what) const {
  if (!(x >= 0.0 && x <= upper_)) {
    throw ContractError(name() + " " + what + ": argument " + std::to_string(x) +
                        " outside domain [0, " + std::to_string(upper_) + "]");
  }
}

double DivergenceGenerator::value(double x) const {
  check_domain(x, "f");
  switch (kind_) {
    case GeneratorKind::shannon: return x == 0.0 ? 0.0 : x * std::log(x);
    case GeneratorKind::chi_squared: return x * x - 1.0;
    case GeneratorKind::root_log: return root_log_antiderivative(1.0 + x) - kRootLogAtOne;
    case GeneratorKind::carl: return -h_b(x, carl_experts_);
  }
  return 0.0;
}

double DivergenceGenerator::centered_derivative(double x) const {
  check_domain(x, "f'");
  switch (kind_) {
    case GeneratorKind::shannon: return 1.0 + std::log(x);
    case GeneratorKind::chi_squared: return 2.0 * x;
    case GeneratorKind::root_log: return std::sqrt(2.0 * std::log1p(x));
    case GeneratorKind::carl: return x == 0.0 ? -kInf : -std::sqrt(-2.0 * std::log(x));
  }
  return 0.0;
}

double DivergenceGenerator::derivative(double x) const {
  return centered_derivative(x) + offset_;
}

double DivergenceGenerator::curvature(double x) const {
  check_domain(x, "f''");
  switch (kind_) {
    case GeneratorKind::shannon: return 1.0 / x;
    case GeneratorKind::chi_squared: return 2.0;
    case GeneratorKind::root_log: {
      if (x == 0.0) return kInf;
      return 1.0 / ((1.0 + x) * std::sqrt(2.0 * std::log1p(x)));
    }
    case GeneratorKind::carl: {
      const double ha = h_a(x);
      return ha == 0.0 ? kInf : 1.0 / ha;
    }
  }
  return 0.0;
}

double DivergenceGenerator::clamp_derivative(double y) const {
  return std::max(std::min(y, deriv_max_), deriv_min_);
}

double DivergenceGenerator::inverse_derivative_centered(double z) const {
  if (std::isnan(z)) throw ContractError("inverse derivative: NaN argument");
  z = std::max(std::min(z, centered_max_), centered_min_);
  double x = 0.0;
  switch (kind_) {
    case GeneratorKind::shannon: x = std::exp(z - 1.0); break;
    case GeneratorKind::chi_squared: x = 0.5 * z; break;
    case GeneratorKind::root_log: x = std::expm1(0.5 * z * z); break;
    case GeneratorKind::carl: x = std::exp(-0.5 * z * z); break;
  }
  return std::min(x, upper_);
}

double DivergenceGenerator::inverse_derivative(double y) const {
  return inverse_derivative_centered(y - offset_);
}

DivergenceGenerator DivergenceGenerator::restricted_to(double upper) const {
  return DivergenceGenerator(kind_, std::min(upper_, upper), carl_experts_);
}

DivergenceGenerator make_shannon(double domain_upper) {
  return DivergenceGenerator(GeneratorKind::shannon, domain_upper, 0);
}

DivergenceGenerator make_chi_squared(double domain_upper) {
  return DivergenceGenerator(GeneratorKind::chi_squared, domain_upper, 0);
}

DivergenceGenerator make_root_log(double domain_upper) {
  return DivergenceGenerator(GeneratorKind::root_log, domain_upper, 0);
}

DivergenceGenerator make_carl(Index experts) {
  if (experts < 2) throw ContractError("make_carl: need at least two experts");
  return DivergenceGenerator(GeneratorKind::carl, 1.0, experts);
}

double bregman(const DivergenceGenerator& gen, double x, double y) {
  const double slope = gen.derivative(y);
  if (!std::isfinite(slope)) throw ContractError("bregman: f' diverges at y");
  return gen.value(x) - gen.value(y) - slope * (x - y);
}

}  // namespace ftrl
