#include "ftrl/normalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ftrl/errors.hpp"

namespace ftrl {

namespace {

using Array = Eigen::ArrayXd;

// Rounding allowance when checking that the analytic bracket endpoints
// straddle the root.
constexpr double kSlack = 1e-14;

// The normalization equation restated on the experts with positive mass, in
// coordinates u = k - min(s) - offset so the large constants cancel exactly:
// expert i sees the centered argument u - d_i with d_i = s_i - min(s) >= 0.
class NormalizationProblem {
 public:
  NormalizationProblem(const DivergenceGenerator& gen, const Prior& prior, const Vector& scaled)
      : gen_(bind(gen, prior)), prior_(prior) {
    if (scaled.size() != prior.size()) throw ContractError("normalization: length mismatch");
    if (!scaled.allFinite()) throw ContractError("normalization: non-finite scaled loss");

    for (Index i = 0; i < prior.size(); ++i) {
      if (prior.mass(i) > 0.0) active_.push_back(i);
    }
    const Index n = static_cast<Index>(active_.size());
    mass_.resize(n);
    gap_.resize(n);
    shift_ = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      const Index i = active_[static_cast<std::size_t>(j)];
      mass_(j) = prior.mass(i);
      if (scaled(i) < shift_) {
        shift_ = scaled(i);
        best_ = j;
      }
    }
    for (Index j = 0; j < n; ++j) gap_(j) = scaled(active_[static_cast<std::size_t>(j)]) - shift_;
  }

  static DivergenceGenerator bind(const DivergenceGenerator& gen, const Prior& prior) {
    if (gen.kind() == GeneratorKind::carl && prior.min_positive_mass() < 1.0) {
      throw ContractError("normalization: CARL requires every positive prior mass >= 1");
    }
    return gen.restricted_to(prior.density_upper_bound());
  }

  Array densities(double u) const {
    const Array z = (u - gap_.array()).max(gen_.centered_deriv_min()).min(gen_.centered_deriv_max());
    Array x;
    switch (gen_.kind()) {
      case GeneratorKind::shannon: x = (z - 1.0).exp(); break;
      case GeneratorKind::chi_squared: x = 0.5 * z; break;
      case GeneratorKind::root_log: x = (0.5 * z.square()).unaryExpr([](double v) { return std::expm1(v); }); break;
      case GeneratorKind::carl: x = (-0.5 * z.square()).exp(); break;
    }
    return x.min(gen_.domain_upper());
  }

  double mass(double u) const { return (mass_.array() * densities(u)).sum(); }

  // Proof bracket around a = f'(1/nu(Theta)), tightened on the right by the
  // point where the best expert alone has density 1/nu_best.
  std::pair<double, double> bracket() const {
    const double anchor = centered_at(1.0 / prior_.total_mass());
    double lo = anchor;
    double hi = anchor + gap_.maxCoeff();
    const double solo = centered_at(1.0 / mass_(best_));
    if (std::isfinite(solo)) hi = std::isfinite(hi) ? std::min(hi, solo) : solo;
    if (std::isfinite(lo) && std::isfinite(hi) && mass(lo) <= 1.0 + kSlack && mass(hi) >= 1.0 - kSlack) {
      return {lo, hi};
    }
    return expanded_bracket();
  }

  // Geometric expansion around f' at the domain midpoint.
  std::pair<double, double> expanded_bracket() const {
    const double upper = gen_.domain_upper();
    const double centre = centered_at(std::isfinite(upper) ? 0.5 * upper : 1.0);
    double lo = std::isfinite(centre) ? centre : 0.0;
    double hi = lo;
    double step = 1.0;
    for (int i = 0; i < 200; ++i) {
      const bool lo_ok = mass(lo) <= 1.0;
      const bool hi_ok = mass(hi) >= 1.0;
      if (lo_ok && hi_ok) return {lo, hi};
      if (!lo_ok) lo -= step;
      if (!hi_ok) hi += step;
      step *= 2.0;
    }
    throw NumericError("normalization: bracket expansion failed (generator contract violated?)");
  }

  // True when the best expert alone absorbs all mass while every other
  // density is clamped at zero; the solution is then one-hot.
  bool single_atom(double u) const {
    if (!std::isfinite(gen_.centered_deriv_min())) return false;
    for (Index j = 0; j < gap_.size(); ++j) {
      if (j != best_ && u - gap_(j) > gen_.centered_deriv_min()) return false;
    }
    return true;
  }

  double centered_at(double x) const { return gen_.centered_derivative(std::min(x, gen_.domain_upper())); }

  Vector scatter(const Array& x_active) const {
    Vector x = Vector::Zero(prior_.size());
    for (Index j = 0; j < x_active.size(); ++j) x(active_[static_cast<std::size_t>(j)]) = x_active(j);
    return x;
  }

  double to_k(double u) const { return u + shift_ + gen_.derivative_offset(); }

  const DivergenceGenerator& generator() const { return gen_; }
  Index best() const { return best_; }
  double best_mass() const { return mass_(best_); }
  Index active_count() const { return static_cast<Index>(active_.size()); }

 private:
  DivergenceGenerator gen_;
  const Prior& prior_;
  std::vector<Index> active_;
  Vector mass_;
  Vector gap_;
  double shift_ = 0.0;
  Index best_ = 0;
};

}  // namespace

double normalization_mass(const DivergenceGenerator& gen, const Prior& prior,
                          const Vector& scaled_losses, double k) {
  const DivergenceGenerator bound = NormalizationProblem::bind(gen, prior);
  if (scaled_losses.size() != prior.size()) throw ContractError("normalization: length mismatch");
  double total = 0.0;
  for (Index i = 0; i < prior.size(); ++i) {
    if (prior.mass(i) > 0.0) total += prior.mass(i) * bound.inverse_derivative(k - scaled_losses(i));
  }
  return total;
}

std::pair<double, double> initial_bracket(const DivergenceGenerator& gen, const Prior& prior,
                                          const Vector& scaled_losses) {
  const NormalizationProblem problem(gen, prior, scaled_losses);
  const auto [lo, hi] = problem.bracket();
  return {problem.to_k(lo), problem.to_k(hi)};
}

NormalizedDensities normalized_densities(const DivergenceGenerator& gen, const Prior& prior,
                                         const Vector& scaled_losses, SolverOptions options) {
  if (!(options.tolerance > 0.0)) throw ContractError("normalization: tolerance must be positive");
  const NormalizationProblem problem(gen, prior, scaled_losses);
  auto [lo, hi] = problem.bracket();

  SolveReport report;
  report.bracket_lo = problem.to_k(lo);
  report.bracket_hi = problem.to_k(hi);

  const double solo = problem.centered_at(1.0 / problem.best_mass());
  if (std::isfinite(solo) && problem.single_atom(solo)) {
    Array x = Array::Zero(problem.active_count());
    x(problem.best()) = 1.0 / problem.best_mass();
    report.k_star = problem.to_k(solo);
    report.residual = 0.0;
    return {DensityVector(problem.scatter(x), prior), report};
  }

  double g_lo = problem.mass(lo);
  double g_hi = problem.mass(hi);
  double best_u = std::abs(g_lo - 1.0) <= std::abs(g_hi - 1.0) ? lo : hi;
  double best_residual = std::min(std::abs(g_lo - 1.0), std::abs(g_hi - 1.0));

  int iterations = 0;
  while (best_residual > options.tolerance && iterations < options.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket collapsed to adjacent doubles
    ++iterations;
    const double g_mid = problem.mass(mid);
    const double r = std::abs(g_mid - 1.0);
    if (r < best_residual) {
      best_residual = r;
      best_u = mid;
    }
    if (g_mid < 1.0) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }

  // Secant polish on the final bracket; kept only if it stays inside and helps.
  if (g_hi > g_lo) {
    const double u = lo + (1.0 - g_lo) * (hi - lo) / (g_hi - g_lo);
    if (u >= lo && u <= hi) {
      const double r = std::abs(problem.mass(u) - 1.0);
      if (r < best_residual) {
        best_residual = r;
        best_u = u;
      }
    }
  }

  const Array x = problem.densities(best_u);
  Vector densities = problem.scatter(x);
  report.k_star = problem.to_k(best_u);
  report.iterations = iterations;
  report.residual = std::abs(prior.masses().dot(densities) - 1.0);
  if (report.residual > options.tolerance) {
    throw NumericError("normalization: residual " + std::to_string(report.residual) +
                       " above tolerance after " + std::to_string(iterations) + " iterations");
  }
  return {DensityVector(std::move(densities), prior), report};
}

}  // namespace ftrl
