#include <doctest.h>

#include <cmath>
#include <random>

#include "ftrl/errors.hpp"
#include "ftrl/normalization.hpp"

using namespace ftrl;

namespace {

Vector softmax(const Vector& s, const Prior& prior) {
  const double lo = s.minCoeff();
  Vector w = (-(s.array() - lo)).exp().matrix().cwiseProduct(prior.masses());
  return w / w.sum();
}

Vector solved_weights(const DivergenceGenerator& gen, const Prior& prior, const Vector& s) {
  const auto solved = normalized_densities(gen, prior, s);
  return solved.densities.values().cwiseProduct(prior.masses());
}

}  // namespace

TEST_CASE("equal losses give the prior") {
  for (const auto& gen : {make_shannon(), make_chi_squared(), make_root_log()}) {
    const Vector w = solved_weights(gen, Prior::uniform(5), Vector::Constant(5, 3.0));
    for (Index i = 0; i < 5; ++i) CHECK(w(i) == doctest::Approx(0.2).epsilon(1e-12));
  }
  const Vector w = solved_weights(make_carl(4), Prior::counting(4), Vector::Constant(4, 1.5));
  for (Index i = 0; i < 4; ++i) CHECK(w(i) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("chi squared hand solution") {
  const auto solved = normalized_densities(make_chi_squared(), Prior::counting(2), Vector{{0.0, 1.0}});
  CHECK(solved.densities(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(solved.densities(1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(solved.report.k_star == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(solved.report.bracket_lo <= solved.report.k_star);
  CHECK(solved.report.k_star <= solved.report.bracket_hi);
}

TEST_CASE("shannon softmax example and bracket") {
  const Prior p = Prior::counting(2);
  const Vector s{{0.0, std::log(2.0)}};
  const auto solved = normalized_densities(make_shannon(1.0), p, s);
  CHECK(solved.densities(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(solved.densities(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const auto [lo, hi] = initial_bracket(make_shannon(1.0), p, s);
  CHECK(normalization_mass(make_shannon(1.0), p, s, lo) <= 1.0 + 1e-14);
  CHECK(normalization_mass(make_shannon(1.0), p, s, hi) >= 1.0 - 1e-14);
}

TEST_CASE("root log bracket on a probability prior") {
  const Prior p = Prior::uniform(3);
  const Vector s{{0.0, 0.5, 1.0}};
  const auto gen = make_root_log();
  const auto [lo, hi] = initial_bracket(gen, p, s);
  CHECK(normalization_mass(gen, p, s, lo) <= 1.0 + 1e-14);
  CHECK(normalization_mass(gen, p, s, hi) >= 1.0 - 1e-14);
  const auto solved = normalized_densities(gen, p, s);
  CHECK(solved.report.residual <= 1e-12);
}

TEST_CASE("hedge equivalence on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const Index n = 1 + static_cast<Index>(rng() % 64);
    const double eta = 10.0 * u(rng);
    const Index rounds = 1 + static_cast<Index>(rng() % 50);
    Vector cumulative = Vector::Zero(n);
    for (Index t = 0; t < rounds; ++t) {
      for (Index i = 0; i < n; ++i) cumulative(i) += u(rng);
    }
    Vector masses(n);
    for (Index i = 0; i < n; ++i) masses(i) = 0.1 + u(rng);
    const Prior prior(masses);
    const Vector s = eta * cumulative;
    const Vector w = solved_weights(make_shannon(), prior, s);
    worst = std::max(worst, (w - softmax(s, prior)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("g is nondecreasing and weights respond to losses") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 2 + static_cast<Index>(rng() % 30);
    Vector s(n);
    for (Index i = 0; i < n; ++i) s(i) = 5.0 * u(rng);
    const int which = rep % 4;
    const DivergenceGenerator gen = which == 0   ? make_shannon()
                                    : which == 1 ? make_chi_squared()
                                    : which == 2 ? make_root_log()
                                                 : make_carl(n);
    const Prior prior = which == 3 ? Prior::counting(n) : Prior::uniform(n);
    const auto [lo, hi] = initial_bracket(gen, prior, s);
    double previous = -INFINITY;
    for (int k = 0; k <= 100; ++k) {
      const double g = normalization_mass(gen, prior, s, lo + (hi - lo) * k / 100.0);
      CHECK(g >= previous);
      previous = g;
    }

    const auto base = normalized_densities(gen, prior, s);
    CHECK(base.report.residual <= 1e-12);
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    Vector raised = s;
    raised(j) += u(rng);
    const auto after = normalized_densities(gen, prior, raised);
    CHECK(after.densities(j) * prior.mass(j) <= base.densities(j) * prior.mass(j) + 1e-9);
  }
}

TEST_CASE("degenerate and invalid inputs") {
  // One expert far ahead under CARL: the best expert takes all the mass.
  const auto solved = normalized_densities(make_carl(3), Prior::counting(3), Vector{{0.0, 500.0, 800.0}});
  CHECK(solved.densities(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(solved.densities(1) <= 1e-12);

  // Zero prior mass gets zero density.
  const Prior partial(Vector{{0.5, 0.0, 0.5}});
  const auto z = normalized_densities(make_root_log(), partial, Vector{{0.0, -10.0, 1.0}});
  CHECK(z.densities(1) == 0.0);

  CHECK_THROWS_AS(normalized_densities(make_shannon(), Prior::counting(2), Vector{{0.0, INFINITY}}),
                  ContractError);
  CHECK_THROWS_AS(normalized_densities(make_shannon(), Prior::counting(2), Vector{{0.0}}), ContractError);
  CHECK_THROWS_AS(normalized_densities(make_carl(2), Prior::uniform(2), Vector{{0.0, 0.0}}), ContractError);
}
