#include <doctest.h>

#include <random>

#include "ftrl/core.hpp"
#include "ftrl/errors.hpp"

using namespace ftrl;

TEST_CASE("prior validation and summaries") {
  Prior p(Vector{{0.2, 0.0, 0.8}});
  CHECK(p.total_mass() == doctest::Approx(1.0));
  CHECK(p.min_positive_mass() == doctest::Approx(0.2));
  CHECK(p.density_upper_bound() == doctest::Approx(5.0));
  CHECK(Prior::counting(3).total_mass() == 3.0);
  CHECK(Prior::uniform(4).mass(2) == 0.25);

  CHECK_THROWS_AS(Prior{Vector()}, ContractError);
  CHECK_THROWS_AS(Prior(Vector{{0.0, 0.0}}), ContractError);
  CHECK_THROWS_AS(Prior(Vector{{0.5, -0.1}}), ContractError);
  CHECK_THROWS_AS(Prior(Vector{{0.5, std::nan("")}}), ContractError);
}

TEST_CASE("weight vector invariants") {
  CHECK_NOTHROW(WeightVector(Vector{{0.5, 0.5 + 1e-10}}));
  CHECK_THROWS_AS(WeightVector(Vector{{0.5, 0.6}}), ContractError);
  CHECK_THROWS_AS(WeightVector(Vector{{1.1, -0.1}}), ContractError);
  CHECK(WeightVector::one_hot(3, 1)(1) == 1.0);
  CHECK(WeightVector::uniform(4)(3) == 0.25);
}

TEST_CASE("weights_from_densities examples") {
  {
    const auto w = weights_from_densities(Prior::uniform(2), DensityVector(Vector{{1.0, 1.0}}, Prior::uniform(2)));
    CHECK(w(0) == 0.5);
    CHECK(w(1) == 0.5);
  }
  {
    const Prior p = Prior::counting(2);
    const auto w = weights_from_densities(p, DensityVector(Vector{{0.75, 0.25}}, p));
    CHECK(w(0) == 0.75);
    CHECK(w(1) == 0.25);
  }
  {
    const Prior p(Vector{{0.2, 0.8}});
    const auto w = weights_from_densities(p, DensityVector(Vector{{2.5, 0.625}}, p));
    CHECK(w(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w(1) == doctest::Approx(0.5).epsilon(1e-15));
  }
  CHECK_THROWS_AS(weights_from_densities(Prior::counting(3), DensityVector(Vector{{0.5, 0.5}}, Prior::counting(2))),
                  ContractError);
  // Density above 1/min mass is rejected.
  CHECK_THROWS_AS(DensityVector(Vector{{1.5, 0.0}}, Prior::counting(2)), ContractError);
}

TEST_CASE("densities round trip through weights") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 1 + static_cast<Index>(rng() % 20);
    Vector m(n), w(n);
    for (Index i = 0; i < n; ++i) m(i) = u(rng), w(i) = u(rng);
    w /= w.sum();
    m /= m.sum();
    const Prior prior(m);
    const WeightVector wv(w);
    const auto back = weights_from_densities(prior, densities_from_weights(prior, wv));
    for (Index i = 0; i < n; ++i) CHECK(std::abs(back(i) - w(i)) <= 1e-12);
  }
}

TEST_CASE("mixture_loss examples and monotonicity") {
  CHECK(mixture_loss(WeightVector::one_hot(4, 3), Vector{{0.1, 0.2, 0.3, 0.7}}) == 0.7);
  CHECK(mixture_loss(WeightVector::uniform(2), Vector{{0.0, 1.0}}) == 0.5);
  CHECK(mixture_loss(WeightVector(Vector{{0.75, 0.25}}), Vector{{0.2, 0.6}}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(mixture_loss(WeightVector::uniform(2), Vector{{0.0, 1.5}}), ContractError);
  CHECK_THROWS_AS(mixture_loss(WeightVector::uniform(2), Vector{{0.0}}), ContractError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 2 + static_cast<Index>(rng() % 10);
    Vector w(n), loss(n);
    for (Index i = 0; i < n; ++i) w(i) = u(rng), loss(i) = u(rng);
    w /= w.sum();
    const WeightVector wv(w);
    const double base = mixture_loss(wv, loss);
    const Index k = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    loss(k) = loss(k) + (1.0 - loss(k)) * u(rng);
    CHECK(mixture_loss(wv, loss) >= base);
  }
}

TEST_CASE("loss record bookkeeping") {
  LossRecord r(2);
  r.append(Vector{{1.0, 0.0}});
  r.append(Vector{{0.0, 1.0}});
  CHECK(r.rounds() == 2);
  CHECK(r.cumulative()(0) == 1.0);
  CHECK(r.cumulative()(1) == 1.0);
  CHECK(r.round(1)(1) == 1.0);
  CHECK_THROWS_AS(r.append(Vector{{0.0, 1.2}}), ContractError);
  CHECK_NOTHROW(r.append(Vector{{0.0, 1.2}}, false));
  CHECK_THROWS_AS(r.append(Vector{{0.0}}), ContractError);

  LossRecord lean(2, false);
  lean.append(Vector{{0.5, 0.5}});
  CHECK_THROWS_AS(lean.round(0), ContractError);
}

TEST_CASE("comparator validation") {
  CHECK_NOTHROW(validate(Comparator{QuantileIndex{3}}, 3));
  CHECK_THROWS_AS(validate(Comparator{QuantileIndex{4}}, 3), ContractError);
  CHECK_THROWS_AS(validate(Comparator{QuantileIndex{0}}, 3), ContractError);
  CHECK_THROWS_AS(validate(Comparator{WeightVector::uniform(2)}, 3), ContractError);
}

TEST_CASE("model selection prior") {
  const Index one[] = {1};
  CHECK(model_selection_prior(one).mass(0) == 1.0);
  const Index pair[] = {1, 1};
  const Prior p2 = model_selection_prior(pair);
  CHECK(p2.mass(0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(p2.mass(1) == doctest::Approx(0.2).epsilon(1e-15));
  const Index twos[] = {2, 2};
  const Prior p4 = model_selection_prior(twos);
  CHECK(p4.mass(0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(p4.mass(1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(p4.mass(2) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(p4.mass(3) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(model_selection_prior(std::span<const Index>{}), ContractError);
}

TEST_CASE("ascending order breaks ties by index") {
  const auto order = ascending_order(Vector{{2.0, 1.0, 2.0, 1.0}});
  CHECK(order == std::vector<Index>{1, 3, 0, 2});
}
