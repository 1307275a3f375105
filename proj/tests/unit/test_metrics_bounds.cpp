#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ftrl/bounds.hpp"
#include "ftrl/engine.hpp"
#include "ftrl/environments.hpp"
#include "ftrl/errors.hpp"
#include "ftrl/experiments.hpp"
#include "ftrl/metrics.hpp"
#include "ftrl/regularizers.hpp"

using namespace ftrl;

namespace {

Vector random_simplex(std::mt19937_64& rng, Index n) {
  std::exponential_distribution<double> e(1.0);
  Vector w(n);
  for (Index i = 0; i < n; ++i) w(i) = e(rng);
  return w / w.sum();
}

}  // namespace

TEST_CASE("regret against comparators") {
  RegretTrajectory traj(2);
  traj.record(WeightVector::uniform(2), Vector{{0.0, 1.0}});
  CHECK(regret_vs(traj, WeightVector::one_hot(2, 0)) == 0.5);
  CHECK(regret_vs(traj, WeightVector::one_hot(2, 1)) == -0.5);

  RegretTrajectory same(3);
  const WeightVector q(Vector{{0.2, 0.3, 0.5}});
  for (int t = 0; t < 5; ++t) same.record(q, Vector{{0.1 * t, 0.5, 1.0}});
  CHECK(std::abs(regret_vs(same, q)) <= 1e-12);

  // Hand-summed three rounds.
  RegretTrajectory hand(3, {WeightVector::one_hot(3, 2)});
  hand.record(WeightVector(Vector{{0.5, 0.5, 0.0}}), Vector{{0.2, 0.4, 0.9}});  // 0.3
  hand.record(WeightVector(Vector{{0.25, 0.25, 0.5}}), Vector{{1.0, 0.0, 0.2}});  // 0.35
  hand.record(WeightVector(Vector{{0.0, 1.0, 0.0}}), Vector{{0.6, 0.7, 0.1}});  // 0.7
  CHECK(hand.player_total() == doctest::Approx(1.35));
  CHECK(hand.expert_cumulative()(0) == doctest::Approx(1.8));
  CHECK(hand.expert_cumulative()(1) == doctest::Approx(1.1));
  CHECK(hand.expert_cumulative()(2) == doctest::Approx(1.2));
  CHECK(quantile_regret(hand, 1) == doctest::Approx(0.25));
  CHECK(quantile_regret(hand, 2) == doctest::Approx(0.15));
  CHECK(quantile_regret(hand, 3) == doctest::Approx(-0.45));
  CHECK(regret_vs(hand, QuantileIndex{2}) == doctest::Approx(0.15));
  CHECK(hand.tracked_regret(0, 3) == doctest::Approx(0.15));
  CHECK(hand.best_regret(1) == doctest::Approx(0.1));
  CHECK(hand.best_regret(2) == doctest::Approx(0.25));
  CHECK(regret_vs_uniform_top(hand, 2) == doctest::Approx(1.35 - 1.15));
  CHECK_THROWS_AS(quantile_regret(hand, 4), ContractError);
  CHECK_THROWS_AS(quantile_regret(hand, 0), ContractError);
  CHECK_THROWS_AS(regret_vs(hand, WeightVector::uniform(2)), ContractError);
}

TEST_CASE("identical experts make every quantile equal") {
  RegretTrajectory traj(4);
  for (int t = 0; t < 10; ++t) traj.record(0.3, Vector::Constant(4, 0.5));
  for (Index i = 1; i <= 4; ++i) CHECK(quantile_regret(traj, i) == quantile_regret(traj, 1));
}

TEST_CASE("trajectory regret equals player minus comparator") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const WeightVector q(random_simplex(rng, 5));
  RegretTrajectory traj(5, {q});
  double player = 0.0, comparator = 0.0;
  for (Index t = 1; t <= 50; ++t) {
    Vector loss(5);
    for (Index i = 0; i < 5; ++i) loss(i) = u(rng);
    const WeightVector w(random_simplex(rng, 5));
    traj.record(w, loss);
    player += w.values().dot(loss);
    comparator += q.values().dot(loss);
    CHECK(std::abs(traj.tracked_regret(0, t) - (player - comparator)) <= 1e-9);
  }
}

TEST_CASE("divergences") {
  const Prior uniform = Prior::uniform(4);
  for (const auto& gen : {make_shannon(), make_chi_squared(), make_root_log()}) {
    CHECK(std::abs(f_divergence(gen, WeightVector::uniform(4), uniform)) <= 1e-15);
  }
  for (Index n : {4, 10, 64}) {
    for (Index i = 1; i <= n; ++i) {
      Vector cumulative(n);
      for (Index k = 0; k < n; ++k) cumulative(k) = static_cast<double>(k);
      const WeightVector top = uniform_top(cumulative, i);
      CHECK(std::abs(kl_divergence(top, Prior::uniform(n)) - std::log(double(n) / double(i))) <= 1e-12);
    }
  }
  const double rl = f_divergence(make_root_log(), WeightVector(Vector{{0.9, 0.1}}), Prior::uniform(2));
  CHECK(std::abs(rl - 0.14901402045155880123) <= 1e-10);

  const Prior partial(Vector{{0.5, 0.0, 0.5}});
  CHECK_THROWS_AS(kl_divergence(WeightVector(Vector{{0.5, 0.1, 0.4}}), partial), ContractError);
  CHECK_NOTHROW(kl_divergence(WeightVector(Vector{{0.5, 0.0, 0.5}}), partial));
  CHECK_THROWS_AS(kl_divergence(WeightVector::uniform(2), Prior::counting(2)), ContractError);
}

TEST_CASE("root-log divergence is controlled by KL") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 1000; ++rep) {
    const Index n = 2 + static_cast<Index>(rng() % 30);
    const Vector q = random_simplex(rng, n);
    const Prior prior(random_simplex(rng, n));
    const WeightVector wq(q);
    const double lhs = f_divergence(make_root_log(), wq, prior);
    const double kl = kl_divergence(wq, prior);
    CHECK(lhs <= std::sqrt(2.0) * std::sqrt(1.0 + kl) + 1e-9);
  }
}

TEST_CASE("entropy examples") {
  for (Index n : {2, 5, 100}) {
    const auto vertex = WeightVector::one_hot(n, n - 1);
    CHECK(entropy_a(vertex) == 0.0);
    CHECK(std::abs(entropy_b(vertex)) <= 1e-12);
    CHECK(entropy_a(WeightVector::uniform(n)) == doctest::Approx(std::sqrt(2.0 * std::log(double(n)))));
  }
}

TEST_CASE("entropy chain on random simplex points") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 1000; ++rep) {
    const Index n = 2 + static_cast<Index>(rng() % 40);
    Vector raw = random_simplex(rng, n);
    if (rep % 3 == 0) raw = raw.array().pow(4.0).matrix() / raw.array().pow(4.0).sum();
    const WeightVector w(raw);
    const double ha = entropy_a(w), hb = entropy_b(w);
    CHECK(hb >= -1e-9);
    CHECK(hb <= ha + 1e-9);

    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Index n0 = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    for (double p : {0.25, 0.5, 0.75}) {
      double power_sum = 0.0, root_sum = 0.0;
      for (Index k = n0; k < n; ++k) {
        const double wi = w(perm[static_cast<std::size_t>(k)]);
        power_sum += std::pow(wi, p);
        root_sum += std::sqrt(wi);
      }
      const double bound = std::sqrt(2.0 * std::log(double(n0))) + power_sum / std::sqrt(std::exp(1.0) * (1.0 - p)) +
                           (n0 == 1 ? std::sqrt(2.0) * root_sum : 0.0);
      CHECK(ha <= bound + 1e-9);
    }
  }
}

TEST_CASE("abnormal bound") {
  CHECK(std::abs(bound_abnormal(99, 0.0) - 48.142494558940577327) <= 1e-12);
  CHECK(bound_abnormal(99, 0.0) == doctest::Approx(20.0 + std::sqrt(792.0)));
  CHECK(bound_abnormal(1, 0.0) == doctest::Approx(4.0 * std::sqrt(2.0)));
  CHECK(bound_abnormal(50, 3.0) > bound_abnormal(50, 0.0));
  CHECK_THROWS_AS(bound_abnormal(0, 0.0), ContractError);
}

TEST_CASE("carl bounds and profiles") {
  CHECK(std::abs(bound_carl(2, 2) - 1.6651092223153955127) <= 1e-12);
  CHECK_THROWS_AS(bound_carl(2, 1), ContractError);

  const SemiAdvProfile p(2, 1, {0.1});
  CHECK(p.thresholds().front() == 555.0);
  CHECK(p.t0() == 555.0);
  CHECK(bound_carl_refined(555, p) == bound_carl(555, 2));
  CHECK(bound_carl_refined(556, p) != bound_carl(556, 2));

  const SemiAdvProfile all(10, 10, {});
  CHECK(bound_carl_refined(1000, all) ==
        doctest::Approx(std::sqrt(2.0 * 1000 * std::log(10.0)) + std::sqrt(std::log(10.0))));
  CHECK_THROWS_AS(SemiAdvProfile(3, 1, {0.1}), ContractError);
  CHECK_THROWS_AS(SemiAdvProfile(3, 2, {0.0}), ContractError);

  // Hand evaluation of the refined bound for N = 3, N0 = 1, gaps (0.2, 0.5).
  const SemiAdvProfile q(3, 1, {0.5, 0.2});
  CHECK(q.min_gap() == 0.2);
  const double T = 1000;
  const double ln3 = std::log(3.0);
  const double w0 = std::sqrt(std::log(2.0)) / std::sqrt(ln3);
  const double w1 = (std::sqrt(ln3) - std::sqrt(std::log(2.0))) / std::sqrt(ln3);
  const double expected = 0.0 + 4.0 * ln3 * (w0 / 0.2 + w1 / 0.5) +
                          5.0 * std::sqrt(2.0) / (3.0 * std::sqrt(ln3)) * (std::exp(-0.5) + 1.0) * (1 / 0.5 + 1 / 0.2) +
                          std::sqrt(ln3);
  CHECK(q.t0() < T);
  CHECK(bound_carl_refined(T, q) == doctest::Approx(expected).epsilon(1e-14));

  // Simpler gap-dependent form.
  const SemiAdvProfile two(1000, 2, std::vector<double>(998, 0.1));
  const double t_big = 1e5;
  CHECK(bound_carl_simple(t_big, two) ==
        doctest::Approx(std::sqrt(2 * t_big * std::log(2.0)) + 25 * std::log(1000.0) / 0.1));
  CHECK(bound_carl_simple(10, two) == bound_carl(10, 1000));
}

TEST_CASE("telescoping weights sum to at most one") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 300; ++rep) {
    const Index n = 2 + static_cast<Index>(rng() % 500);
    const Index n0 = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
    const SemiAdvProfile p(n, n0, std::vector<double>(static_cast<std::size_t>(n - n0), 0.3));
    const auto w = p.telescoping_weights();
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    CHECK(sum <= 1.0 + 1e-12);
    if (n0 == 1) CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("lower bound evaluator") {
  CHECK(std::abs(bound_lower_quantile(4096, 64, 4) - 49.276136707079596537) <= 1e-9);
  const double lead = bound_lower_quantile(100, 4, 1) + std::sqrt(2.0 / M_PI) + 2 * std::log(4.0) + std::log(2.0);
  CHECK(lead == doctest::Approx(std::sqrt(50.0 / M_PI)));
  const double offset = std::sqrt(2.0 / M_PI) + 2 * std::log(64.0) + std::log(2.0);
  CHECK(bound_lower_quantile(8192, 64, 4) + offset ==
        doctest::Approx(std::sqrt(2.0) * (bound_lower_quantile(4096, 64, 4) + offset)));
  CHECK(bound_lower_quantile(1, 64, 4) < 0.0);
  CHECK_THROWS_AS(bound_lower_quantile(100, 64, 17), ContractError);
}

TEST_CASE("quantile regret on the Hadamard environment equals any good expert's regret") {
  const Index k = 5, r = 2;
  const LossMatrix losses = hadamard_losses(k, r, 256);
  auto learner = make_learner(AlgorithmSpec{}, losses.experts());
  const auto result = play(*learner, losses);
  const auto& traj = result.trajectory;
  const double q = quantile_regret(traj, k * r);
  for (Index i = 0; i < losses.experts(); ++i) {
    if (i % kHadamardBaseExperts < k) {
      CHECK(regret_vs(traj, WeightVector::one_hot(losses.experts(), i)) == doctest::Approx(q).epsilon(1e-12));
    }
  }
  CHECK(q <= regret_vs_uniform_top(traj, k * r) + 1e-12);
}

TEST_CASE("point-mass quantile regret is at most uniform-top regret") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const Index n = 8;
    Session s = make_abnormal(n);
    RegretTrajectory traj(n);
    for (int t = 0; t < 50; ++t) {
      Vector loss(n);
      for (Index i = 0; i < n; ++i) loss(i) = u(rng);
      const auto w = s.predict();
      s.update(loss);
      traj.record(w, loss);
    }
    for (Index i = 1; i <= n; ++i) CHECK(quantile_regret(traj, i) <= regret_vs_uniform_top(traj, i) + 1e-12);
  }
}
