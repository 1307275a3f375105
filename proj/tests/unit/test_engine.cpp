#include <doctest.h>

#include <cmath>
#include <random>

#include "ftrl/engine.hpp"
#include "ftrl/errors.hpp"

using namespace ftrl;

TEST_CASE("first round plays the uniform distribution") {
  for (auto session : {make_abnormal(5), make_ftrl_carl(5), make_hedge(5)}) {
    const auto& w = session.predict();
    for (Index i = 0; i < 5; ++i) CHECK(w(i) == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("schedules") {
  CHECK(Schedule::inverse_root(3.0).eta(4, 10) == 1.5);
  CHECK(Schedule::carl_default().eta(16, 10) == 0.5);
  CHECK(Schedule::hedge_default(2.0).eta(4, 8) == doctest::Approx(std::sqrt(std::log(8.0))));
  CHECK(Schedule::hedge_default().eta(1, 1) > 0.0);
  CHECK_THROWS_AS(Schedule::inverse_root(0.0), ContractError);
  CHECK_THROWS_AS(Schedule::inverse_root(1.0).eta(0, 2), ContractError);
  CHECK(make_abnormal(3).schedule().eta(1, 3) == doctest::Approx(std::sqrt(1.0 / std::sqrt(2.0))));
}

TEST_CASE("variance adaptive eta examples") {
  VarianceState s{0.5, VarianceMode::prior, 1.0, 0.0};
  CHECK(variance_adaptive_eta(s) == doctest::Approx(2.0 * std::sqrt(2.0)));
  s.accumulated = weighted_variance(Vector{{0.5, 0.5}}, Vector{{0.0, 1.0}});
  CHECK(s.accumulated == 0.25);
  CHECK(variance_adaptive_eta(s) == doctest::Approx(2.0));

  Session session(make_chi_squared(), Prior::uniform(2), Schedule::variance_adaptive(0.5, VarianceMode::prior));
  for (int t = 0; t < 5; ++t) {
    session.predict();
    session.update(Vector{{0.3, 0.3}});
  }
  session.predict();
  CHECK(session.last_eta() == doctest::Approx(2.0 * std::sqrt(2.0)));

  Session played(make_root_log(), Prior::uniform(2), Schedule::variance_adaptive(1.0, VarianceMode::played));
  double previous = INFINITY;
  for (int t = 0; t < 6; ++t) {
    played.predict();
    CHECK(played.last_eta() <= previous);
    previous = played.last_eta();
    played.update(t % 2 == 0 ? Vector{{1.0, 0.0}} : Vector{{0.0, 1.0}});
  }
}

TEST_CASE("update bookkeeping") {
  SessionOptions keep;
  keep.keep_history = true;
  Session s = make_hedge(4, 1.0, keep);
  s.predict();
  CHECK(s.update(Vector{{0.0, 0.4, 0.8, 1.0}}) == doctest::Approx(0.55));
  s.predict();
  CHECK(s.update(Vector::Zero(4)) == 0.0);
  CHECK(s.losses().rounds() == 2);
  CHECK(s.losses().cumulative()(3) == 1.0);
  CHECK(s.losses().round(0)(1) == 0.4);
  CHECK_THROWS_AS(s.update(Vector::Zero(4)), ContractError);
  s.predict();
  CHECK_THROWS_AS(s.update(Vector{{0.0, 0.0, 0.0, 2.0}}), ContractError);

  Session two = make_hedge(2);
  two.predict();
  two.update(Vector{{1.0, 0.0}});
  two.predict();
  two.update(Vector{{0.0, 1.0}});
  CHECK(two.losses().cumulative()(0) == 1.0);
  CHECK(two.losses().cumulative()(1) == 1.0);
}

TEST_CASE("hedge session matches softmax") {
  Session s(make_shannon(), Prior::counting(2), Schedule::inverse_root(1.0));
  s.predict();
  s.update(Vector{{0.0, std::log(2.0)}});
  // Round 2 uses eta = 1/sqrt(2) on L = (0, log 2).
  const auto& w = s.predict();
  const double e = std::exp(-std::log(2.0) / std::sqrt(2.0));
  CHECK(w(0) == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-12));
}

TEST_CASE("symmetric losses keep abnormal uniform") {
  Session s = make_abnormal(3);
  for (int t = 0; t < 20; ++t) {
    s.predict();
    s.update(Vector::Constant(3, (t % 3) / 2.0));
  }
  const auto& w = s.predict();
  for (Index i = 0; i < 3; ++i) CHECK(w(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("replication invariance of generator-driven sessions") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Index n = 6, r = 3;
  Session base = make_abnormal(n);
  Session copy = make_abnormal(n * r);
  Session base_chi(make_chi_squared(), Prior::uniform(n), Schedule::inverse_root(std::sqrt(2.0)));
  Session copy_chi(make_chi_squared(), Prior::uniform(n * r), Schedule::inverse_root(std::sqrt(2.0)));
  for (int t = 0; t < 300; ++t) {
    Vector loss(n);
    for (Index i = 0; i < n; ++i) loss(i) = u(rng);
    Vector tiled(n * r);
    for (Index i = 0; i < n * r; ++i) tiled(i) = loss(i % n);
    base.predict();
    copy.predict();
    base_chi.predict();
    copy_chi.predict();
    CHECK(std::abs(base.update(loss) - copy.update(tiled)) <= 1e-9);
    CHECK(std::abs(base_chi.update(loss) - copy_chi.update(tiled)) <= 1e-9);
  }
}

TEST_CASE("sessions are deterministic") {
  auto run = [] {
    Session s = make_ftrl_carl(8);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out;
    for (int t = 0; t < 100; ++t) {
      const auto w = s.predict().values();
      out.insert(out.end(), w.data(), w.data() + w.size());
      Vector loss(8);
      for (Index i = 0; i < 8; ++i) loss(i) = u(rng);
      s.update(loss);
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("CARL weight tail on a random sequence") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Index n = 16;
  Session s = make_ftrl_carl(n);
  Vector cumulative = Vector::Zero(n);
  for (Index t = 1; t <= 500; ++t) {
    s.predict();
    Vector loss(n);
    for (Index i = 0; i < n; ++i) loss(i) = std::min(1.0, u(rng) + 0.02 * static_cast<double>(i) / n);
    s.update(loss);
    cumulative += loss;
    const auto& w = s.predict();
    const double best = cumulative.minCoeff();
    for (Index i = 0; i < n; ++i) {
      const double gap = cumulative(i) - best;
      CHECK(w(i) <= std::exp(-4.0 * gap * gap / (2.0 * static_cast<double>(t + 1))) + 1e-9);
    }
  }
}
