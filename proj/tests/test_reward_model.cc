#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "relaygame/reward_model.h"
#include "support.h"

using namespace relaygame;

TEST_CASE("progress examples") {
  const Point sink{1000, 0};
  const Point v1{0, 5};
  CHECK(compute_progress(v1, v1, sink) == 0.0);
  CHECK(compute_progress(sink, v1, sink) == doctest::Approx(std::hypot(1000.0, 5.0)));
  // Hand arithmetic: sqrt(1000^2 + 5^2) - sqrt(960^2 + 5^2).
  const double expected = std::sqrt(1000025.0) - std::sqrt(921625.0);
  CHECK(compute_progress({40, 5}, v1, sink) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(39.99948).epsilon(1e-6));

  GeoScenario s;
  s.forwarder_1 = v1;
  CHECK(compute_progress({40, 5}, Forwarder::kFirst, s) == compute_progress({40, 5}, v1, sink));
  CHECK(compute_progress({-10, 5}, Forwarder::kFirst, s) < 0);
}

TEST_CASE("required power") {
  RadioParams r;
  CHECK(*required_power(5, 1e-3, r) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(*required_power(80, 0.4e-3, r) ==
        doctest::Approx(1e-9 / 0.4e-3 * std::pow(16.0, 2.5)).epsilon(1e-12));
  CHECK_FALSE(required_power(80.001, 1e-3, r).has_value());
  CHECK(*required_power(40, 1e-3, r) < *required_power(40, 0.6e-3, r));
  CHECK_THROWS_AS(required_power(4.99, 1e-3, r), std::invalid_argument);
  CHECK_THROWS_AS(required_power(10, 0.0, r), std::invalid_argument);

  r.max_power_mw = 1e-5;
  CHECK_FALSE(required_power(60, 0.4e-3, r).has_value());
}

TEST_CASE("reward value") {
  RadioParams r;
  CHECK(reward_value(40, 1e-3, r).value() == doctest::Approx(200.0).epsilon(1e-14));
  CHECK(reward_value(0, 1e-3, r).value() == 0.0);
  CHECK_FALSE(reward_value(40, std::nullopt, r).feasible());
  CHECK_THROWS(reward_value(-1, 1e-3, r));
  r.tradeoff_a = 1.0;
  CHECK(reward_value(37.5, 0.2, r).value() == 37.5);
  CHECK(reward_value(37.5, 0.9, r).value() == 37.5);

  SUBCASE("monotone in power for a < 1") {
    RadioParams q;
    double last = INFINITY;
    for (double p = 1e-6; p < 1; p *= 1.7) {
      const double v = reward_value(25, p, q).value();
      CHECK(v <= last);
      last = v;
    }
  }
}

TEST_CASE("reward sentinel ordering") {
  const Reward inf = Reward::Infeasible();
  CHECK(inf < Reward::Of(-1e300));
  CHECK_FALSE(inf.feasible());
  CHECK_THROWS(inf.value());
  CHECK(Reward::Of(2.0) == Reward::Of(2.0));
}

TEST_CASE("TelosB theta=0 model matches the frozen fixture bit for bit") {
  BuildReport rep;
  const auto m = build_reward_model(GeoScenario::Symmetric(0.0), 0.0, nullptr, &rep);
  const auto fx = testsupport::read_hex_doubles(FIXTURE_DIR "/telosb_theta0_rewards.txt");
  REQUIRE(fx.size() >= 1);
  CHECK(m.size() == static_cast<int>(fx[0]));
  const auto values = m.finite_rewards();
  REQUIRE(values.size() + 1 == fx.size());
  int mismatches = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (std::memcmp(&values[k], &fx[k + 1], sizeof(double)) != 0) ++mismatches;
  CHECK(mismatches == 0);
  CHECK(rep.dropped_near_forwarder >= 1);
  CHECK(rep.locations == m.num_locations());
  m.validate();
}

TEST_CASE("model invariants hold for geometric builds") {
  for (double theta : {0.0, 5.0, 10.0, 30.0}) {
    const auto m = build_reward_model(GeoScenario::Symmetric(theta));
    CHECK_NOTHROW(m.validate(1e-12));
    CHECK(m.independence_error() <= 1e-12);
    long double total = 0;
    for (const auto& c : m.joint()) total += c.p;
    CHECK(std::abs(static_cast<double>(total) - 1.0) <= 1e-12);
    for (int i = 2; i < m.size(); ++i) CHECK(m.reward(i).value() > m.reward(i - 1).value());
    for (const auto& p : m.location_points()) {
      CHECK(distance(p, GeoScenario::Symmetric(theta).forwarder_1) >= 5.0);
      CHECK(distance(p, GeoScenario::Symmetric(theta).forwarder_2) >= 5.0);
    }
  }
}

TEST_CASE("theta=0 symmetry") {
  const auto m = build_reward_model(GeoScenario::Symmetric(0.0));
  const auto& p1 = m.marginal(Forwarder::kFirst);
  const auto& p2 = m.marginal(Forwarder::kSecond);
  for (int i = 0; i < m.size(); ++i) CHECK(p1[i] == p2[i]);
  for (const auto& c : m.joint()) CHECK(m.joint_prob(c.j, c.i) == doctest::Approx(c.p).epsilon(1e-15));
}

TEST_CASE("a = 1 gives degenerate conditionals") {
  GeoScenario s = GeoScenario::Symmetric(10.0);
  s.radio.tradeoff_a = 1.0;
  const auto m = build_reward_model(s);
  for (int l = 0; l < m.num_locations(); ++l)
    for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond})
      CHECK(m.conditional(f, l).size() == 1);
}

TEST_CASE("merging") {
  const auto exact = build_reward_model(GeoScenario::Symmetric(0.0));
  const auto merged = build_reward_model(GeoScenario::Symmetric(0.0), 1.0);
  CHECK(merged.size() < exact.size());
  CHECK_NOTHROW(merged.validate(1e-12));
  for (int i = 2; i < merged.size(); ++i)
    CHECK(merged.reward(i).value() - merged.reward(i - 1).value() > 1.0);
  CHECK_THROWS(build_reward_model(GeoScenario::Symmetric(0.0), -1.0));
}

TEST_CASE("uniform location weights and a custom weight hook") {
  const auto m = build_reward_model(GeoScenario::Symmetric(0.0));
  for (int l = 1; l < m.num_locations(); ++l) CHECK(m.location_prob(l) == m.location_prob(0));
  const auto w = build_reward_model(GeoScenario::Symmetric(0.0), 0.0,
                                    [](const Point& p) { return 1.0 + p.x; });
  CHECK(w.location_prob(0) != w.location_prob(w.num_locations() - 1));
  CHECK_NOTHROW(w.validate(1e-12));
}

TEST_CASE("errors") {
  GeoScenario s = GeoScenario::Symmetric(0.0);
  s.radio.range_m = 5.5;  // only points within [5, 5.5] m, none on a 5 m grid with progress
  s.grid_spacing_m = 50;
  CHECK_THROWS(build_reward_model(s));
  GeoScenario bad = GeoScenario::Symmetric(0.0);
  bad.radio.gain_table = {{1e-3, 0.5}};
  CHECK_THROWS(bad.validate());
  bad.radio.gain_table = {};
  CHECK_THROWS(bad.validate());
  CHECK_THROWS(RewardModel({2.0, 1.0}, {1.0}, {{{1, 1.0}}}, {{{1, 1.0}}}));
}

TEST_CASE("swapped model exchanges the roles") {
  std::mt19937_64 rng(7);
  const auto m = testsupport::random_location_model(rng, 5, 3);
  const auto s = m.swapped();
  for (const auto& c : m.joint()) CHECK(s.joint_prob(c.j, c.i) == doctest::Approx(c.p));
  CHECK(s.marginal(Forwarder::kFirst) == m.marginal(Forwarder::kSecond));
}
