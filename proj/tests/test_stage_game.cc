#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "relaygame/stage_game.h"

using namespace relaygame;
using A = Action;

namespace {

const GameConfig kCfg{1.0, 1.0, 1.0, 0.5};
// zeta = (2, 2), alpha = (5, 5) with eta = 1.
const CostPair kC{-2.0, -2.0};
const CostPair kD{-5.0, -5.0};
const Thresholds kT = Thresholds::From(kC, kD, kCfg);

StageGame game_at(double ri, double rj) {
  return build_stage_game(Reward::Of(ri), Reward::Of(rj), kC, kD, kCfg);
}

bool same_pure(std::vector<std::array<A, 2>> a, std::vector<std::array<A, 2>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

TEST_CASE("thresholds") {
  CHECK(kT.zeta[0] == 2.0);
  CHECK(kT.alpha[1] == 5.0);
}

TEST_CASE("bimatrix entries") {
  const GameConfig cfg{1.0, 2.0, 3.0, 0.3};
  const CostPair c{-4, -5}, d{-7, -9};
  const auto g = build_stage_game(Reward::Of(1.5), Reward::Of(2.5), c, d, cfg);
  CHECK(g.at(Forwarder::kFirst, A::kContinue, A::kContinue) == -4);
  CHECK(g.at(Forwarder::kSecond, A::kContinue, A::kContinue) == -5);
  CHECK(g.at(Forwarder::kFirst, A::kContinue, A::kStop) == -7);
  CHECK(g.at(Forwarder::kSecond, A::kContinue, A::kStop) == -3.0 * 2.5);
  CHECK(g.at(Forwarder::kFirst, A::kStop, A::kContinue) == -2.0 * 1.5);
  CHECK(g.at(Forwarder::kSecond, A::kStop, A::kContinue) == -9);
  CHECK(g.at(Forwarder::kFirst, A::kStop, A::kStop) == 0.3 * (-3.0) + 0.7 * (-7));
  CHECK(g.at(Forwarder::kSecond, A::kStop, A::kStop) == 0.3 * (-9) + 0.7 * (-7.5));
}

TEST_CASE("contention formula at nu_1 = 1") {
  GameConfig cfg{1.0, 2.0, 3.0, 1.0};  // outside the valid range, formula only
  CHECK(contention_cost(Forwarder::kFirst, Reward::Of(4), -10, cfg) == -8.0);
  CHECK(contention_cost(Forwarder::kSecond, Reward::Of(4), -10, cfg) == -10.0);
}

TEST_CASE("symmetric inputs give a swap-symmetric bimatrix") {
  const auto g = game_at(3.3, 3.3);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(g.cost[0][a][b] == g.cost[1][b][a]);
}

TEST_CASE("INFEASIBLE forbids stopping") {
  const auto g = build_stage_game(Reward::Infeasible(), Reward::Of(3), kC, kD, kCfg);
  CHECK(g.stop_forbidden[0]);
  CHECK_FALSE(g.stop_forbidden[1]);
  const auto eq = stage_nash_oracle(g);
  for (const auto& p : eq.pieces) CHECK(p.hi[0] == 0.0);
  CHECK(nash_gap(g, 0.5, 0.0) > 1e300);
}

TEST_CASE("region classification") {
  CHECK(classify_region(Reward::Of(1), Reward::Of(1), kT) == Region::kR1);
  CHECK(classify_region(Reward::Of(6), Reward::Of(6), kT) == Region::kR5);
  CHECK(classify_region(Reward::Of(5), Reward::Of(5), kT) == Region::kR4);
  CHECK(classify_region(Reward::Of(2), Reward::Of(2), kT) == Region::kR4);
  CHECK(coarse_region(classify_region(Reward::Of(3), Reward::Of(1), kT)) == 2);
  CHECK(coarse_region(classify_region(Reward::Of(6), Reward::Of(1), kT)) == 2);
  CHECK(coarse_region(classify_region(Reward::Of(6), Reward::Of(3), kT)) == 2);
  CHECK(coarse_region(classify_region(Reward::Of(1), Reward::Of(3), kT)) == 3);
  CHECK(coarse_region(classify_region(Reward::Of(1), Reward::Of(6), kT)) == 3);
  CHECK(coarse_region(classify_region(Reward::Of(3), Reward::Of(6), kT)) == 3);
  CHECK(classify_region(Reward::Infeasible(), Reward::Infeasible(), kT) == Region::kR1);
  Thresholds bad = kT;
  bad.zeta[0] = 6;
  CHECK_THROWS(classify_region(Reward::Of(1), Reward::Of(1), bad));
}

TEST_CASE("mixed strategy boundary identities") {
  const double nu2 = kCfg.nu(Forwarder::kSecond);
  CHECK(indifference_prob(Reward::Of(kT.zeta[1]), kT.zeta[1], kT.alpha[1], nu2) == 0.0);
  CHECK(indifference_prob(Reward::Of(kT.alpha[1]), kT.zeta[1], kT.alpha[1], nu2) == 1.0);
  const auto g = mixed_strategy_probs(Reward::Of(3), Reward::Of(4), kC, kD, kCfg);
  CHECK(g[0] > 0);
  CHECK(g[0] < 1);
  CHECK(g[1] > 0);
  CHECK(g[1] < 1);
  // Gamma_1 from the cost form of the formula.
  const double e2 = 0.5 * kD[1] + 0.5 * (-4.0);
  CHECK(g[0] == doctest::Approx((-4.0 - kC[1]) / ((-4.0 - kC[1]) - (e2 - kD[1]))));
  CHECK_THROWS(indifference_prob(Reward::Of(3), 5, 5, 0.5));
  CHECK_THROWS(indifference_prob(Reward::Infeasible(), 2, 5, 0.5));
}

TEST_CASE("oracle on region-configured games") {
  auto eq = stage_nash_oracle(game_at(1, 1));
  CHECK(same_pure(eq.pure(), {{A::kContinue, A::kContinue}}));
  CHECK(eq.mixed().empty());

  eq = stage_nash_oracle(game_at(3, 4));
  CHECK(same_pure(eq.pure(), {{A::kStop, A::kContinue}, {A::kContinue, A::kStop}}));
  REQUIRE(eq.mixed().size() == 1);
  const auto m = mixed_strategy_probs(Reward::Of(3), Reward::Of(4), kT, kCfg);
  CHECK(eq.mixed()[0][0] == doctest::Approx(m[0]).epsilon(1e-12));
  CHECK(eq.mixed()[0][1] == doctest::Approx(m[1]).epsilon(1e-12));
  CHECK(nash_gap(game_at(3, 4), m[0], m[1]) <= 1e-12);

  eq = stage_nash_oracle(game_at(6, 7));
  CHECK(same_pure(eq.pure(), {{A::kStop, A::kStop}}));
}

TEST_CASE("degenerate game reports a continuum") {
  StageGame g;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.cost[0][a][b] = 1.0;
  g.cost[1][0][0] = 0;
  g.cost[1][0][1] = 1;
  g.cost[1][1][0] = 0;
  g.cost[1][1][1] = 1;
  const auto eq = stage_nash_oracle(g);
  CHECK(eq.has_continuum());
  for (const auto& p : eq.pieces) {
    CHECK(p.hi[1] == 0.0);
  }
}

TEST_CASE("region prediction agrees with the oracle on random games") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 10), nu(0.01, 0.99), gap(0, 5);
  int checked_mixed = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const GameConfig cfg{1.0, 0.5 + u(rng), 0.5 + u(rng), nu(rng)};
    const CostPair d{-cfg.eta_1 * u(rng), -cfg.eta_2 * u(rng)};
    const CostPair c{d[0] + cfg.eta_1 * gap(rng), d[1] + cfg.eta_2 * gap(rng)};
    const Reward ri = Reward::Of(u(rng)), rj = Reward::Of(u(rng));
    const auto t = Thresholds::From(c, d, cfg);
    const auto pred = region_equilibria(ri, rj, t, cfg);
    const auto eq = stage_nash_oracle(build_stage_game(ri, rj, c, d, cfg));
    CHECK_FALSE(eq.has_continuum());
    CHECK(same_pure(pred.pure, eq.pure()));
    REQUIRE(pred.mixed.size() == eq.mixed().size());
    for (std::size_t k = 0; k < pred.mixed.size(); ++k) {
      CHECK(std::abs(pred.mixed[k][0] - eq.mixed()[k][0]) <= 1e-9);
      CHECK(std::abs(pred.mixed[k][1] - eq.mixed()[k][1]) <= 1e-9);
      ++checked_mixed;
    }
  }
  CHECK(checked_mixed > 100);
}
