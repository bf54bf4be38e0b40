#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "relaygame/coop_solver.h"
#include "relaygame/errors.h"
#include "support.h"

using namespace relaygame;

namespace {

double weighted(const CostPair& c, double g) { return g * c[0] + (1 - g) * c[1]; }

}  // namespace

TEST_CASE("gamma must be inside (0, 1)") {
  const auto m = RewardModel::FromJoint({1.0}, {{1, 1, 1.0}});
  CHECK_THROWS(coop_value_iteration(m, GameConfig{}, 0.0));
  CHECK_THROWS(coop_value_iteration(m, GameConfig{}, 1.0));
  CHECK_THROWS(pareto_sweep(m, GameConfig{}, {}));
  CHECK(pareto_sweep(m, GameConfig{}, {0.3}).size() == 1);
  const auto dead = RewardModel::FromJoint({1.0}, {{0, 0, 1.0}});
  CHECK_THROWS_AS(coop_value_iteration(dead, GameConfig{}, 0.5), SolverError);
}

TEST_CASE("weighted cost agrees with the extracted policy") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = testsupport::random_location_model(rng, 2 + static_cast<int>(rng() % 6), 3);
    const auto cfg = testsupport::random_config(rng);
    for (double g : {0.1, 0.5, 0.9}) {
      const auto s = coop_value_iteration(m, cfg, g);
      CHECK(s.residual <= 1e-8 * std::max(1.0, std::abs(s.x)));
      CHECK(std::abs(weighted(s.cost, g) - s.weighted_cost) <=
            1e-8 * std::max(1.0, std::abs(s.weighted_cost)));
    }
  }
}

TEST_CASE("lone stopping sets do not depend on gamma") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testsupport::random_location_model(rng, 6, 3);
    const auto cfg = testsupport::random_config(rng);
    const auto a = coop_value_iteration(m, cfg, 0.2);
    const auto b = coop_value_iteration(m, cfg, 0.8);
    for (int i = 0; i < m.size(); ++i)
      for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond})
        CHECK(a.lone_stops(f, i) == b.lone_stops(f, i));
  }
}

TEST_CASE("both stopping is never strictly better") {
  std::mt19937_64 rng(57);
  const auto m = testsupport::random_location_model(rng, 6, 4);
  const auto s = coop_value_iteration(m, testsupport::random_config(rng), 0.4);
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) {
      const auto c = s.state_costs(i, j);
      if (c.ss) CHECK(*c.ss >= std::min(*c.sc, *c.cs));
      CHECK(s.value(i, j) <= c.cc);
    }
}

TEST_CASE("weighted optimality against every deterministic policy") {
  // Three indices (0 = INFEASIBLE): each joint cell picks sc, cs or cc where
  // allowed, and each forwarder picks a lone stopping set.
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 6; ++trial) {
    const auto m = testsupport::random_joint_model(rng, 3);
    const auto cfg = testsupport::random_config(rng);
    const double g = 0.2 + 0.6 * (trial / 5.0);
    const auto s = coop_value_iteration(m, cfg, g);
    std::vector<std::array<int, 2>> cells;
    std::vector<std::vector<std::array<double, 2>>> options;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        std::vector<std::array<double, 2>> o{{0, 0}};
        if (i > 0) o.push_back({1, 0});
        if (j > 0) o.push_back({0, 1});
        cells.push_back({i, j});
        options.push_back(o);
      }
    double best = INFINITY;
    std::vector<int> pick(cells.size(), 0);
    for (;;) {
      for (int lone = 0; lone < 16; ++lone) {
        PolicyPairCO p;
        p.lone = {std::vector<double>{0, double(lone & 1), double((lone >> 1) & 1)},
                  std::vector<double>{0, double((lone >> 2) & 1), double((lone >> 3) & 1)}};
        std::array<std::array<std::array<double, 2>, 3>, 3> table{};
        for (std::size_t c = 0; c < cells.size(); ++c)
          table[cells[c][0]][cells[c][1]] = options[c][pick[c]];
        p.joint = [table](int i, int j) { return table[i][j]; };
        try {
          best = std::min(best, weighted(evaluate_policy_pair(p, m, cfg).cost, g));
        } catch (const SolverError&) {
        }
      }
      std::size_t c = 0;
      while (c < cells.size() && ++pick[c] == static_cast<int>(options[c].size())) pick[c++] = 0;
      if (c == cells.size()) break;
    }
    CHECK(std::abs(s.weighted_cost - best) <= 1e-9 * std::max(1.0, std::abs(best)));
  }
}

TEST_CASE("Pareto sweep: nondominated and monotone") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = testsupport::random_location_model(rng, 7, 4);
    const auto cfg = testsupport::random_config(rng);
    std::vector<double> gammas;
    for (int k = 1; k < 20; ++k) gammas.push_back(k / 20.0);
    const auto front = pareto_sweep(m, cfg, gammas);
    REQUIRE_FALSE(front.empty());
    const double eps = 1e-9 * std::max(1.0, std::abs(front[0].cost[0]));
    for (std::size_t a = 0; a < front.size(); ++a) {
      if (a > 0) {
        CHECK(front[a].cost[0] <= front[a - 1].cost[0] + eps);
        CHECK(front[a].cost[1] >= front[a - 1].cost[1] - eps);
      }
      for (std::size_t b = 0; b < front.size(); ++b) {
        if (a == b) continue;
        const bool dominates = front[b].cost[0] <= front[a].cost[0] - eps &&
                               front[b].cost[1] <= front[a].cost[1] - eps;
        CHECK_FALSE(dominates);
      }
    }
  }
}

TEST_CASE("swapping roles mirrors gamma") {
  std::mt19937_64 rng(67);
  const auto m = testsupport::random_location_model(rng, 6, 3);
  const auto cfg = testsupport::random_config(rng);
  const auto a = coop_value_iteration(m, cfg, 0.3);
  const auto b = coop_value_iteration(m.swapped(), cfg.swapped(), 0.7);
  CHECK(a.weighted_cost == doctest::Approx(b.weighted_cost).epsilon(1e-10));
}
