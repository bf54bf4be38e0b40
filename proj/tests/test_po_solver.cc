#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "relaygame/po_solver.h"
#include "support.h"

using namespace relaygame;

namespace {

double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Cost pair with D <= C-bar drawn around the single-agent costs.
CostPair random_c_bar(std::mt19937_64& rng, const CostPair& d, const GameConfig& cfg) {
  std::uniform_real_distribution<double> u(0, 3);
  return {d[0] + cfg.eta_1 * u(rng), d[1] + cfg.eta_2 * u(rng)};
}

CostPair single_agent_costs(const RewardModel& m, const GameConfig& cfg) {
  return {solve_threshold(m, cfg, Forwarder::kFirst).d_cost,
          solve_threshold(m, cfg, Forwarder::kSecond).d_cost};
}

// Every location sees one fixed reward pair.
RewardModel full_information_model(std::mt19937_64& rng, int n, int locs) {
  const auto finite = testsupport::random_rewards(rng, n - 1);
  const auto q = testsupport::random_pmf(rng, locs);
  std::vector<std::vector<SparseEntry>> c1, c2;
  for (int l = 0; l < locs; ++l) {
    c1.push_back({{1 + static_cast<int>(rng() % (n - 1)), 1.0}});
    c2.push_back({{1 + static_cast<int>(rng() % (n - 1)), 1.0}});
  }
  return RewardModel(finite, q, c1, c2);
}

}  // namespace

TEST_CASE("continuation probability") {
  const std::vector<SparseEntry> cond{{0, 0.1}, {1, 0.3}, {2, 0.6}};
  CHECK(continue_prob(2, cond) == doctest::Approx(0.4));
  CHECK(continue_prob(0, cond) == 0.0);
  CHECK(continue_prob(3, cond) == doctest::Approx(1.0));
}

TEST_CASE("stage costs at the extremes") {
  const GameConfig cfg{1.0, 2.0, 3.0, 0.25};
  auto s = stage_costs(Reward::Of(4), 1.0, -5, -9, cfg, Forwarder::kFirst);
  CHECK(*s.stop == -8.0);
  CHECK(s.cont == -5.0);
  s = stage_costs(Reward::Of(4), 0.0, -5, -9, cfg, Forwarder::kFirst);
  CHECK(*s.stop == doctest::Approx(0.25 * -8.0 + 0.75 * -9.0));
  CHECK(s.cont == -9.0);
  s = stage_costs(Reward::Of(4), 0.0, -5, -9, cfg, Forwarder::kSecond);
  CHECK(*s.stop == doctest::Approx(0.75 * -12.0 + 0.25 * -9.0));
  s = stage_costs(Reward::Infeasible(), 0.5, -5, -9, cfg, Forwarder::kFirst);
  CHECK_FALSE(s.stop.has_value());
  CHECK(s.cont == doctest::Approx(-7.0));
}

TEST_CASE("variant names") {
  CHECK(parse_variant("NABLA") == Variant::kNabla);
  CHECK(parse_variant("delta") == Variant::kDelta);
  CHECK_THROWS(parse_variant("x"));
}

TEST_CASE("threshold best responses and elimination against the exhaustive oracle") {
  std::mt19937_64 rng(31);
  int multi = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const int locs = 1 + static_cast<int>(rng() % 4);
    const auto m = testsupport::random_location_model(rng, n, locs);
    const auto cfg = testsupport::random_config(rng);
    const auto d = single_agent_costs(m, cfg);
    const PoContext ctx{m, cfg, random_c_bar(rng, d, cfg), d};
    for (int l = 0; l < locs; ++l) {
      CAPTURE(trial);
      CAPTURE(l);
      for (int t = 0; t <= n; ++t)
        for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond})
          CHECK(best_response_threshold(t, l, f, ctx) ==
                best_response_threshold_scan(t, l, f, ctx));
      for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond})
        for (int t = 1; t <= n; ++t)
          CHECK(best_response_threshold(t, l, f, ctx) <= best_response_threshold(t - 1, l, f, ctx));
      const auto oracle = exhaustive_ne_oracle(l, ctx);
      const auto e = inductive_elimination(l, ctx);
      REQUIRE_FALSE(oracle.empty());
      auto pairs = e.pairs;
      std::sort(pairs.begin(), pairs.end());
      CHECK(pairs == oracle);
      // Higher F1 thresholds pair with lower F2 thresholds.
      for (std::size_t k = 1; k < oracle.size(); ++k) {
        CHECK(oracle[k].first > oracle[k - 1].first);
        CHECK(oracle[k].second <= oracle[k - 1].second);
      }
      if (oracle.size() > 1) ++multi;
    }
  }
  CHECK(multi > 0);
}

TEST_CASE("solutions are mutual best responses at their fixed point") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto m = testsupport::random_location_model(rng, n, 1 + static_cast<int>(rng() % 4));
    const auto cfg = testsupport::random_config(rng);
    for (Variant v : {Variant::kNabla, Variant::kDelta}) {
      const auto sol = solve_po_nepp(m, cfg, v);
      CHECK(sol.residual <= 1e-6 * std::max(1.0, std::abs(sol.cost[0])));
      for (int k = 0; k < 2; ++k) CHECK(sol.d[k] <= sol.cost[k] + 1e-9);
      const PoContext ctx{m, cfg, sol.cost, sol.d};
      for (int l = 0; l < m.num_locations(); ++l) {
        const auto [phi, psi] = sol.thresholds[l];
        CHECK(best_response_threshold(psi, l, Forwarder::kFirst, ctx) == phi);
        CHECK(best_response_threshold(phi, l, Forwarder::kSecond, ctx) == psi);
      }
      const auto t = apply_T_bar(sol.cost, v, m, sol.d, cfg);
      CHECK(rel_gap(t[0], sol.cost[0]) <= 1e-6);
      CHECK(rel_gap(t[1], sol.cost[1]) <= 1e-6);
    }
  }
}

TEST_CASE("NABLA and DELTA mirror each other on symmetric models") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto base = testsupport::random_location_model(rng, 5, 3);
    std::vector<std::vector<SparseEntry>> c;
    for (int l = 0; l < base.num_locations(); ++l) c.push_back(base.conditional(Forwarder::kFirst, l));
    const RewardModel m(base.finite_rewards(), base.location_probs(), c, c);
    const GameConfig cfg{0.8, 1.5, 1.5, 0.5};
    const auto a = solve_po_nepp(m, cfg, Variant::kNabla);
    const auto b = solve_po_nepp(m, cfg, Variant::kDelta);
    CHECK(rel_gap(a.cost[0], b.cost[1]) <= 1e-8);
    CHECK(rel_gap(a.cost[1], b.cost[0]) <= 1e-8);
  }
}

TEST_CASE("full information: NABLA matches SC and DELTA matches CS") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = full_information_model(rng, 2 + static_cast<int>(rng() % 6),
                                          1 + static_cast<int>(rng() % 6));
    const auto cfg = testsupport::random_config(rng);
    const auto sc = solve_nepp(m, cfg, Family::kSC);
    const auto cs = solve_nepp(m, cfg, Family::kCS);
    const auto nabla = solve_po_nepp(m, cfg, Variant::kNabla);
    const auto delta = solve_po_nepp(m, cfg, Variant::kDelta);
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(nabla.cost[k] - sc.cost[k]) <= 1e-6);
      CHECK(std::abs(delta.cost[k] - cs.cost[k]) <= 1e-6);
    }
  }
}

TEST_CASE("dependent joint tables are refused") {
  const auto m = RewardModel::WithExplicitJoint(
      {1.0, 2.0}, {0.5, 0.5}, {{{1, 1.0}}, {{2, 1.0}}}, {{{1, 1.0}}, {{2, 1.0}}},
      {{1, 2, 0.5}, {2, 1, 0.5}});
  CHECK(m.independence_error() > 0.1);
  CHECK_THROWS_AS(solve_po_nepp(m, GameConfig{}, Variant::kNabla), std::invalid_argument);
}

TEST_CASE("partial observation never beats complete observation at theta=0") {
  const auto m = build_reward_model(GeoScenario::Symmetric(0.0));
  const GameConfig cfg;
  const auto co = solve_nepp(m, cfg, Family::kSC);
  const auto po = solve_po_nepp(m, cfg, Variant::kNabla);
  for (int k = 0; k < 2; ++k) CHECK(po.cost[k] >= co.cost[k] - 1e-6);
}
