#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "relaygame/netsim.h"

using namespace relaygame;

namespace {

NetSimConfig small_config(std::uint64_t seed, double lambda = 0.0) {
  NetSimConfig c;
  c.rng_seed = seed;
  c.packet_rate_hz = lambda;
  c.source_packet_count = 10;
  return c;
}

NetSimResult run(const NetSimConfig& c) {
  Network net = build_network(c);
  compute_thresholds(net, c);
  return simulate(net, c);
}

// Root of E[max(x, R)] - q - x by bisection.
double threshold_by_bisection(const std::vector<double>& r, const std::vector<double>& p,
                              double q) {
  auto f = [&](double x) {
    double s = 0;
    for (std::size_t k = 0; k < r.size(); ++k) s += p[k] * std::max(x, r[k]);
    return s - q - x;
  };
  double lo = -1e6, hi = 1e6;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("config validation") {
  NetSimConfig c;
  c.node_count = 0;
  CHECK_THROWS(c.validate());
  c = NetSimConfig{};
  c.duty_period_s = 0;
  CHECK_THROWS(c.validate());
  c = NetSimConfig{};
  c.packet_rate_hz = -1;
  CHECK_THROWS(c.validate());
  CHECK_NOTHROW(NetSimConfig{}.validate());
}

TEST_CASE("network structure") {
  const NetSimConfig c = small_config(3);
  const Network net = build_network(c);
  REQUIRE(net.nodes.size() == 1002);
  CHECK(net.nodes[Network::kSource].position.x == 0.0);
  CHECK(net.nodes[Network::kSink].neighbors.empty());
  for (const auto& n : net.nodes) {
    CHECK(n.phase_s >= 0.0);
    CHECK(n.phase_s < c.duty_period_s);
    for (std::size_t k = 0; k < n.neighbors.size(); ++k) {
      const auto& nb = net.nodes[n.neighbors[k]];
      const double d = distance(n.position, nb.position);
      CHECK(d <= c.radio.range_m);
      CHECK(d >= c.radio.reference_distance_m);
      CHECK(compute_progress(nb.position, n.position, c.sink_position) > 0);
      if (k > 0) CHECK(net.nodes[n.neighbors[k - 1]].phase_s <= nb.phase_s);
    }
  }
}

TEST_CASE("doubling the side length cuts neighbor counts about fourfold") {
  double dense = 0, sparse = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    NetSimConfig c = small_config(seed);
    for (const auto& n : build_network(c).nodes) dense += n.neighbors.size();
    c.area_m = 2000;
    c.sink_position = {2000, 0};
    c.source_position = {0, 2000};
    for (const auto& n : build_network(c).nodes) sparse += n.neighbors.size();
  }
  CHECK(dense / sparse > 3.3);
  CHECK(dense / sparse < 4.8);
}

TEST_CASE("one-neighbor threshold by hand") {
  NetSimConfig c;
  c.node_count = 1;
  Network net;
  net.nodes.resize(3);
  net.nodes[0].position = {0, 0};
  net.nodes[1].position = c.sink_position;
  net.nodes[2].position = {40, 0};
  net.nodes[0].neighbors = {2};
  std::vector<double> r, p;
  for (const auto& g : c.radio.gain_table) {
    const double power = 1e-9 / g.gain * std::pow(40.0 / 5.0, 2.5);
    r.push_back(std::sqrt(40.0 / power));
    p.push_back(g.prob);
  }
  CHECK(node_tau_ms(0, net, c) == doctest::Approx(100.0));
  CHECK(node_threshold(0, net, c) ==
        doctest::Approx(threshold_by_bisection(r, p, 100.0 / c.eta)).epsilon(1e-9));
  c.literal_inter_wake = true;
  CHECK(node_tau_ms(0, net, c) == doctest::Approx(1000.0));
  CHECK_THROWS(node_threshold(2, net, c));
}

TEST_CASE("thresholds are nondecreasing in eta") {
  NetSimConfig c = small_config(5);
  const Network net = build_network(c);
  int checked = 0;
  for (int v = 0; v < 60; ++v) {
    if (v == Network::kSink || net.nodes[v].is_void) continue;
    double last = -INFINITY;
    for (double eta : {1.0, 10.0, 100.0, 1000.0}) {
      c.eta = eta;
      const double a = node_threshold(v, net, c);
      CHECK(a >= last - 1e-12);
      last = a;
    }
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("reruns are identical") {
  for (double lambda : {0.0, 20.0}) {
    const auto a = run(small_config(7, lambda));
    const auto b = run(small_config(7, lambda));
    REQUIRE(a.packets.size() == b.packets.size());
    CHECK(a.events == b.events);
    for (std::size_t k = 0; k < a.packets.size(); ++k) {
      CHECK(a.packets[k].delay_s == b.packets[k].delay_s);
      CHECK(a.packets[k].power_mw == b.packets[k].power_mw);
      CHECK(a.packets[k].drop_reason == b.packets[k].drop_reason);
    }
  }
}

TEST_CASE("no background traffic: no contention and one period per hop at most") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const NetSimConfig c = small_config(seed);
    const auto res = run(c);
    CHECK(res.contention_events == 0);
    CHECK(res.background_generated == 0);
    CHECK_FALSE(res.partial);
    for (const auto& p : res.packets) {
      if (!p.delivered) continue;
      CHECK(p.hops >= 1);
      CHECK(p.contentions == 0);
      CHECK(p.max_hop_wait_s <= c.duty_period_s + 1e-12);
      CHECK(p.power_mw <= p.hops * c.radio.max_power_mw);
      CHECK(p.delay_s <= p.hops * c.duty_period_s + 1e-9);
    }
  }
}

TEST_CASE("background traffic produces contention") {
  const auto res = run(small_config(2, 40.0));
  CHECK(res.background_generated > 0);
  CHECK(res.contention_events > 0);
}

TEST_CASE("a void source drops everything") {
  const NetSimConfig c = small_config(4);
  Network net = build_network(c);
  net.nodes[Network::kSource].neighbors.clear();
  net.nodes[Network::kSource].is_void = true;
  compute_thresholds(net, c);
  const auto res = simulate(net, c);
  for (const auto& p : res.packets) {
    CHECK_FALSE(p.delivered);
    CHECK(p.drop_reason == "void");
  }
  CHECK(res.delay.count == 0);
}

TEST_CASE("simulate needs thresholds") {
  const NetSimConfig c = small_config(4);
  const Network net = build_network(c);
  CHECK_THROWS(simulate(net, c));
}

TEST_CASE("a lower eta shortens the mean per-hop delay") {
  // Pooled over 30 seeds; the threshold falls with eta, so holders stop
  // earlier.
  double per_hop[2] = {0, 0};
  int count[2] = {0, 0};
  const double etas[2] = {1000.0, 10.0};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    NetSimConfig c = small_config(seed);
    c.source_packet_count = 3;
    const Network base = build_network(c);
    for (int k = 0; k < 2; ++k) {
      c.eta = etas[k];
      Network net = base;
      compute_thresholds(net, c);
      for (const auto& p : simulate(net, c).packets)
        if (p.delivered) {
          per_hop[k] += p.delay_s / p.hops;
          ++count[k];
        }
    }
  }
  REQUIRE(count[0] > 30);
  REQUIRE(count[1] > 30);
  CHECK(per_hop[1] / count[1] < per_hop[0] / count[0]);
}

TEST_CASE("summaries") {
  const auto s = summarize({1.0, 2.0, 3.0});
  CHECK(s.mean == 2.0);
  CHECK(s.se == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(summarize({}).count == 0);
}
