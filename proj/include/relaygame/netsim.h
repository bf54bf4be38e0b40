#ifndef RELAYGAME_NETSIM_H_
#define RELAYGAME_NETSIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "relaygame/reward_model.h"
#include "relaygame/single_agent.h"

namespace relaygame {

struct NetSimConfig {
  double area_m = 1000.0;
  int node_count = 1000;
  Point source_position{0.0, 1000.0};
  Point sink_position{1000.0, 0.0};
  double duty_period_s = 0.1;
  double packet_rate_hz = 0.0;
  int source_packet_count = 100;
  double eta = 100.0;
  RadioParams radio;
  std::uint64_t rng_seed = 1;
  // tau_i = T / N_i by default; when set, tau_i = 1 / N_i seconds.
  bool literal_inter_wake = false;
  // Extra periods a forwarder waits when nothing usable was observed.
  int fallback_max_periods = 10;
  double horizon_s = 1.0e5;

  void validate() const;
};

struct NetNode {
  Point position;
  double phase_s = 0.0;
  std::vector<int> neighbors;  // forwarding region, sorted by wake phase
  bool is_void = false;
  bool threshold_ok = false;
  double alpha = 0.0;
  double tau_ms = 0.0;
};

// Node 0 is the source, node 1 the sink, the rest are placed at random.
struct Network {
  std::vector<NetNode> nodes;
  static constexpr int kSource = 0;
  static constexpr int kSink = 1;
};

Network build_network(const NetSimConfig& config);

// Local reward distribution seen by `node`: one location per neighbor,
// equally likely, crossed with the gain table.
struct LocalRewards {
  std::vector<Reward> rewards;
  std::vector<double> pmf;
};
LocalRewards local_rewards(int node, const Network& net, const NetSimConfig& config);

double node_tau_ms(int node, const Network& net, const NetSimConfig& config);

// Single-agent threshold of `node`; throws if it has no neighbors or no
// feasible relay.
double node_threshold(int node, const Network& net, const NetSimConfig& config);

// Fills alpha/tau for every non-void node. Nodes whose threshold cannot be
// computed keep threshold_ok = false and drop what they receive.
void compute_thresholds(Network& net, const NetSimConfig& config);

struct PacketRecord {
  int packet_id = 0;
  bool delivered = false;
  std::string drop_reason;  // empty when delivered
  double delay_s = 0.0;
  double power_mw = 0.0;
  int hops = 0;
  int contentions = 0;
  double max_hop_wait_s = 0.0;
};

struct Summary {
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
};
Summary summarize(const std::vector<double>& xs);

struct NetSimResult {
  std::vector<PacketRecord> packets;  // source packets only
  bool partial = false;               // horizon reached
  long events = 0;
  long background_generated = 0;
  long contention_events = 0;         // over all packets
  double end_time_s = 0.0;
  Summary delay, power;               // delivered source packets
};

NetSimResult simulate(const Network& net, const NetSimConfig& config);

}  // namespace relaygame

#endif  // RELAYGAME_NETSIM_H_
