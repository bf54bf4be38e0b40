#include "relaygame/netsim.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>
#include <tuple>

#include "relaygame/errors.h"

namespace relaygame {

void NetSimConfig::validate() const {
  radio.validate();
  if (!(area_m > 0)) throw std::invalid_argument("area_m must be positive");
  if (node_count <= 0) throw std::invalid_argument("node_count must be positive");
  if (!(duty_period_s > 0)) throw std::invalid_argument("duty_period_s must be positive");
  if (!(packet_rate_hz >= 0)) throw std::invalid_argument("packet_rate_hz must be >= 0");
  if (source_packet_count <= 0)
    throw std::invalid_argument("source_packet_count must be positive");
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  if (fallback_max_periods < 0)
    throw std::invalid_argument("fallback_max_periods must be >= 0");
  if (!(horizon_s > 0)) throw std::invalid_argument("horizon_s must be positive");
}

namespace {

std::seed_seq make_seq(std::uint64_t seed, std::uint32_t stream, double salt = 0.0) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &salt, sizeof bits);
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       stream, static_cast<std::uint32_t>(bits),
                       static_cast<std::uint32_t>(bits >> 32)};
}

// Counter-based uniform draw: the same (seed, a, b, c) always gives the same
// value, so runs that differ only in background traffic see identical gains
// at identical wake events.
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                     std::uint64_t c) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ a);
  h = splitmix(h ^ b);
  h = splitmix(h ^ c);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

Network build_network(const NetSimConfig& config) {
  config.validate();
  auto seq = make_seq(config.rng_seed, 0);
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> coord(0.0, config.area_m);
  std::uniform_real_distribution<double> phase(0.0, config.duty_period_s);

  Network net;
  const int total = config.node_count + 2;
  net.nodes.resize(total);
  net.nodes[Network::kSource].position = config.source_position;
  net.nodes[Network::kSink].position = config.sink_position;
  for (int i = 2; i < total; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    net.nodes[i].position = {x, y};
  }
  for (auto& n : net.nodes) n.phase_s = phase(rng);

  const auto& radio = config.radio;
  const Point sink = config.sink_position;
  for (int i = 0; i < total; ++i) {
    if (i == Network::kSink) continue;
    auto& node = net.nodes[i];
    for (int k = 0; k < total; ++k) {
      if (k == i) continue;
      const double dist = distance(node.position, net.nodes[k].position);
      if (dist > radio.range_m || dist < radio.reference_distance_m) continue;
      // Zero progress would let a packet circle forever.
      if (!(compute_progress(net.nodes[k].position, node.position, sink) > 0)) continue;
      node.neighbors.push_back(k);
    }
    std::sort(node.neighbors.begin(), node.neighbors.end(), [&](int a, int b) {
      return std::tie(net.nodes[a].phase_s, a) < std::tie(net.nodes[b].phase_s, b);
    });
    node.is_void = node.neighbors.empty();
  }
  return net;
}

LocalRewards local_rewards(int node, const Network& net, const NetSimConfig& config) {
  const auto& self = net.nodes.at(node);
  if (self.neighbors.empty())
    throw SolverError("node " + std::to_string(node) + " has no forwarding neighbors");
  const auto& radio = config.radio;
  const double share = 1.0 / static_cast<double>(self.neighbors.size());
  std::map<double, double> mass;
  double infeasible = 0;
  for (int k : self.neighbors) {
    const Point& pos = net.nodes[k].position;
    const double dist = distance(self.position, pos);
    const double z = compute_progress(pos, self.position, config.sink_position);
    for (const auto& g : radio.gain_table) {
      const Reward r = reward_value(z, required_power(dist, g.gain, radio), radio);
      if (r.feasible())
        mass[r.value()] += share * g.prob;
      else
        infeasible += share * g.prob;
    }
  }
  LocalRewards out;
  out.rewards.push_back(Reward::Infeasible());
  out.pmf.push_back(infeasible);
  for (const auto& [v, p] : mass) {
    out.rewards.push_back(Reward::Of(v));
    out.pmf.push_back(p);
  }
  return out;
}

double node_tau_ms(int node, const Network& net, const NetSimConfig& config) {
  const auto n = static_cast<double>(net.nodes.at(node).neighbors.size());
  if (n == 0) throw SolverError("node " + std::to_string(node) + " has no forwarding neighbors");
  return config.literal_inter_wake ? 1000.0 / n : 1000.0 * config.duty_period_s / n;
}

double node_threshold(int node, const Network& net, const NetSimConfig& config) {
  const auto lr = local_rewards(node, net, config);
  return solve_threshold(lr.rewards, lr.pmf, node_tau_ms(node, net, config), config.eta)
      .alpha;
}

void compute_thresholds(Network& net, const NetSimConfig& config) {
  for (int i = 0; i < static_cast<int>(net.nodes.size()); ++i) {
    auto& node = net.nodes[i];
    node.threshold_ok = false;
    if (i == Network::kSink || node.is_void) continue;
    try {
      node.tau_ms = node_tau_ms(i, net, config);
      node.alpha = node_threshold(i, net, config);
      node.threshold_ok = true;
    } catch (const SolverError&) {
    }
  }
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  long double sum = 0;
  for (double x : xs) sum += x;
  s.mean = static_cast<double>(sum / xs.size());
  if (xs.size() > 1) {
    long double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(static_cast<double>(ss / (xs.size() - 1)) / xs.size());
  }
  return s;
}

namespace {

enum EventType { kWake = 0, kDeadline = 1, kBackground = 2 };

struct Event {
  double t;
  int type;
  int relay;
  int holder;
  long epoch;

  bool operator>(const Event& o) const {
    return std::tie(t, type, relay, holder) > std::tie(o.t, o.type, o.relay, o.holder);
  }
};

struct Packet {
  int source_id = -1;  // index into the source records, -1 for background
  double generated = 0;
  double power = 0;
  int hops = 0;
  int contentions = 0;
  double max_wait = 0;
};

struct Observation {
  int relay;
  double reward;
  double power;
};

struct HolderState {
  std::deque<int> queue;
  long epoch = 0;
  double hop_start = 0;
  double deadline = 0;
  int extensions = 0;
  bool saw_feasible = false;
  std::vector<Observation> seen;
  std::size_t wake_idx = 0;
  std::int64_t wake_cycle = 0;
};

class Simulator {
 public:
  Simulator(const Network& net, const NetSimConfig& config)
      : net_(net),
        cfg_(config),
        period_(config.duty_period_s),
        holders_(net.nodes.size()) {
    auto s1 = make_seq(config.rng_seed, 1);
    decide_rng_.seed(s1);
    auto s2 = make_seq(config.rng_seed, 2, config.packet_rate_hz);
    traffic_rng_.seed(s2);
    double acc = 0;
    for (const auto& g : config.radio.gain_table) gain_cdf_.push_back(acc += g.prob);
  }

  NetSimResult run() {
    result_.packets.resize(cfg_.source_packet_count);
    for (int k = 0; k < cfg_.source_packet_count; ++k) {
      result_.packets[k].packet_id = k;
      result_.packets[k].drop_reason = "horizon";
    }
    new_source_packet(0.0);
    if (cfg_.packet_rate_hz > 0 && net_.nodes.size() > 2)
      heap_.push({next_arrival(0.0), kBackground, -1, -1, 0});

    while (finished_ < cfg_.source_packet_count && !heap_.empty()) {
      const Event ev = heap_.top();
      if (ev.t > cfg_.horizon_s) {
        result_.partial = true;
        break;
      }
      heap_.pop();
      ++result_.events;
      now_ = ev.t;
      switch (ev.type) {
        case kWake: handle_wake(ev); break;
        case kDeadline: handle_deadline(ev); break;
        default: handle_background(ev); break;
      }
    }
    if (finished_ < cfg_.source_packet_count) result_.partial = true;
    result_.end_time_s = now_;

    std::vector<double> delays, powers;
    for (const auto& r : result_.packets)
      if (r.delivered) {
        delays.push_back(r.delay_s);
        powers.push_back(r.power_mw);
      }
    result_.delay = summarize(delays);
    result_.power = summarize(powers);
    return result_;
  }

 private:
  bool busy(int v) const { return v != Network::kSink && !holders_[v].queue.empty(); }

  double wake_time(int v, std::int64_t cycle) const {
    return net_.nodes[v].phase_s + static_cast<double>(cycle) * period_;
  }

  double next_arrival(double t) {
    std::exponential_distribution<double> gap(cfg_.packet_rate_hz);
    return t + gap(traffic_rng_);
  }

  void new_source_packet(double t) {
    Packet p;
    p.source_id = next_source_++;
    p.generated = t;
    packets_.push_back(p);
    receive(Network::kSource, static_cast<int>(packets_.size()) - 1, t);
  }

  void handle_background(const Event& ev) {
    std::uniform_int_distribution<int> pick(2, static_cast<int>(net_.nodes.size()) - 1);
    const int node = pick(traffic_rng_);
    Packet p;
    p.generated = ev.t;
    packets_.push_back(p);
    ++result_.background_generated;
    receive(node, static_cast<int>(packets_.size()) - 1, ev.t);
    heap_.push({next_arrival(ev.t), kBackground, -1, -1, 0});
  }

  // Packet arrives at node v at time t.
  void receive(int v, int pkt, double t) {
    if (v == Network::kSink) {
      finish(pkt, t, "");
      return;
    }
    auto& h = holders_[v];
    h.queue.push_back(pkt);
    if (h.queue.size() == 1) start_hop(v, t);
  }

  void start_hop(int v, double t) {
    auto& h = holders_[v];
    while (!h.queue.empty()) {
      const auto& node = net_.nodes[v];
      if (node.is_void) {
        drop_head(v, t, "void");
        continue;
      }
      if (!node.threshold_ok) {
        drop_head(v, t, "no_threshold");
        continue;
      }
      break;
    }
    if (h.queue.empty()) return;
    ++h.epoch;
    h.hop_start = t;
    h.deadline = t + period_;
    h.extensions = 0;
    h.saw_feasible = false;
    h.seen.clear();
    heap_.push({h.deadline, kDeadline, -1, v, h.epoch});

    const auto& nb = net_.nodes[v].neighbors;
    std::int64_t cycle = static_cast<std::int64_t>(std::floor(t / period_));
    std::size_t idx = 0;
    while (idx < nb.size() && !(wake_time(nb[idx], cycle) > t)) ++idx;
    if (idx == nb.size()) {
      idx = 0;
      ++cycle;
    }
    h.wake_idx = idx;
    h.wake_cycle = cycle;
    schedule_wake(v);
  }

  void schedule_wake(int v) {
    auto& h = holders_[v];
    const int relay = net_.nodes[v].neighbors[h.wake_idx];
    heap_.push({wake_time(relay, h.wake_cycle), kWake, relay, v, h.epoch});
  }

  void advance_wake(int v) {
    auto& h = holders_[v];
    if (++h.wake_idx == net_.nodes[v].neighbors.size()) {
      h.wake_idx = 0;
      ++h.wake_cycle;
    }
    schedule_wake(v);
  }

  std::size_t pick_gain(int holder, int relay) const {
    const double u = keyed_uniform(cfg_.rng_seed, static_cast<std::uint64_t>(holder),
                                   static_cast<std::uint64_t>(relay),
                                   static_cast<std::uint64_t>(holders_[holder].wake_cycle));
    const double x = u * gain_cdf_.back();
    std::size_t k = 0;
    while (k + 1 < gain_cdf_.size() && x >= gain_cdf_[k]) ++k;
    return k;
  }

  void drop_head(int v, double t, const std::string& reason) {
    auto& h = holders_[v];
    const int pkt = h.queue.front();
    h.queue.pop_front();
    ++h.epoch;
    finish(pkt, t, reason);
  }

  void finish(int pkt, double t, const std::string& reason) {
    const Packet& p = packets_[pkt];
    if (p.source_id < 0) return;
    auto& rec = result_.packets[p.source_id];
    rec.delivered = reason.empty();
    rec.drop_reason = reason;
    rec.delay_s = t - p.generated;
    rec.power_mw = p.power;
    rec.hops = p.hops;
    rec.contentions = p.contentions;
    rec.max_hop_wait_s = p.max_wait;
    ++finished_;
    if (next_source_ < cfg_.source_packet_count) new_source_packet(t);
  }

  void transmit(int v, int relay, double power, double t) {
    auto& h = holders_[v];
    const int pkt = h.queue.front();
    h.queue.pop_front();
    ++h.epoch;
    Packet& p = packets_[pkt];
    p.power += power;
    ++p.hops;
    p.max_wait = std::max(p.max_wait, t - h.hop_start);
    receive(relay, pkt, t);
    if (!h.queue.empty()) start_hop(v, t);
  }

  void handle_wake(const Event& first) {
    std::vector<int> group;
    auto take = [&](const Event& e) {
      if (e.epoch == holders_[e.holder].epoch && !holders_[e.holder].queue.empty())
        group.push_back(e.holder);
    };
    take(first);
    while (!heap_.empty() && heap_.top().type == kWake && heap_.top().t == first.t &&
           heap_.top().relay == first.relay) {
      take(heap_.top());
      heap_.pop();
      ++result_.events;
    }
    const int v = first.relay;
    std::vector<Observation> stoppers;
    std::vector<int> stop_holders;
    if (!busy(v)) {
      const auto& radio = cfg_.radio;
      for (int h : group) {
        const auto& self = net_.nodes[h];
        const double dist = distance(self.position, net_.nodes[v].position);
        const double gain = radio.gain_table[pick_gain(h, v)].gain;
        const auto power = required_power(dist, gain, radio);
        const double z = compute_progress(net_.nodes[v].position, self.position,
                                          cfg_.sink_position);
        const Reward r = reward_value(z, power, radio);
        if (!r.feasible()) continue;
        auto& hs = holders_[h];
        hs.saw_feasible = true;
        hs.seen.push_back({v, r.value(), *power});
        if (r.value() >= self.alpha) {
          stoppers.push_back(hs.seen.back());
          stop_holders.push_back(h);
        }
      }
    }
    int winner = -1;
    if (stop_holders.size() == 1) {
      winner = 0;
    } else if (stop_holders.size() > 1) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(stop_holders.size()) - 1);
      winner = pick(decide_rng_);
      ++result_.contention_events;
      for (int h : stop_holders) ++packets_[holders_[h].queue.front()].contentions;
    }
    std::vector<int> moved;
    if (winner >= 0) {
      const int h = stop_holders[winner];
      transmit(h, v, stoppers[winner].power, first.t);
      moved.push_back(h);
    }
    for (int h : group) {
      if (std::find(moved.begin(), moved.end(), h) != moved.end()) continue;
      advance_wake(h);
    }
  }

  void handle_deadline(const Event& ev) {
    const int v = ev.holder;
    auto& h = holders_[v];
    if (ev.epoch != h.epoch || h.queue.empty()) return;
    const Observation* best = nullptr;
    for (const auto& o : h.seen)
      if (!busy(o.relay) && (!best || o.reward > best->reward)) best = &o;
    if (best) {
      const Observation pick = *best;
      transmit(v, pick.relay, pick.power, ev.t);
      return;
    }
    if (++h.extensions > cfg_.fallback_max_periods) {
      drop_head(v, ev.t, h.saw_feasible ? "relays_busy" : "no_feasible_relay");
      if (!h.queue.empty()) start_hop(v, ev.t);
      return;
    }
    h.deadline += period_;
    heap_.push({h.deadline, kDeadline, -1, v, h.epoch});
  }

  const Network& net_;
  const NetSimConfig& cfg_;
  double period_;
  std::vector<HolderState> holders_;
  std::vector<Packet> packets_;
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap_;
  std::mt19937_64 decide_rng_;
  std::mt19937_64 traffic_rng_;
  std::vector<double> gain_cdf_;
  NetSimResult result_;
  int next_source_ = 0;
  int finished_ = 0;
  double now_ = 0;
};

}  // namespace

NetSimResult simulate(const Network& net, const NetSimConfig& config) {
  config.validate();
  if (static_cast<int>(net.nodes.size()) != config.node_count + 2)
    throw std::invalid_argument("network does not match node_count");
  bool any = false;
  for (const auto& n : net.nodes) any = any || n.threshold_ok;
  if (!any) throw std::invalid_argument("thresholds have not been computed");
  Simulator sim(net, config);
  return sim.run();
}

}  // namespace relaygame
