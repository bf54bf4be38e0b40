#include "relaygame/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "relaygame/errors.h"

namespace relaygame {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (w <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < n;) fn(k);
    });
  for (auto& th : pool) th.join();
}

bool OnehopResult::all_converged() const {
  for (const auto& r : rows)
    if (!r.converged) return false;
  for (const auto& f : frontier)
    if (!f.converged) return false;
  return true;
}

std::vector<OnehopRow> onehop_points(const RewardModel& model, const GameConfig& game,
                                     const CoSolverOptions& opts, double theta,
                                     int workers) {
  std::vector<OnehopRow> rows(6);
  parallel_for(rows.size(), workers, [&](std::size_t k) {
    OnehopRow& row = rows[k];
    row.theta = theta;
    try {
      if (k < 3) {
        const Family f = static_cast<Family>(k);
        row.point = family_symbol(f);
        const auto s = solve_nepp(model, game, f, opts);
        row.cost = s.cost;
        row.iterations = s.iterations;
      } else if (k < 5) {
        const Variant v = k == 3 ? Variant::kNabla : Variant::kDelta;
        row.point = v == Variant::kNabla ? "nabla" : "delta";
        const auto s = solve_po_nepp(model, game, v, opts);
        row.cost = s.cost;
        row.iterations = s.iterations;
      } else {
        row.point = "cross";
        std::array<double, 2> alpha{};
        for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond})
          alpha[index_of(f)] = solve_threshold(model, game, f, opts.single).alpha;
        row.cost = evaluate_policy_pair(simple_policy(model, alpha), model, game).cost;
      }
      row.converged = true;
    } catch (const std::exception& e) {
      row.converged = false;
      row.error = e.what();
      row.cost = {std::nan(""), std::nan("")};
    }
  });
  return rows;
}

OnehopResult run_onehop_sweep(const Json& config, bool with_frontier) {
  const auto thetas = config.at("sweep").at("thetas").get<std::vector<double>>();
  if (thetas.empty()) throw ConfigError("sweep.thetas is empty");
  const auto gammas = config.at("sweep").at("gammas").get<std::vector<double>>();
  for (double g : gammas)
    if (!(g > 0 && g < 1)) throw ConfigError("sweep.gammas must lie strictly inside (0, 1)");
  const int workers = config.at("sweep").at("workers");
  const GameConfig game = game_from(config);
  const auto opts = co_options_from(config);
  const auto coop = coop_options_from(config);
  const double merge = config.at("scenario").at("merge_tolerance");

  OnehopResult out;
  for (double theta : thetas) {
    const auto model = build_reward_model(scenario_from(config, theta), merge);
    auto rows = onehop_points(model, game, opts, theta, workers);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    if (!with_frontier) continue;
    std::vector<double> gs = gammas;
    std::sort(gs.begin(), gs.end());
    std::vector<FrontierRow> fr(gs.size());
    parallel_for(gs.size(), workers, [&](std::size_t k) {
      fr[k].theta = theta;
      fr[k].gamma = gs[k];
      try {
        const auto s = coop_value_iteration(model, game, gs[k], coop);
        fr[k].cost = s.cost;
        fr[k].iterations = s.iterations;
        fr[k].converged = true;
      } catch (const std::exception&) {
        fr[k].cost = {std::nan(""), std::nan("")};
      }
    });
    out.frontier.insert(out.frontier.end(), fr.begin(), fr.end());
  }
  return out;
}

double simple_gap(const std::vector<OnehopRow>& rows, double theta) {
  const OnehopRow* cross = nullptr;
  for (const auto& r : rows)
    if (r.theta == theta && r.point == "cross" && r.converged) cross = &r;
  if (!cross) throw std::invalid_argument("no simple-policy point at this theta");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    if (r.theta != theta || r.point == "cross" || !r.converged) continue;
    best = std::min(best, std::hypot(r.cost[0] - cross->cost[0], r.cost[1] - cross->cost[1]));
  }
  return best;
}

Csv onehop_csv(const std::vector<OnehopRow>& rows) {
  Csv csv({"theta", "point", "C1", "C2", "converged", "iterations"});
  for (const auto& r : rows)
    csv.row({format_number(r.theta), r.point, format_number(r.cost[0]), format_number(r.cost[1]),
             r.converged ? "1" : "0", std::to_string(r.iterations)});
  return csv;
}

Csv frontier_csv(const std::vector<FrontierRow>& rows) {
  Csv csv({"theta", "gamma", "C1", "C2", "converged", "iterations"});
  for (const auto& r : rows)
    csv.row({format_number(r.theta), format_number(r.gamma), format_number(r.cost[0]),
             format_number(r.cost[1]), r.converged ? "1" : "0", std::to_string(r.iterations)});
  return csv;
}

std::vector<NetsimCell> run_netsim_grid(const Json& config, const std::vector<double>& etas) {
  const Json& n = config.at("netsim");
  const auto lambdas = n.at("lambdas").get<std::vector<double>>();
  const auto seeds = n.at("seeds").get<std::vector<std::uint64_t>>();
  if (lambdas.empty()) throw ConfigError("netsim.lambdas is empty");
  if (seeds.empty()) throw ConfigError("netsim.seeds is empty");
  if (etas.empty()) throw ConfigError("no eta value to simulate");
  // Surface configuration problems before any worker starts.
  for (double eta : etas)
    for (double lam : lambdas) netsim_from(config, lam, seeds.front(), eta);

  std::vector<NetsimCell> cells;
  for (double eta : etas)
    for (double lam : lambdas)
      for (auto seed : seeds) cells.push_back({eta, lam, seed, {}, ""});
  const int workers = n.at("workers");
  parallel_for(cells.size(), workers, [&](std::size_t k) {
    auto& cell = cells[k];
    try {
      const auto cfg = netsim_from(config, cell.lambda, cell.seed, cell.eta);
      auto net = build_network(cfg);
      compute_thresholds(net, cfg);
      cell.result = simulate(net, cfg);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

std::vector<NetsimAggregate> aggregate_netsim(const std::vector<NetsimCell>& cells) {
  std::vector<NetsimAggregate> out;
  std::map<std::pair<double, double>, std::size_t> slot;
  std::vector<std::vector<double>> delays, powers;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.eta, c.lambda);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, out.size()).first;
      out.push_back({c.eta, c.lambda, {}, {}, 0, 0, 0, false});
      delays.emplace_back();
      powers.emplace_back();
    }
    auto& a = out[it->second];
    if (!c.error.empty()) {
      ++a.failed_runs;
      continue;
    }
    a.partial = a.partial || c.result.partial;
    for (const auto& p : c.result.packets) {
      if (p.delivered) {
        ++a.delivered;
        delays[it->second].push_back(p.delay_s);
        powers[it->second].push_back(p.power_mw);
      } else {
        ++a.dropped;
      }
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].delay = summarize(delays[k]);
    out[k].power = summarize(powers[k]);
  }
  return out;
}

Csv netsim_packets_csv(const std::vector<NetsimCell>& cells) {
  Csv csv({"lambda", "seed", "packet_id", "delay_s", "power_mw", "hops", "contentions"});
  for (const auto& c : cells)
    for (const auto& p : c.result.packets)
      if (p.delivered)
        csv.row({format_number(c.lambda), std::to_string(c.seed), std::to_string(p.packet_id),
                 format_number(p.delay_s), format_number(p.power_mw), std::to_string(p.hops),
                 std::to_string(p.contentions)});
  return csv;
}

Csv netsim_drops_csv(const std::vector<NetsimCell>& cells) {
  Csv csv({"lambda", "seed", "packet_id", "reason"});
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      csv.row({format_number(c.lambda), std::to_string(c.seed), "-1", "run_failed"});
      continue;
    }
    for (const auto& p : c.result.packets)
      if (!p.delivered)
        csv.row({format_number(c.lambda), std::to_string(c.seed), std::to_string(p.packet_id),
                 p.drop_reason});
  }
  return csv;
}

Csv netsim_aggregate_csv(const std::vector<NetsimAggregate>& agg) {
  Csv csv({"lambda", "mean_delay", "se_delay", "mean_power", "se_power"});
  for (const auto& a : agg)
    csv.row({format_number(a.lambda), format_number(a.delay.mean), format_number(a.delay.se),
             format_number(a.power.mean), format_number(a.power.se)});
  return csv;
}

}  // namespace relaygame
