// Command-line front end: one subcommand per experiment, all outputs under
// --out, plus a manifest echoing the resolved configuration.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relaygame/co_solver.h"
#include "relaygame/config.h"
#include "relaygame/coop_solver.h"
#include "relaygame/errors.h"
#include "relaygame/experiments.h"
#include "relaygame/io.h"
#include "relaygame/po_solver.h"

using namespace relaygame;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
};

struct Run {
  std::string command;
  Json config;
  std::filesystem::path out;
  Json outputs = Json::array();
  Json notes = Json::array();
  bool partial = false;

  void write(const std::string& name, const std::string& text) {
    write_file_atomic((out / name).string(), text);
    outputs.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
  void note(const std::string& s) {
    notes.push_back(s);
    std::cerr << s << "\n";
  }
  int finish() {
    Json m;
    m["command"] = command;
    m["status"] = partial ? "partial" : "ok";
    m["config"] = config;
    m["outputs"] = outputs;
    m["notes"] = notes;
    write_file_atomic((out / "manifest.json").string(), m.dump(2) + "\n");
    return partial ? kExitPartial : kExitOk;
  }
};

Run prepare(const std::string& command, const Common& c) {
  std::vector<std::string> ov = c.overrides;
  if (c.theta) ov.push_back("scenario.theta_m=" + format_number(*c.theta));
  if (c.seed) ov.push_back("netsim.seeds=[" + std::to_string(*c.seed) + "]");
  Run r;
  r.command = command;
  r.config = resolve_config(c.config_path, ov);
  r.out = c.out;
  return r;
}

std::vector<Family> families_of(const Json& config) {
  const std::string f = config.at("run").at("family");
  if (f == "all") return {Family::kSC, Family::kCS, Family::kMixed};
  try {
    return {parse_family(f)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("run.family: ") + e.what());
  }
}

std::vector<Variant> variants_of(const Json& config) {
  const std::string v = config.at("run").at("variant");
  if (v == "all") return {Variant::kNabla, Variant::kDelta};
  try {
    return {parse_variant(v)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("run.variant: ") + e.what());
  }
}

double theta_of(const Json& config) { return config.at("scenario").at("theta_m"); }

RewardModel model_of(Run& r) {
  const auto model = build_reward_model(scenario_from(r.config, theta_of(r.config)),
                                        r.config.at("scenario").at("merge_tolerance"));
  r.write_json("model.json", model_to_json(model));
  return model;
}

int cmd_solve_co(Run& r) {
  const auto model = model_of(r);
  const auto game = game_from(r.config);
  const auto opts = co_options_from(r.config);
  Csv csv({"theta", "family", "C1", "C2", "converged", "iterations"});
  for (Family f : families_of(r.config)) {
    try {
      const auto s = solve_nepp(model, game, f, opts);
      r.write_json("co_" + family_name(f) + ".json", co_solution_to_json(s, model));
      csv.row({format_number(theta_of(r.config)), family_name(f), format_number(s.cost[0]),
               format_number(s.cost[1]), "1", std::to_string(s.iterations)});
    } catch (const ConvergenceError& e) {
      r.partial = true;
      r.note(family_name(f) + ": " + e.what());
      csv.row({format_number(theta_of(r.config)), family_name(f), "nan", "nan", "0", "0"});
    }
  }
  r.write("co_costs.csv", csv.text());
  return r.finish();
}

int cmd_solve_po(Run& r) {
  const auto model = model_of(r);
  const auto game = game_from(r.config);
  const auto opts = co_options_from(r.config);
  Csv csv({"theta", "variant", "C1", "C2", "converged", "iterations"});
  for (Variant v : variants_of(r.config)) {
    try {
      const auto s = solve_po_nepp(model, game, v, opts);
      r.write_json("po_" + variant_name(v) + ".json", po_solution_to_json(s, model, game));
      Csv th({"location", "phi", "psi"});
      for (std::size_t l = 0; l < s.thresholds.size(); ++l)
        th.row({std::to_string(l), std::to_string(s.thresholds[l].first),
                std::to_string(s.thresholds[l].second)});
      r.write("po_thresholds_" + variant_name(v) + ".csv", th.text());
      csv.row({format_number(theta_of(r.config)), variant_name(v), format_number(s.cost[0]),
               format_number(s.cost[1]), "1", std::to_string(s.iterations)});
    } catch (const ConvergenceError& e) {
      r.partial = true;
      r.note(variant_name(v) + ": " + e.what());
      csv.row({format_number(theta_of(r.config)), variant_name(v), "nan", "nan", "0", "0"});
    }
  }
  r.write("po_costs.csv", csv.text());
  return r.finish();
}

int cmd_solve_coop(Run& r) {
  const auto model = model_of(r);
  const auto game = game_from(r.config);
  const auto opts = coop_options_from(r.config);
  const double gamma = r.config.at("run").at("gamma");
  if (!(gamma > 0 && gamma < 1)) throw ConfigError("run.gamma must lie strictly inside (0, 1)");
  const auto gammas = r.config.at("sweep").at("gammas").get<std::vector<double>>();
  if (gammas.empty()) throw ConfigError("sweep.gammas is empty");
  for (double g : gammas)
    if (!(g > 0 && g < 1)) throw ConfigError("sweep.gammas must lie strictly inside (0, 1)");
  try {
    r.write_json("coop.json", coop_solution_to_json(coop_value_iteration(model, game, gamma, opts),
                                                    model));
    Csv csv({"gamma", "C1", "C2"});
    for (const auto& p : pareto_sweep(model, game, gammas, opts))
      csv.row({format_number(p.gamma), format_number(p.cost[0]), format_number(p.cost[1])});
    r.write("frontier.csv", csv.text());
  } catch (const ConvergenceError& e) {
    r.partial = true;
    r.note(e.what());
  }
  return r.finish();
}

int cmd_eval_simple(Run& r) {
  const auto model = model_of(r);
  const auto game = game_from(r.config);
  const auto opts = co_options_from(r.config);
  std::array<double, 2> alpha{};
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond})
    alpha[index_of(f)] = solve_threshold(model, game, f, opts.single).alpha;
  const auto ev = evaluate_policy_pair(simple_policy(model, alpha), model, game);
  Csv csv({"theta", "alpha1", "alpha2", "C1", "C2"});
  csv.row({format_number(theta_of(r.config)), format_number(alpha[0]), format_number(alpha[1]),
           format_number(ev.cost[0]), format_number(ev.cost[1])});
  r.write("simple.csv", csv.text());
  return r.finish();
}

int cmd_onehop(Run& r) {
  const auto res = run_onehop_sweep(r.config);
  for (const auto& row : res.rows)
    if (!row.converged) r.note("theta " + format_number(row.theta) + " " + row.point + ": " + row.error);
  for (const auto& f : res.frontier)
    if (!f.converged)
      r.note("theta " + format_number(f.theta) + " gamma " + format_number(f.gamma) +
             ": cooperative iteration failed");
  r.partial = !res.all_converged();
  r.write("onehop.csv", onehop_csv(res.rows).text());
  r.write("frontier.csv", frontier_csv(res.frontier).text());
  return r.finish();
}

int cmd_netsim(Run& r) {
  auto etas = r.config.at("netsim").at("etas").get<std::vector<double>>();
  const bool grid = !etas.empty();
  if (!grid) etas = {r.config.at("netsim").at("eta").get<double>()};
  const auto cells = run_netsim_grid(r.config, etas);
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      r.partial = true;
      r.note("lambda " + format_number(c.lambda) + " seed " + std::to_string(c.seed) + ": " + c.error);
    } else if (c.result.partial) {
      r.partial = true;
      r.note("lambda " + format_number(c.lambda) + " seed " + std::to_string(c.seed) +
             ": horizon reached");
    }
  }
  for (double eta : etas) {
    std::vector<NetsimCell> sub;
    for (const auto& c : cells)
      if (c.eta == eta) sub.push_back(c);
    const std::string suffix = grid ? "_eta" + format_number(eta) : "";
    r.write("packets" + suffix + ".csv", netsim_packets_csv(sub).text());
    r.write("drops" + suffix + ".csv", netsim_drops_csv(sub).text());
    r.write("aggregate" + suffix + ".csv", netsim_aggregate_csv(aggregate_netsim(sub)).text());
  }
  return r.finish();
}

int cmd_verify(Run& r) {
  const auto model = model_of(r);
  const auto game = game_from(r.config);
  const auto opts = co_options_from(r.config);
  const double tol = r.config.at("solver").at("verify_tol");
  Json reports = Json::array();
  for (Family f : families_of(r.config)) {
    Json j;
    j["family"] = family_name(f);
    try {
      const auto s = solve_nepp(model, game, f, opts);
      const auto rep = verify_nepp(s, model, game, tol);
      j["ok"] = rep.ok;
      j["claimed"] = {rep.claimed[0], rep.claimed[1]};
      j["evaluated"] = {rep.evaluated[0], rep.evaluated[1]};
      j["best_response"] = {rep.best_response[0], rep.best_response[1]};
      j["max_gain"] = rep.max_gain;
      j["max_stage_gap"] = rep.max_stage_gap;
      j["max_table_error"] = rep.max_table_error;
      j["failures"] = rep.failures;
      if (!rep.ok) {
        r.partial = true;
        r.note(family_name(f) + ": verification failed");
      }
    } catch (const ConvergenceError& e) {
      j["ok"] = false;
      j["failures"] = {e.what()};
      r.partial = true;
      r.note(family_name(f) + ": " + e.what());
    }
    std::cout << family_name(f) << (j["ok"].get<bool>() ? " certified" : " NOT certified") << "\n";
    reports.push_back(j);
  }
  r.write_json("verify.json", reports);
  return r.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay-selection game solvers and network simulator"};
  app.require_subcommand(1);
  Common common;

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(Run&);
  };
  const Sub subs[] = {
      {"solve-co", "Equilibrium policy pairs with complete observations", cmd_solve_co},
      {"solve-po", "Equilibrium threshold pairs with partial observations", cmd_solve_po},
      {"solve-coop", "Cooperative policy and Pareto frontier", cmd_solve_coop},
      {"eval-simple", "Cost of the simple threshold policy pair", cmd_eval_simple},
      {"onehop-sweep", "All one-hop points over the theta sweep", cmd_onehop},
      {"netsim", "End-to-end network simulation over the lambda x seed grid", cmd_netsim},
      {"verify", "Solve and certify equilibrium policy pairs", cmd_verify},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> registered;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("-c,--config", common.config_path, "JSON configuration file");
    sc->add_option("--override", common.overrides, "key.path=value (repeatable)");
    sc->add_option("-o,--out", common.out, "Output directory")->capture_default_str();
    sc->add_option("--seed", common.seed, "Single simulation seed");
    sc->add_option("--theta", common.theta, "Forwarder separation in meters");
    registered.push_back({sc, &s});
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  for (auto& [sc, s] : registered) {
    if (!sc->parsed()) continue;
    try {
      Run run = prepare(s->name, common);
      return s->fn(run);
    } catch (const ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  return kExitConfig;
}
