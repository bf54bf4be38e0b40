#include "relaygame/config.h"

#include <fstream>
#include <sstream>

namespace relaygame {

Json default_config() {
  const RadioParams radio;
  const GameConfig game;
  const CoSolverOptions co;
  const CoopOptions coop;
  const NetSimConfig net;

  Json gains = Json::array();
  for (const auto& g : radio.gain_table) gains.push_back({g.gain, g.prob});

  Json c;
  c["scenario"] = {
      {"theta_m", 0.0},
      {"forwarder_positions", Json::array()},
      {"sink_position", {1000.0, 0.0}},
      {"grid_spacing_m", 5.0},
      {"merge_tolerance", 0.0},
      {"range_m", radio.range_m},
      {"pathloss_exponent", radio.pathloss_exponent},
      {"reference_distance_m", radio.reference_distance_m},
      {"receiver_sensitivity_mw", radio.receiver_sensitivity_mw},
      {"max_power_mw", radio.max_power_mw},
      {"tradeoff_a", radio.tradeoff_a},
      {"gain_table", gains},
  };
  c["game"] = {{"tau_ms", game.tau},
               {"eta_1", game.eta_1},
               {"eta_2", game.eta_2},
               {"nu_1", game.nu_1}};
  c["solver"] = {{"tol", co.tol},
                 {"max_iters", co.max_iters},
                 {"relaxation", co.relaxation},
                 {"single_tol", co.single.tol},
                 {"single_max_iters", co.single.max_iters},
                 {"coop_tol", coop.tol},
                 {"coop_max_iters", coop.max_iters},
                 {"verify_tol", 1e-6}};
  Json gammas = Json::array();
  for (int k = 1; k <= 19; ++k) gammas.push_back(k * 0.05);
  c["sweep"] = {{"thetas", {0.0, 5.0, 10.0}}, {"gammas", gammas}, {"workers", 1}};
  c["netsim"] = {
      {"area_m", net.area_m},
      {"node_count", net.node_count},
      {"source_position", {net.source_position.x, net.source_position.y}},
      {"sink_position", {net.sink_position.x, net.sink_position.y}},
      {"duty_period_s", net.duty_period_s},
      {"source_packet_count", net.source_packet_count},
      {"eta", net.eta},
      {"etas", Json::array()},
      {"lambdas", {0.0, 10.0, 20.0, 30.0, 40.0}},
      {"seeds", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}},
      {"literal_inter_wake", net.literal_inter_wake},
      {"fallback_max_periods", net.fallback_max_periods},
      {"horizon_s", net.horizon_s},
      {"workers", 1},
  };
  c["run"] = {{"family", "all"}, {"variant", "all"}, {"gamma", 0.5}};
  return c;
}

namespace {

bool compatible(const Json& def, const Json& val) {
  if (def.is_number_float()) return val.is_number();
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) {
    if (!val.is_array()) return false;
    if (def.empty()) return true;
    for (const auto& v : val)
      if (!compatible(def.front(), v)) return false;
    return true;
  }
  if (def.is_object()) return val.is_object();
  return false;
}

std::string type_label(const Json& j) {
  if (j.is_number_float()) return "number";
  if (j.is_number_integer()) return "integer";
  return j.type_name();
}

}  // namespace

void merge_checked(Json& base, const Json& patch, const std::string& where) {
  if (!patch.is_object())
    throw ConfigError("expected an object at '" + (where.empty() ? "<root>" : where) + "'");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown configuration key '" + key + "'");
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_checked(slot, it.value(), key);
      continue;
    }
    if (!compatible(slot, it.value()))
      throw ConfigError("'" + key + "' expects " + type_label(slot) + ", got " +
                        type_label(it.value()));
    // Keep float-typed fields float so the manifest echoes them uniformly.
    if (slot.is_number_float())
      slot = it.value().get<double>();
    else
      slot = it.value();
  }
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    Json wrap;
    wrap[*it] = patch;
    patch = wrap;
  }
  merge_checked(config, patch);
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("'" + path + "' is not valid JSON");
  return j;
}

Json resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
  Json c = default_config();
  if (!path.empty()) merge_checked(c, load_config_file(path));
  for (const auto& o : overrides) apply_override(c, o);
  return c;
}

namespace {

Point point_from(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(what + " must be a pair [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

GeoScenario scenario_from(const Json& config, double theta_m) {
  const Json& s = config.at("scenario");
  GeoScenario g = GeoScenario::Symmetric(theta_m);
  const Json& fw = s.at("forwarder_positions");
  if (!fw.empty()) {
    if (fw.size() != 2) throw ConfigError("scenario.forwarder_positions needs two points");
    g.forwarder_1 = point_from(fw[0], "scenario.forwarder_positions[0]");
    g.forwarder_2 = point_from(fw[1], "scenario.forwarder_positions[1]");
  }
  g.sink = point_from(s.at("sink_position"), "scenario.sink_position");
  g.grid_spacing_m = s.at("grid_spacing_m");
  auto& r = g.radio;
  r.range_m = s.at("range_m");
  r.pathloss_exponent = s.at("pathloss_exponent");
  r.reference_distance_m = s.at("reference_distance_m");
  r.receiver_sensitivity_mw = s.at("receiver_sensitivity_mw");
  r.max_power_mw = s.at("max_power_mw");
  r.tradeoff_a = s.at("tradeoff_a");
  r.gain_table.clear();
  for (const auto& e : s.at("gain_table")) {
    if (!e.is_array() || e.size() != 2)
      throw ConfigError("scenario.gain_table entries must be [gain, probability]");
    r.gain_table.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return g;
}

GameConfig game_from(const Json& config) {
  const Json& g = config.at("game");
  GameConfig c{g.at("tau_ms"), g.at("eta_1"), g.at("eta_2"), g.at("nu_1")};
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("game: ") + e.what());
  }
  return c;
}

CoSolverOptions co_options_from(const Json& config) {
  const Json& s = config.at("solver");
  CoSolverOptions o;
  o.tol = s.at("tol");
  o.max_iters = s.at("max_iters");
  o.relaxation = s.at("relaxation");
  o.single.tol = s.at("single_tol");
  o.single.max_iters = s.at("single_max_iters");
  if (!(o.tol > 0) || !(o.single.tol > 0)) throw ConfigError("solver tolerances must be positive");
  if (!(o.relaxation > 0 && o.relaxation <= 1))
    throw ConfigError("solver.relaxation must lie in (0, 1]");
  return o;
}

CoopOptions coop_options_from(const Json& config) {
  const Json& s = config.at("solver");
  CoopOptions o;
  o.tol = s.at("coop_tol");
  o.max_iters = s.at("coop_max_iters");
  if (!(o.tol > 0)) throw ConfigError("solver.coop_tol must be positive");
  return o;
}

NetSimConfig netsim_from(const Json& config, double lambda, std::uint64_t seed,
                         double eta) {
  const Json& n = config.at("netsim");
  NetSimConfig c;
  c.area_m = n.at("area_m");
  c.node_count = n.at("node_count");
  c.source_position = point_from(n.at("source_position"), "netsim.source_position");
  c.sink_position = point_from(n.at("sink_position"), "netsim.sink_position");
  c.duty_period_s = n.at("duty_period_s");
  c.source_packet_count = n.at("source_packet_count");
  c.literal_inter_wake = n.at("literal_inter_wake");
  c.fallback_max_periods = n.at("fallback_max_periods");
  c.horizon_s = n.at("horizon_s");
  c.packet_rate_hz = lambda;
  c.rng_seed = seed;
  c.eta = eta;
  // Link parameters are shared with the one-hop scenario.
  c.radio = scenario_from(config, 0.0).radio;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("netsim: ") + e.what());
  }
  return c;
}

}  // namespace relaygame
