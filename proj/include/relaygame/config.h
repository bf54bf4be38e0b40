#ifndef RELAYGAME_CONFIG_H_
#define RELAYGAME_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "relaygame/co_solver.h"
#include "relaygame/coop_solver.h"
#include "relaygame/netsim.h"
#include "relaygame/reward_model.h"
#include "relaygame/single_agent.h"

namespace relaygame {

using Json = nlohmann::ordered_json;

// Bad configuration: unknown key, wrong type, unreadable file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every tunable with its default. Sections: scenario, game, solver, sweep,
// netsim, run.
Json default_config();

// Applies `patch` onto `base`. Keys must already exist in `base` and values
// must have a compatible type.
void merge_checked(Json& base, const Json& patch, const std::string& where = "");

// "a.b.c=value"; the value is parsed as JSON when possible, otherwise taken
// as a string.
void apply_override(Json& config, const std::string& assignment);

Json load_config_file(const std::string& path);

// Defaults, then the optional file, then overrides in order.
Json resolve_config(const std::string& path,
                    const std::vector<std::string>& overrides);

GeoScenario scenario_from(const Json& config, double theta_m);
GameConfig game_from(const Json& config);
CoSolverOptions co_options_from(const Json& config);
CoopOptions coop_options_from(const Json& config);
NetSimConfig netsim_from(const Json& config, double lambda, std::uint64_t seed,
                         double eta);

}  // namespace relaygame

#endif  // RELAYGAME_CONFIG_H_
