#ifndef RELAYGAME_COOP_SOLVER_H_
#define RELAYGAME_COOP_SOLVER_H_

#include <array>
#include <optional>
#include <vector>

#include "relaygame/co_solver.h"
#include "relaygame/reward_model.h"
#include "relaygame/single_agent.h"

namespace relaygame {

// Joint actions considered when both forwarders are active. Listed in
// tie-breaking order.
enum class JointAction { kStopContinue, kContinueStop, kContinueContinue };

struct CoopStateCosts {
  std::optional<double> sc, cs;  // nullopt when the stopper's relay is INFEASIBLE
  double cc = 0;
  std::optional<double> ss;      // never better than the best of sc and cs
};

class CoopSolution {
 public:
  double gamma = 0.5;
  // Weighted continuation scalars: X for the joint chain, Y[k] once alone.
  double x = 0;
  std::array<double, 2> y{};
  double weighted_cost = 0;  // tau + X
  CostPair cost{};           // per-forwarder costs of the extracted policy
  long iterations = 0;
  double residual = 0;
  std::vector<Reward> rewards;
  GameConfig config;

  CoopStateCosts state_costs(int i, int j) const;
  double value(int i, int j) const;                 // J*(r_i, r_j)
  double lone_value(Forwarder f, int i) const;      // J*(r_i, t) or J*(t, r_j)
  JointAction action(int i, int j) const;
  bool lone_stops(Forwarder f, int i) const;
  PolicyPairCO policy() const;
};

struct CoopOptions {
  double tol = 1e-10;
  long max_iters = 10000000;
};

CoopSolution coop_value_iteration(const RewardModel& model,
                                  const GameConfig& config, double gamma,
                                  const CoopOptions& opts = {});

struct ParetoPoint {
  double gamma;
  CostPair cost;
};

// One point per gamma (sorted), consecutive duplicates of the cost pair
// removed.
std::vector<ParetoPoint> pareto_sweep(const RewardModel& model,
                                      const GameConfig& config,
                                      std::vector<double> gammas,
                                      const CoopOptions& opts = {});

}  // namespace relaygame

#endif  // RELAYGAME_COOP_SOLVER_H_
