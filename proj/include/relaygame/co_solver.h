#ifndef RELAYGAME_CO_SOLVER_H_
#define RELAYGAME_CO_SOLVER_H_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "relaygame/reward_model.h"
#include "relaygame/single_agent.h"
#include "relaygame/stage_game.h"

namespace relaygame {

// Selection rule inside R4: (s,c), (c,s) or the mixed equilibrium.
enum class Family { kSC, kCS, kMixed };

std::string family_name(Family f);    // "SC", "CS", "MIXED"
std::string family_symbol(Family f);  // legend name used in CSV output
Family parse_family(const std::string& s);

// Stationary policy pair. `joint(i, j)` gives the stopping probabilities of
// both forwarders when both are active; `lone[k][i]` the stopping
// probability of forwarder k once the other has left.
struct PolicyPairCO {
  std::function<std::array<double, 2>(int, int)> joint;
  std::array<std::vector<double>, 2> lone;
};

// Stop iff own reward >= alpha, ignoring the competitor.
PolicyPairCO simple_policy(const RewardModel& model,
                           const std::array<double, 2>& alpha);

struct PolicyEvaluation {
  CostPair cost{};           // C: expected cost from time 0
  CostPair next_value{};     // X: expected value of the next joint state
  CostPair lone_continue{};  // cost of continuing once alone
};

// Solves the policy-evaluation equations in closed form. The next joint
// state does not depend on the current one, so the value at (i, j) is
// affine in X and X solves a scalar equation.
PolicyEvaluation evaluate_policy_pair(const PolicyPairCO& policy,
                                      const RewardModel& model,
                                      const GameConfig& config);

// J^1(i,j), J^2(i,j) under `policy`, given its evaluation.
CostPair state_values(const PolicyEvaluation& eval,
                      const std::array<double, 2>& sigma, Reward r_i,
                      Reward r_j, const GameConfig& config);

struct CellOutcome {
  Region region;
  std::array<double, 2> sigma;  // stopping probabilities
  CostPair value;               // J^1, J^2
};

// Equilibrium play and payoffs at (r_i, r_j) for cost pair c.
CellOutcome cell_outcome(Reward r_i, Reward r_j, const CostPair& c,
                         const CostPair& d, const Thresholds& t, Family family,
                         const GameConfig& config);

CostPair apply_T(const CostPair& c, Family family, const RewardModel& model,
                 const CostPair& d, const GameConfig& config);

struct CoSolverOptions {
  double tol = 1e-9;
  long max_iters = 1000000;
  double relaxation = 1.0;
  SingleAgentOptions single;
};

class CoNeppSolution {
 public:
  Family family = Family::kSC;
  CostPair cost{};
  CostPair d{};
  std::array<double, 2> alpha{};
  Thresholds thresholds;
  long iterations = 0;
  double residual = 0;
  std::vector<Reward> rewards;
  GameConfig config;

  CellOutcome outcome(int i, int j) const;
  CostPair value(int i, int j) const { return outcome(i, j).value; }
  double lone_value(Forwarder f, int i) const;
  double lone_stop_prob(Forwarder f, int i) const;
  PolicyPairCO policy() const;

  // Same solution with a different claimed cost pair; used to check that
  // verification notices a wrong C.
  CoNeppSolution with_cost(const CostPair& c) const;
};

CoNeppSolution solve_nepp(const RewardModel& model, const GameConfig& config,
                          Family family, const CoSolverOptions& opts = {});

struct VerificationReport {
  bool ok = true;
  CostPair claimed{};
  CostPair evaluated{};
  CostPair best_response{};
  double max_gain = 0;        // largest profitable deviation found
  double max_stage_gap = 0;   // largest stage-game NE violation
  double max_table_error = 0; // value tables vs policy evaluation
  std::vector<std::string> failures;
};

VerificationReport verify_nepp(const CoNeppSolution& solution,
                               const RewardModel& model,
                               const GameConfig& config, double tol);

}  // namespace relaygame

#endif  // RELAYGAME_CO_SOLVER_H_
