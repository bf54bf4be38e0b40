#ifndef RELAYGAME_PO_SOLVER_H_
#define RELAYGAME_PO_SOLVER_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relaygame/co_solver.h"
#include "relaygame/reward_model.h"
#include "relaygame/single_agent.h"
#include "relaygame/stage_game.h"

namespace relaygame {

// NABLA picks the lowest F1 threshold paired with the highest F2 threshold
// at every location; DELTA the reverse.
enum class Variant { kNabla, kDelta };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);

// Thresholds count reward indices: a forwarder with threshold Phi stops iff
// its reward index is >= Phi (0-based), so Phi = 0 always stops and Phi = n
// never does.

// Probability that the opponent continues: mass of indices below `threshold`.
double continue_prob(int threshold, const std::vector<SparseEntry>& conditional);

struct StageCosts {
  std::optional<double> stop;  // nullopt: stopping is forbidden
  double cont = 0;
};

StageCosts stage_costs(Reward r, double g, double c_bar, double d,
                       const GameConfig& config, Forwarder role);

struct PoContext {
  const RewardModel& model;
  const GameConfig& config;
  CostPair c_bar;
  CostPair d;
};

int best_response_threshold(int opponent_threshold, int location,
                            Forwarder role, const PoContext& ctx);

// Same best response by a linear scan over every reward index.
int best_response_threshold_scan(int opponent_threshold, int location,
                                 Forwarder role, const PoContext& ctx);

struct Elimination {
  std::vector<int> a;  // F1 thresholds, ascending
  std::vector<int> b;  // F2 thresholds, ascending
  // (a[t], b[N-1-t]): lowest F1 threshold with highest F2 threshold, etc.
  std::vector<std::pair<int, int>> pairs;
  int steps = 0;
};

Elimination inductive_elimination(int location, const PoContext& ctx);

// All mutual best-response pairs by enumerating every F2 threshold; sorted
// by F1 threshold.
std::vector<std::pair<int, int>> exhaustive_ne_oracle(int location,
                                                      const PoContext& ctx);

CostPair apply_T_bar(const CostPair& c_bar, Variant variant,
                     const RewardModel& model, const CostPair& d,
                     const GameConfig& config);

struct PoNeppSolution {
  Variant variant = Variant::kNabla;
  CostPair cost{};
  CostPair d{};
  std::array<double, 2> alpha{};
  std::vector<std::pair<int, int>> thresholds;  // per location (Phi, Psi)
  long iterations = 0;
  double residual = 0;

  // G^1(r_i, l) and G^2(l, r_j): cost of the better stage action.
  double stage_value(Forwarder f, int index, int location,
                     const RewardModel& model, const GameConfig& config) const;
};

PoNeppSolution solve_po_nepp(const RewardModel& model, const GameConfig& config,
                             Variant variant, const CoSolverOptions& opts = {});

}  // namespace relaygame

#endif  // RELAYGAME_PO_SOLVER_H_
