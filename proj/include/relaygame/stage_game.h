#ifndef RELAYGAME_STAGE_GAME_H_
#define RELAYGAME_STAGE_GAME_H_

#include <array>
#include <string>
#include <vector>

#include "relaygame/reward.h"
#include "relaygame/single_agent.h"

namespace relaygame {

// Indexed by forwarder: {F1, F2}.
using CostPair = std::array<double, 2>;

enum class Action { kContinue = 0, kStop = 1 };

// Both-continue threshold zeta = C/(-eta) and lone threshold alpha = D/(-eta).
struct Thresholds {
  std::array<double, 2> zeta{};
  std::array<double, 2> alpha{};

  static Thresholds From(const CostPair& c, const CostPair& d,
                         const GameConfig& config);
};

// Expected cost when both stop and contention is resolved by nu.
double contention_cost(Forwarder f, Reward own, double d_own,
                       const GameConfig& config);

// 2x2 cost bimatrix; cost[player][a1][a2] with a = 0 continue, 1 stop.
struct StageGame {
  std::array<std::array<std::array<double, 2>, 2>, 2> cost{};
  std::array<bool, 2> stop_forbidden{false, false};

  double at(Forwarder f, Action a1, Action a2) const {
    return cost[index_of(f)][static_cast<int>(a1)][static_cast<int>(a2)];
  }
};

StageGame build_stage_game(Reward r_i, Reward r_j, const CostPair& c,
                           const CostPair& d, const GameConfig& config);

enum class Region { kR1, kR2a, kR2b, kR2c, kR3a, kR3b, kR3c, kR4, kR5 };

// R1..R5 without the sub-region letter.
int coarse_region(Region r);
std::string region_name(Region r);

Region classify_region(Reward r_i, Reward r_j, const Thresholds& t);

// Stopping probability that leaves the player holding reward r (with
// thresholds zeta < alpha and win probability nu_r) indifferent.
double indifference_prob(Reward r, double zeta, double alpha, double nu_r);

// (Gamma_1, Gamma_2): the stopping probabilities of F1 and F2 at the mixed
// equilibrium. Gamma_1 makes F2 indifferent and vice versa.
std::array<double, 2> mixed_strategy_probs(Reward r_i, Reward r_j,
                                           const Thresholds& t,
                                           const GameConfig& config);
std::array<double, 2> mixed_strategy_probs(Reward r_i, Reward r_j,
                                           const CostPair& c, const CostPair& d,
                                           const GameConfig& config);

// A rectangle of stopping-probability profiles; degenerate when a side has
// zero length. Open ends mark open intervals.
struct NePiece {
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  std::array<bool, 2> open{false, false};

  bool is_point() const { return lo[0] == hi[0] && lo[1] == hi[1]; }
};

struct StageEquilibria {
  std::vector<NePiece> pieces;

  std::vector<std::array<Action, 2>> pure() const;
  // Isolated equilibria with at least one coordinate strictly inside (0,1).
  std::vector<std::array<double, 2>> mixed() const;
  bool has_continuum() const;
};

// Enumerates every Nash equilibrium of the bimatrix game by intersecting the
// two best-response correspondences.
StageEquilibria stage_nash_oracle(const StageGame& game);

// Largest gain either player gets from a unilateral deviation from
// (sigma_1, sigma_2); forbidden stops are never counted as deviations.
double nash_gap(const StageGame& game, double sigma_1, double sigma_2);

// Expected costs of the profile (sigma = stopping probabilities).
CostPair profile_costs(const StageGame& game, double sigma_1, double sigma_2);

// Equilibria predicted by the region partition.
struct RegionPrediction {
  std::vector<std::array<Action, 2>> pure;
  std::vector<std::array<double, 2>> mixed;
};
RegionPrediction region_equilibria(Reward r_i, Reward r_j, const Thresholds& t,
                                   const GameConfig& config);

}  // namespace relaygame

#endif  // RELAYGAME_STAGE_GAME_H_
