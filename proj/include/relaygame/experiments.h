#ifndef RELAYGAME_EXPERIMENTS_H_
#define RELAYGAME_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "relaygame/config.h"
#include "relaygame/io.h"
#include "relaygame/netsim.h"

namespace relaygame {

// Runs fn(0..n-1) on up to `workers` threads. Results must be written to
// per-index slots so the merge order never depends on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

struct OnehopRow {
  double theta = 0;
  std::string point;  // star, circle, square, nabla, delta, cross
  CostPair cost{};
  bool converged = false;
  long iterations = 0;
  std::string error;
};

struct FrontierRow {
  double theta = 0;
  double gamma = 0;
  CostPair cost{};
  bool converged = false;
  long iterations = 0;
};

struct OnehopResult {
  std::vector<OnehopRow> rows;
  std::vector<FrontierRow> frontier;
  bool all_converged() const;
};

// All NEPP points and the simple policy for one model.
std::vector<OnehopRow> onehop_points(const RewardModel& model, const GameConfig& game,
                                     const CoSolverOptions& opts, double theta,
                                     int workers = 1);

OnehopResult run_onehop_sweep(const Json& config, bool with_frontier = true);

// Euclidean distance from the simple-policy point to the nearest converged
// NEPP point at `theta`.
double simple_gap(const std::vector<OnehopRow>& rows, double theta);

Csv onehop_csv(const std::vector<OnehopRow>& rows);
Csv frontier_csv(const std::vector<FrontierRow>& rows);

struct NetsimCell {
  double eta = 0;
  double lambda = 0;
  std::uint64_t seed = 0;
  NetSimResult result;
  std::string error;
};

struct NetsimAggregate {
  double eta = 0;
  double lambda = 0;
  Summary delay, power;
  int delivered = 0;
  int dropped = 0;
  int failed_runs = 0;
  bool partial = false;
};

// Every (eta, lambda, seed) cell; failures are recorded per cell.
std::vector<NetsimCell> run_netsim_grid(const Json& config, const std::vector<double>& etas);

// Pools delivered source packets over seeds, one entry per (eta, lambda).
std::vector<NetsimAggregate> aggregate_netsim(const std::vector<NetsimCell>& cells);

Csv netsim_packets_csv(const std::vector<NetsimCell>& cells);
Csv netsim_drops_csv(const std::vector<NetsimCell>& cells);
Csv netsim_aggregate_csv(const std::vector<NetsimAggregate>& agg);

}  // namespace relaygame

#endif  // RELAYGAME_EXPERIMENTS_H_
