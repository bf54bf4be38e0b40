#ifndef RELAYGAME_REWARD_MODEL_H_
#define RELAYGAME_REWARD_MODEL_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relaygame/reward.h"

namespace relaygame {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct GainLevel {
  double gain = 0.0;
  double prob = 0.0;
};

// Link budget and reward shaping shared by the one-hop model and the
// network simulator.
struct RadioParams {
  double range_m = 80.0;
  double pathloss_exponent = 2.5;
  double reference_distance_m = 5.0;
  double receiver_sensitivity_mw = 1e-9;
  double max_power_mw = 1.0;
  double tradeoff_a = 0.5;
  std::vector<GainLevel> gain_table = {
      {0.4e-3, 0.25}, {0.6e-3, 0.25}, {0.8e-3, 0.25}, {1.0e-3, 0.25}};

  void validate() const;
};

struct GeoScenario {
  Point forwarder_1{0.0, 0.0};
  Point forwarder_2{0.0, 0.0};
  Point sink{1000.0, 0.0};
  double grid_spacing_m = 5.0;
  RadioParams radio;

  const Point& forwarder(Forwarder f) const {
    return f == Forwarder::kFirst ? forwarder_1 : forwarder_2;
  }
  void validate() const;

  // Forwarders at (0, theta/2) and (0, -theta/2), sink at (1000, 0).
  static GeoScenario Symmetric(double theta_m);
};

// Progress towards the sink made by moving from `from` to `location`.
double compute_progress(const Point& location, const Point& from,
                        const Point& sink);
double compute_progress(const Point& location, Forwarder f,
                        const GeoScenario& scenario);

// Transmit power in mW, or nullopt when the relay is out of range or the
// power exceeds the budget. Throws for distances below the reference.
std::optional<double> required_power(double distance_m, double gain,
                                     const RadioParams& radio);

// progress^a / power^(1-a); INFEASIBLE when power is.
Reward reward_value(double progress, std::optional<double> power_mw,
                    const RadioParams& radio);

struct SparseEntry {
  int index = 0;
  double p = 0.0;
};

struct JointCell {
  int i = 0;
  int j = 0;
  double p = 0.0;
};

// Finite reward model. Index 0 always holds INFEASIBLE; indices 1..n-1 are
// strictly increasing finite rewards. Per-location conditionals are sparse
// and sorted by index; the joint table is their q-weighted product and is
// stored sparsely, sorted by (i, j).
class RewardModel {
 public:
  // `finite_rewards` must be strictly increasing; they become indices 1..n-1.
  // Conditionals refer to the full index range (0 = INFEASIBLE).
  RewardModel(std::vector<double> finite_rewards,
              std::vector<double> location_probs,
              std::vector<std::vector<SparseEntry>> conditional_1,
              std::vector<std::vector<SparseEntry>> conditional_2,
              std::vector<Point> location_points = {});

  // One degenerate location per positive cell, so independence holds.
  static RewardModel FromJoint(std::vector<double> finite_rewards,
                               const std::vector<JointCell>& joint);

  // Keeps an explicitly supplied joint table instead of deriving it, e.g.
  // when loading a stored model. independence_error() then measures how far
  // the stored table is from the location factorization.
  static RewardModel WithExplicitJoint(
      std::vector<double> finite_rewards, std::vector<double> location_probs,
      std::vector<std::vector<SparseEntry>> conditional_1,
      std::vector<std::vector<SparseEntry>> conditional_2,
      std::vector<JointCell> joint, std::vector<Point> location_points = {});

  int size() const { return static_cast<int>(rewards_.size()); }
  const std::vector<Reward>& rewards() const { return rewards_; }
  const Reward& reward(int i) const { return rewards_[i]; }
  std::vector<double> finite_rewards() const;

  const std::vector<JointCell>& joint() const { return joint_; }
  double joint_prob(int i, int j) const;
  const std::vector<double>& marginal(Forwarder f) const {
    return marginal_[index_of(f)];
  }

  int num_locations() const { return static_cast<int>(location_probs_.size()); }
  double location_prob(int l) const { return location_probs_[l]; }
  const std::vector<double>& location_probs() const { return location_probs_; }
  const std::vector<SparseEntry>& conditional(Forwarder f, int l) const {
    return conditional_[index_of(f)][l];
  }
  // Empty unless built from geometry.
  const std::vector<Point>& location_points() const { return points_; }

  // Largest elementwise gap between the stored joint and sum_l q p1 p2.
  double independence_error() const;
  // Checks every normalization and consistency invariant; throws on failure.
  void validate(double tol = 1e-12) const;

  // Model seen with the forwarder roles exchanged.
  RewardModel swapped() const;

 private:
  RewardModel() = default;
  void init(std::vector<double> finite_rewards, std::vector<double> location_probs,
            std::vector<std::vector<SparseEntry>> conditional_1,
            std::vector<std::vector<SparseEntry>> conditional_2,
            std::vector<Point> location_points);
  std::vector<JointCell> factorized_joint() const;
  void set_joint(std::vector<JointCell> joint);

  std::vector<Reward> rewards_;
  std::vector<double> location_probs_;
  std::vector<std::vector<SparseEntry>> conditional_[2];
  std::vector<Point> points_;
  std::vector<JointCell> joint_;
  std::vector<double> marginal_[2];
};

// Optional per-location weight; uniform when empty.
using LocationWeightFn = std::function<double(const Point&)>;

struct BuildReport {
  int dropped_near_forwarder = 0;
  int locations = 0;
};

RewardModel build_reward_model(const GeoScenario& scenario,
                               double merge_tolerance = 0.0,
                               const LocationWeightFn& weight = nullptr,
                               BuildReport* report = nullptr);

}  // namespace relaygame

#endif  // RELAYGAME_REWARD_MODEL_H_
