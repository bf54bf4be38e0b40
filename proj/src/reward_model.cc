#include "relaygame/reward_model.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace relaygame {

namespace {

constexpr double kProbTol = 1e-12;

std::vector<SparseEntry> normalize_sparse(std::vector<SparseEntry> v, int n,
                                          const char* what) {
  for (const auto& e : v) {
    if (e.index < 0 || e.index >= n)
      throw std::invalid_argument(std::string(what) + ": index out of range");
    if (!(e.p >= 0.0) || !std::isfinite(e.p))
      throw std::invalid_argument(std::string(what) + ": bad probability");
  }
  std::sort(v.begin(), v.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return a.index < b.index;
  });
  std::vector<SparseEntry> out;
  for (const auto& e : v) {
    if (!out.empty() && out.back().index == e.index)
      out.back().p += e.p;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const SparseEntry& e) { return e.p == 0.0; });
  return out;
}

void sort_and_merge(std::vector<JointCell>& cells) {
  std::sort(cells.begin(), cells.end(), [](const JointCell& a, const JointCell& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  std::vector<JointCell> out;
  out.reserve(cells.size());
  for (const auto& c : cells) {
    if (!out.empty() && out.back().i == c.i && out.back().j == c.j)
      out.back().p += c.p;
    else
      out.push_back(c);
  }
  std::erase_if(out, [](const JointCell& c) { return c.p == 0.0; });
  cells = std::move(out);
}

void check_close(double got, double want, double tol, const std::string& what) {
  if (!(std::abs(got - want) <= tol))
    throw std::invalid_argument(what + ": got " + std::to_string(got) +
                                ", expected " + std::to_string(want));
}

}  // namespace

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void RadioParams::validate() const {
  if (!(range_m > 0)) throw std::invalid_argument("range_m must be positive");
  if (!(pathloss_exponent >= 2))
    throw std::invalid_argument("pathloss_exponent must be >= 2");
  if (!(reference_distance_m > 0))
    throw std::invalid_argument("reference_distance_m must be positive");
  if (!(receiver_sensitivity_mw > 0))
    throw std::invalid_argument("receiver_sensitivity_mw must be positive");
  if (!(max_power_mw > 0))
    throw std::invalid_argument("max_power_mw must be positive");
  if (!(tradeoff_a >= 0 && tradeoff_a <= 1))
    throw std::invalid_argument("tradeoff_a must lie in [0, 1]");
  if (gain_table.empty()) throw std::invalid_argument("gain_table is empty");
  long double total = 0;
  for (const auto& g : gain_table) {
    if (!(g.gain > 0)) throw std::invalid_argument("gains must be positive");
    if (!(g.prob >= 0)) throw std::invalid_argument("gain probability < 0");
    total += g.prob;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > kProbTol)
    throw std::invalid_argument("gain probabilities must sum to 1");
}

void GeoScenario::validate() const {
  if (!(grid_spacing_m > 0))
    throw std::invalid_argument("grid_spacing_m must be positive");
  radio.validate();
}

GeoScenario GeoScenario::Symmetric(double theta_m) {
  if (!(theta_m >= 0)) throw std::invalid_argument("theta must be >= 0");
  GeoScenario s;
  s.forwarder_1 = {0.0, theta_m / 2};
  s.forwarder_2 = {0.0, -theta_m / 2};
  return s;
}

double compute_progress(const Point& location, const Point& from,
                        const Point& sink) {
  return distance(from, sink) - distance(location, sink);
}

double compute_progress(const Point& location, Forwarder f,
                        const GeoScenario& scenario) {
  return compute_progress(location, scenario.forwarder(f), scenario.sink);
}

std::optional<double> required_power(double distance_m, double gain,
                                     const RadioParams& radio) {
  if (!(gain > 0)) throw std::invalid_argument("gain must be positive");
  if (distance_m < radio.reference_distance_m)
    throw std::invalid_argument("distance " + std::to_string(distance_m) +
                                " m is inside the reference distance");
  if (distance_m > radio.range_m) return std::nullopt;
  double p = (radio.receiver_sensitivity_mw / gain) *
             std::pow(distance_m / radio.reference_distance_m,
                      radio.pathloss_exponent);
  if (p > radio.max_power_mw) return std::nullopt;
  return p;
}

Reward reward_value(double progress, std::optional<double> power_mw,
                    const RadioParams& radio) {
  if (!power_mw || *power_mw > radio.max_power_mw) return Reward::Infeasible();
  if (progress < 0)
    throw std::invalid_argument("negative progress for a feasible relay");
  const double a = radio.tradeoff_a;
  if (a == 1.0) return Reward::Of(progress);
  return Reward::Of(std::pow(progress, a) / std::pow(*power_mw, 1.0 - a));
}

// ---------------------------------------------------------------------------

RewardModel::RewardModel(std::vector<double> finite_rewards,
                         std::vector<double> location_probs,
                         std::vector<std::vector<SparseEntry>> conditional_1,
                         std::vector<std::vector<SparseEntry>> conditional_2,
                         std::vector<Point> location_points) {
  init(std::move(finite_rewards), std::move(location_probs),
       std::move(conditional_1), std::move(conditional_2),
       std::move(location_points));
  set_joint(factorized_joint());
}

RewardModel RewardModel::WithExplicitJoint(
    std::vector<double> finite_rewards, std::vector<double> location_probs,
    std::vector<std::vector<SparseEntry>> conditional_1,
    std::vector<std::vector<SparseEntry>> conditional_2,
    std::vector<JointCell> joint, std::vector<Point> location_points) {
  RewardModel m;
  m.init(std::move(finite_rewards), std::move(location_probs),
         std::move(conditional_1), std::move(conditional_2),
         std::move(location_points));
  for (const auto& c : joint) {
    if (c.i < 0 || c.i >= m.size() || c.j < 0 || c.j >= m.size())
      throw std::invalid_argument("joint cell index out of range");
    if (!(c.p >= 0)) throw std::invalid_argument("joint cell probability < 0");
  }
  m.set_joint(std::move(joint));
  return m;
}

RewardModel RewardModel::FromJoint(std::vector<double> finite_rewards,
                                   const std::vector<JointCell>& joint) {
  std::vector<double> q;
  std::vector<std::vector<SparseEntry>> c1, c2;
  for (const auto& c : joint) {
    if (c.p <= 0) continue;
    q.push_back(c.p);
    c1.push_back({{c.i, 1.0}});
    c2.push_back({{c.j, 1.0}});
  }
  return RewardModel(std::move(finite_rewards), std::move(q), std::move(c1),
                     std::move(c2));
}

void RewardModel::init(std::vector<double> finite_rewards,
                       std::vector<double> location_probs,
                       std::vector<std::vector<SparseEntry>> conditional_1,
                       std::vector<std::vector<SparseEntry>> conditional_2,
                       std::vector<Point> location_points) {
  rewards_.clear();
  rewards_.push_back(Reward::Infeasible());
  for (std::size_t k = 0; k < finite_rewards.size(); ++k) {
    if (!std::isfinite(finite_rewards[k]))
      throw std::invalid_argument("rewards must be finite");
    if (k > 0 && !(finite_rewards[k] > finite_rewards[k - 1]))
      throw std::invalid_argument("rewards must be strictly increasing");
    rewards_.push_back(Reward::Of(finite_rewards[k]));
  }
  const std::size_t L = location_probs.size();
  if (L == 0) throw std::invalid_argument("model has no locations");
  if (conditional_1.size() != L || conditional_2.size() != L)
    throw std::invalid_argument("one conditional per location required");
  if (!location_points.empty() && location_points.size() != L)
    throw std::invalid_argument("location point count mismatch");
  for (double q : location_probs)
    if (!(q >= 0) || !std::isfinite(q))
      throw std::invalid_argument("location probabilities must be >= 0");
  location_probs_ = std::move(location_probs);
  points_ = std::move(location_points);
  const int n = size();
  conditional_[0].resize(L);
  conditional_[1].resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    conditional_[0][l] = normalize_sparse(std::move(conditional_1[l]), n,
                                          "conditional_1");
    conditional_[1][l] = normalize_sparse(std::move(conditional_2[l]), n,
                                          "conditional_2");
  }
}

std::vector<JointCell> RewardModel::factorized_joint() const {
  std::vector<JointCell> cells;
  for (int l = 0; l < num_locations(); ++l) {
    const double q = location_probs_[l];
    if (q == 0) continue;
    for (const auto& a : conditional_[0][l])
      for (const auto& b : conditional_[1][l])
        cells.push_back({a.index, b.index, q * a.p * b.p});
  }
  sort_and_merge(cells);
  return cells;
}

void RewardModel::set_joint(std::vector<JointCell> joint) {
  sort_and_merge(joint);
  joint_ = std::move(joint);
  const int n = size();
  std::vector<long double> m1(n, 0.0L), m2(n, 0.0L);
  for (const auto& c : joint_) {
    m1[c.i] += c.p;
    m2[c.j] += c.p;
  }
  marginal_[0].assign(m1.begin(), m1.end());
  marginal_[1].assign(m2.begin(), m2.end());
}

std::vector<double> RewardModel::finite_rewards() const {
  std::vector<double> out;
  out.reserve(rewards_.size() - 1);
  for (std::size_t k = 1; k < rewards_.size(); ++k)
    out.push_back(rewards_[k].value());
  return out;
}

double RewardModel::joint_prob(int i, int j) const {
  auto it = std::lower_bound(
      joint_.begin(), joint_.end(), JointCell{i, j, 0.0},
      [](const JointCell& a, const JointCell& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
      });
  if (it != joint_.end() && it->i == i && it->j == j) return it->p;
  return 0.0;
}

double RewardModel::independence_error() const {
  auto f = factorized_joint();
  double worst = 0;
  std::size_t a = 0, b = 0;
  auto key = [](const JointCell& c) {
    return (static_cast<std::int64_t>(c.i) << 32) | static_cast<std::uint32_t>(c.j);
  };
  while (a < joint_.size() || b < f.size()) {
    if (b == f.size() || (a < joint_.size() && key(joint_[a]) < key(f[b]))) {
      worst = std::max(worst, joint_[a++].p);
    } else if (a == joint_.size() || key(f[b]) < key(joint_[a])) {
      worst = std::max(worst, f[b++].p);
    } else {
      worst = std::max(worst, std::abs(joint_[a++].p - f[b++].p));
    }
  }
  return worst;
}

void RewardModel::validate(double tol) const {
  long double qs = 0;
  for (double q : location_probs_) qs += q;
  check_close(static_cast<double>(qs), 1.0, tol, "location probabilities");
  for (int r = 0; r < 2; ++r) {
    for (int l = 0; l < num_locations(); ++l) {
      long double s = 0;
      for (const auto& e : conditional_[r][l]) s += e.p;
      check_close(static_cast<double>(s), 1.0, tol,
                  "conditional " + std::to_string(r + 1) + " at location " +
                      std::to_string(l));
    }
  }
  long double js = 0;
  std::vector<long double> m1(size(), 0.0L), m2(size(), 0.0L);
  for (const auto& c : joint_) {
    js += c.p;
    m1[c.i] += c.p;
    m2[c.j] += c.p;
  }
  check_close(static_cast<double>(js), 1.0, tol, "joint table");
  for (int i = 0; i < size(); ++i) {
    check_close(marginal_[0][i], static_cast<double>(m1[i]), tol, "marginal 1");
    check_close(marginal_[1][i], static_cast<double>(m2[i]), tol, "marginal 2");
  }
  const double err = independence_error();
  if (err > tol)
    throw std::invalid_argument("joint table violates independence by " +
                                std::to_string(err));
}

RewardModel RewardModel::swapped() const {
  RewardModel m;
  m.rewards_ = rewards_;
  m.location_probs_ = location_probs_;
  m.conditional_[0] = conditional_[1];
  m.conditional_[1] = conditional_[0];
  m.points_ = points_;
  std::vector<JointCell> t;
  t.reserve(joint_.size());
  for (const auto& c : joint_) t.push_back({c.j, c.i, c.p});
  m.set_joint(std::move(t));
  return m;
}

// ---------------------------------------------------------------------------

RewardModel build_reward_model(const GeoScenario& scenario,
                               double merge_tolerance,
                               const LocationWeightFn& weight,
                               BuildReport* report) {
  scenario.validate();
  if (!(merge_tolerance >= 0))
    throw std::invalid_argument("merge_tolerance must be >= 0");
  const auto& radio = scenario.radio;
  const double s = scenario.grid_spacing_m;
  const double d = radio.range_m;

  const Point& v1 = scenario.forwarder_1;
  const Point& v2 = scenario.forwarder_2;
  const long ax0 = static_cast<long>(std::floor((std::min(v1.x, v2.x) - d) / s));
  const long ax1 = static_cast<long>(std::ceil((std::max(v1.x, v2.x) + d) / s));
  const long ay0 = static_cast<long>(std::floor((std::min(v1.y, v2.y) - d) / s));
  const long ay1 = static_cast<long>(std::ceil((std::max(v1.y, v2.y) + d) / s));

  auto in_region = [&](const Point& p, Forwarder f) {
    return distance(p, scenario.forwarder(f)) <= d &&
           compute_progress(p, f, scenario) >= 0;
  };

  // Per location, per forwarder: list of (reward, prob) before indexing.
  struct Draw {
    Reward r;
    double p;
  };
  std::vector<Point> points;
  std::vector<std::vector<Draw>> draws[2];
  int dropped = 0;
  for (long a = ax0; a <= ax1; ++a) {
    for (long b = ay0; b <= ay1; ++b) {
      const Point p{a * s, b * s};
      const bool in1 = in_region(p, Forwarder::kFirst);
      const bool in2 = in_region(p, Forwarder::kSecond);
      if (!in1 && !in2) continue;
      if (distance(p, v1) < radio.reference_distance_m ||
          distance(p, v2) < radio.reference_distance_m) {
        ++dropped;
        continue;
      }
      points.push_back(p);
      for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
        std::vector<Draw> row;
        if ((f == Forwarder::kFirst ? in1 : in2)) {
          const double z = compute_progress(p, f, scenario);
          const double dist = distance(p, scenario.forwarder(f));
          for (const auto& g : radio.gain_table)
            row.push_back({reward_value(z, required_power(dist, g.gain, radio),
                                        radio),
                           g.prob});
        } else {
          row.push_back({Reward::Infeasible(), 1.0});
        }
        draws[index_of(f)].push_back(std::move(row));
      }
    }
  }
  if (points.empty())
    throw std::invalid_argument("forwarding region is empty after discretization");

  std::vector<double> values;
  for (int r = 0; r < 2; ++r)
    for (const auto& row : draws[r])
      for (const auto& dr : row)
        if (dr.r.feasible()) values.push_back(dr.r.value());
  std::sort(values.begin(), values.end());
  // Chain merge: a group is a run of sorted values whose successive gaps are
  // <= tolerance, represented by its smallest member.
  std::vector<double> reps;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k == 0 || values[k] - values[k - 1] > merge_tolerance ||
        (merge_tolerance == 0 && values[k] != values[k - 1]))
      reps.push_back(values[k]);
  }
  auto index_of_value = [&](double v) -> int {
    auto it = std::upper_bound(reps.begin(), reps.end(), v);
    return static_cast<int>(it - reps.begin());  // +1 for sentinel, -1 for ub
  };

  const int L = static_cast<int>(points.size());
  std::vector<double> q(L);
  if (weight) {
    long double total = 0;
    for (int l = 0; l < L; ++l) {
      q[l] = weight(points[l]);
      if (!(q[l] >= 0)) throw std::invalid_argument("negative location weight");
      total += q[l];
    }
    if (!(total > 0)) throw std::invalid_argument("location weights sum to 0");
    for (auto& x : q) x = static_cast<double>(x / total);
  } else {
    std::fill(q.begin(), q.end(), 1.0 / L);
  }

  std::vector<std::vector<SparseEntry>> cond[2];
  for (int r = 0; r < 2; ++r) {
    cond[r].resize(L);
    for (int l = 0; l < L; ++l)
      for (const auto& dr : draws[r][l])
        cond[r][l].push_back(
            {dr.r.feasible() ? index_of_value(dr.r.value()) : 0, dr.p});
  }
  if (report) {
    report->dropped_near_forwarder = dropped;
    report->locations = L;
  }
  return RewardModel(std::move(reps), std::move(q), std::move(cond[0]),
                     std::move(cond[1]), std::move(points));
}

}  // namespace relaygame
