#ifndef RELAYGAME_TESTS_SUPPORT_H_
#define RELAYGAME_TESTS_SUPPORT_H_

#include <algorithm>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "relaygame/reward_model.h"
#include "relaygame/single_agent.h"

namespace testsupport {

using namespace relaygame;

inline std::vector<double> random_rewards(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(0.5, 10.0);
  std::vector<double> v;
  while (static_cast<int>(v.size()) < count) {
    const double x = u(rng);
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<double> random_pmf(std::mt19937_64& rng, int count, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> p(count);
  double s = 0;
  for (auto& x : p) s += (x = u(rng));
  for (auto& x : p) x /= s;
  return p;
}

// Random reward model with n total indices (index 0 INFEASIBLE), `locs`
// locations and sparse per-location conditionals.
inline RewardModel random_location_model(std::mt19937_64& rng, int n, int locs,
                                         bool with_infeasible = true) {
  const auto finite = random_rewards(rng, n - 1);
  const auto q = random_pmf(rng, locs);
  std::vector<std::vector<SparseEntry>> c[2];
  std::bernoulli_distribution keep(0.6);
  for (int f = 0; f < 2; ++f)
    for (int l = 0; l < locs; ++l) {
      std::vector<int> idx;
      for (int i = with_infeasible ? 0 : 1; i < n; ++i)
        if (keep(rng)) idx.push_back(i);
      if (idx.empty() || (idx.size() == 1 && idx[0] == 0)) idx.push_back(n - 1);
      const auto p = random_pmf(rng, static_cast<int>(idx.size()));
      std::vector<SparseEntry> e;
      for (std::size_t k = 0; k < idx.size(); ++k) e.push_back({idx[k], p[k]});
      c[f].push_back(e);
    }
  return RewardModel(finite, q, c[0], c[1]);
}

// Random joint table without any location structure.
inline RewardModel random_joint_model(std::mt19937_64& rng, int n) {
  const auto finite = random_rewards(rng, n - 1);
  const auto p = random_pmf(rng, n * n, 0.0);
  std::vector<JointCell> cells;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cells.push_back({i, j, p[i * n + j]});
  return RewardModel::FromJoint(finite, cells);
}

inline GameConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> tau(0.2, 3.0), eta(0.5, 5.0), nu(0.1, 0.9);
  return {tau(rng), eta(rng), eta(rng), nu(rng)};
}

inline std::vector<double> read_hex_doubles(const std::string& path) {
  std::ifstream in(path);
  std::vector<double> out;
  for (std::string tok; in >> tok;) out.push_back(std::strtod(tok.c_str(), nullptr));
  return out;
}

}  // namespace testsupport

#endif  // RELAYGAME_TESTS_SUPPORT_H_
