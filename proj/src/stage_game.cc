#include "relaygame/stage_game.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaygame {

Thresholds Thresholds::From(const CostPair& c, const CostPair& d,
                            const GameConfig& config) {
  Thresholds t;
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    const int k = index_of(f);
    t.zeta[k] = c[k] / -config.eta(f);
    t.alpha[k] = d[k] / -config.eta(f);
  }
  return t;
}

double contention_cost(Forwarder f, Reward own, double d_own,
                       const GameConfig& config) {
  return config.nu(f) * (-config.eta(f) * own.value()) +
         config.nu(other(f)) * d_own;
}

StageGame build_stage_game(Reward r_i, Reward r_j, const CostPair& c,
                           const CostPair& d, const GameConfig& config) {
  StageGame g;
  constexpr int C = 0, S = 1;
  g.stop_forbidden = {!r_i.feasible(), !r_j.feasible()};
  auto& a = g.cost[0];
  auto& b = g.cost[1];
  a[C][C] = c[0];
  b[C][C] = c[1];
  a[C][S] = d[0];
  b[S][C] = d[1];
  if (r_i.feasible()) {
    a[S][C] = -config.eta_1 * r_i.value();
    a[S][S] = contention_cost(Forwarder::kFirst, r_i, d[0], config);
  }
  if (r_j.feasible()) {
    b[C][S] = -config.eta_2 * r_j.value();
    b[S][S] = contention_cost(Forwarder::kSecond, r_j, d[1], config);
  }
  return g;
}

int coarse_region(Region r) {
  switch (r) {
    case Region::kR1:
      return 1;
    case Region::kR2a:
    case Region::kR2b:
    case Region::kR2c:
      return 2;
    case Region::kR3a:
    case Region::kR3b:
    case Region::kR3c:
      return 3;
    case Region::kR4:
      return 4;
    case Region::kR5:
      return 5;
  }
  return 0;
}

std::string region_name(Region r) {
  switch (r) {
    case Region::kR1: return "R1";
    case Region::kR2a: return "R2a";
    case Region::kR2b: return "R2b";
    case Region::kR2c: return "R2c";
    case Region::kR3a: return "R3a";
    case Region::kR3b: return "R3b";
    case Region::kR3c: return "R3c";
    case Region::kR4: return "R4";
    case Region::kR5: return "R5";
  }
  return "?";
}

namespace {

// 0: below zeta, 1: in [zeta, alpha], 2: above alpha.
int band(Reward r, double zeta, double alpha) {
  if (r.below(zeta)) return 0;
  if (r.above(alpha)) return 2;
  return 1;
}

}  // namespace

Region classify_region(Reward r_i, Reward r_j, const Thresholds& t) {
  for (int k = 0; k < 2; ++k)
    if (!(t.zeta[k] <= t.alpha[k]))
      throw std::invalid_argument("thresholds unordered: zeta > alpha");
  static constexpr Region table[3][3] = {
      {Region::kR1, Region::kR3a, Region::kR3b},
      {Region::kR2a, Region::kR4, Region::kR3c},
      {Region::kR2b, Region::kR2c, Region::kR5}};
  return table[band(r_i, t.zeta[0], t.alpha[0])]
              [band(r_j, t.zeta[1], t.alpha[1])];
}

// Written in threshold units so r = zeta and r = alpha give exactly 0 and 1.
double indifference_prob(Reward r, double zeta, double alpha, double nu_r) {
  if (!(zeta < alpha))
    throw std::invalid_argument("mixed strategy needs D strictly below C");
  if (!r.feasible())
    throw std::invalid_argument("mixed strategy at an INFEASIBLE reward");
  const double num = zeta - r.value();
  const double den = num - nu_r * (alpha - r.value());
  if (den == 0) throw std::domain_error("mixed strategy denominator is zero");
  return std::clamp(num / den, 0.0, 1.0);
}

std::array<double, 2> mixed_strategy_probs(Reward r_i, Reward r_j,
                                           const Thresholds& t,
                                           const GameConfig& config) {
  return {indifference_prob(r_j, t.zeta[1], t.alpha[1],
                            config.nu(Forwarder::kSecond)),
          indifference_prob(r_i, t.zeta[0], t.alpha[0],
                            config.nu(Forwarder::kFirst))};
}

std::array<double, 2> mixed_strategy_probs(Reward r_i, Reward r_j,
                                           const CostPair& c, const CostPair& d,
                                           const GameConfig& config) {
  return mixed_strategy_probs(r_i, r_j, Thresholds::From(c, d, config), config);
}

// ---------------------------------------------------------------------------

CostPair profile_costs(const StageGame& g, double s1, double s2) {
  CostPair out{};
  for (int k = 0; k < 2; ++k) {
    double v = 0;
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2) {
        const double w = (a1 ? s1 : 1 - s1) * (a2 ? s2 : 1 - s2);
        if (w != 0) v += w * g.cost[k][a1][a2];
      }
    out[k] = v;
  }
  return out;
}

double nash_gap(const StageGame& g, double s1, double s2) {
  constexpr double kHuge = std::numeric_limits<double>::max();
  if ((g.stop_forbidden[0] && s1 > 0) || (g.stop_forbidden[1] && s2 > 0))
    return kHuge;
  const CostPair cur = profile_costs(g, s1, s2);
  double gap = 0;
  for (int a = 0; a < 2; ++a) {
    if (!(a == 1 && g.stop_forbidden[0]))
      gap = std::max(gap, cur[0] - profile_costs(g, a, s2)[0]);
    if (!(a == 1 && g.stop_forbidden[1]))
      gap = std::max(gap, cur[1] - profile_costs(g, s1, a)[1]);
  }
  return gap;
}

namespace {

// Stop-minus-continue cost for one player as an affine function of the
// opponent's stopping probability: delta(s) = a + b s.
struct Incentive {
  bool forbidden = false;
  double at0 = 0, at1 = 0;  // exact values at s = 0 and s = 1
  double a = 0, b = 0;

  bool has_root() const { return !forbidden && b != 0; }
  double root() const { return -a / b; }
  double at(double s) const { return s == 0 ? at0 : s == 1 ? at1 : a + b * s; }
};

Incentive incentive(const StageGame& g, int k) {
  Incentive in;
  in.forbidden = g.stop_forbidden[k];
  if (in.forbidden) return in;
  auto cost = [&](int own, int opp) {
    return k == 0 ? g.cost[0][own][opp] : g.cost[1][opp][own];
  };
  in.at0 = cost(1, 0) - cost(0, 0);
  in.at1 = cost(1, 1) - cost(0, 1);
  in.a = in.at0;
  in.b = in.at1 - in.at0;
  return in;
}

// A cell of [0,1]: either a point or an open interval.
struct Cell {
  double lo, hi;
  bool point;
  bool root;  // point sitting exactly on the incentive root
};

std::vector<Cell> cells_for(const Incentive& in) {
  std::vector<double> pts = {0.0, 1.0};
  double r = -1;
  if (in.has_root()) {
    const double x = in.root();
    if (x > 0 && x < 1) {
      r = x;
      pts.push_back(r);
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    cells.push_back({pts[k], pts[k], true, pts[k] == r});
    if (k + 1 < pts.size()) cells.push_back({pts[k], pts[k + 1], false, false});
  }
  return cells;
}

// Sign of the incentive over an opponent cell: -1 stop, +1 continue, 0 any.
int sign_over(const Incentive& in, const Cell& c) {
  if (in.forbidden) return 1;
  double v;
  if (c.point) {
    if (c.root) return 0;
    v = in.at(c.lo);
  } else {
    v = in.at(0.5 * (c.lo + c.hi));
  }
  return v < 0 ? -1 : v > 0 ? 1 : 0;
}

// Whether every own-probability in `own` is a best response under `sign`.
bool cell_is_best(int sign, const Cell& own) {
  if (sign == 0) return true;
  const double target = sign < 0 ? 1.0 : 0.0;
  return own.point && own.lo == target;
}

}  // namespace

StageEquilibria stage_nash_oracle(const StageGame& g) {
  const Incentive in1 = incentive(g, 0);  // F1's incentive over sigma_2
  const Incentive in2 = incentive(g, 1);  // F2's incentive over sigma_1
  // sigma_1 cells come from F2's breakpoints and vice versa.
  const auto cells1 = cells_for(in2);
  const auto cells2 = cells_for(in1);
  StageEquilibria eq;
  for (const auto& c1 : cells1) {
    for (const auto& c2 : cells2) {
      if (!cell_is_best(sign_over(in1, c2), c1)) continue;
      if (!cell_is_best(sign_over(in2, c1), c2)) continue;
      NePiece p;
      p.lo = {c1.lo, c2.lo};
      p.hi = {c1.hi, c2.hi};
      p.open = {!c1.point, !c2.point};
      eq.pieces.push_back(p);
    }
  }
  return eq;
}

std::vector<std::array<Action, 2>> StageEquilibria::pure() const {
  std::vector<std::array<Action, 2>> out;
  for (const auto& p : pieces) {
    if (!p.is_point()) continue;
    auto is01 = [](double v) { return v == 0.0 || v == 1.0; };
    if (is01(p.lo[0]) && is01(p.lo[1]))
      out.push_back({p.lo[0] == 1 ? Action::kStop : Action::kContinue,
                     p.lo[1] == 1 ? Action::kStop : Action::kContinue});
  }
  return out;
}

std::vector<std::array<double, 2>> StageEquilibria::mixed() const {
  std::vector<std::array<double, 2>> out;
  for (const auto& p : pieces) {
    if (!p.is_point()) continue;
    auto interior = [](double v) { return v > 0.0 && v < 1.0; };
    if (interior(p.lo[0]) || interior(p.lo[1])) out.push_back(p.lo);
  }
  return out;
}

bool StageEquilibria::has_continuum() const {
  return std::any_of(pieces.begin(), pieces.end(),
                     [](const NePiece& p) { return !p.is_point(); });
}

RegionPrediction region_equilibria(Reward r_i, Reward r_j, const Thresholds& t,
                                   const GameConfig& config) {
  using A = Action;
  RegionPrediction out;
  switch (coarse_region(classify_region(r_i, r_j, t))) {
    case 1:
      out.pure = {{A::kContinue, A::kContinue}};
      break;
    case 2:
      out.pure = {{A::kStop, A::kContinue}};
      break;
    case 3:
      out.pure = {{A::kContinue, A::kStop}};
      break;
    case 4:
      out.pure = {{A::kStop, A::kContinue}, {A::kContinue, A::kStop}};
      out.mixed = {mixed_strategy_probs(r_i, r_j, t, config)};
      break;
    case 5:
      out.pure = {{A::kStop, A::kStop}};
      break;
  }
  return out;
}

}  // namespace relaygame
