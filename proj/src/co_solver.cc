#include "relaygame/co_solver.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relaygame/errors.h"
#include "relaygame/fixed_point.h"

namespace relaygame {

std::string family_name(Family f) {
  switch (f) {
    case Family::kSC: return "SC";
    case Family::kCS: return "CS";
    case Family::kMixed: return "MIXED";
  }
  return "?";
}

std::string family_symbol(Family f) {
  switch (f) {
    case Family::kSC: return "star";
    case Family::kCS: return "circle";
    case Family::kMixed: return "square";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "SC" || s == "sc" || s == "star") return Family::kSC;
  if (s == "CS" || s == "cs" || s == "circle") return Family::kCS;
  if (s == "MIXED" || s == "mixed" || s == "square") return Family::kMixed;
  throw std::invalid_argument("unknown family '" + s + "'");
}

PolicyPairCO simple_policy(const RewardModel& model,
                           const std::array<double, 2>& alpha) {
  const auto& r = model.rewards();
  PolicyPairCO p;
  for (int k = 0; k < 2; ++k) {
    p.lone[k].resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      p.lone[k][i] = r[i].feasible() && r[i].value() >= alpha[k] ? 1.0 : 0.0;
  }
  auto lone = p.lone;
  p.joint = [lone](int i, int j) -> std::array<double, 2> {
    return {lone[0][i], lone[1][j]};
  };
  return p;
}

namespace {

double lone_continue_cost(const std::vector<double>& stop,
                          const std::vector<Reward>& r,
                          const std::vector<double>& pmf, double tau,
                          double eta, const char* who) {
  long double num = 0, cont_mass = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double s = stop[i];
    if (s < 0 || s > 1)
      throw std::invalid_argument("stopping probability outside [0,1]");
    if (s > 0 && !r[i].feasible())
      throw std::invalid_argument(std::string(who) +
                                  " stops on an INFEASIBLE relay");
    if (pmf[i] == 0) continue;
    if (s > 0) num += pmf[i] * s * (-eta * r[i].value());
    num += pmf[i] * (1 - s) * tau;
    cont_mass += pmf[i] * (1 - s);
  }
  const long double den = 1 - cont_mass;
  if (den <= 1e-14)
    throw SolverError(std::string(who) + " alone: infinite expected delay");
  return tau + static_cast<double>(num / den);
}

// Immediate part of J^1 at a joint state, i.e. everything except b * X.
double immediate_first(double s1, double s2, Reward r_i, double lone,
                       const GameConfig& cfg) {
  double a = (1 - s1) * (1 - s2) * cfg.tau + (1 - s1) * s2 * lone;
  if (s1 > 0) {
    const double stop = -cfg.eta_1 * r_i.value();
    a += s1 * (1 - s2) * stop + s1 * s2 * (cfg.nu_1 * stop + (1 - cfg.nu_1) * lone);
  }
  return a;
}

double immediate_second(double s1, double s2, Reward r_j, double lone,
                        const GameConfig& cfg) {
  double a = (1 - s1) * (1 - s2) * cfg.tau + (1 - s2) * s1 * lone;
  if (s2 > 0) {
    const double stop = -cfg.eta_2 * r_j.value();
    a += s2 * (1 - s1) * stop + s1 * s2 * ((1 - cfg.nu_1) * stop + cfg.nu_1 * lone);
  }
  return a;
}

}  // namespace

PolicyEvaluation evaluate_policy_pair(const PolicyPairCO& policy,
                                      const RewardModel& model,
                                      const GameConfig& config) {
  config.validate();
  const auto& r = model.rewards();
  PolicyEvaluation ev;
  ev.lone_continue[0] =
      lone_continue_cost(policy.lone[0], r, model.marginal(Forwarder::kFirst),
                         config.tau, config.eta_1, "F1");
  ev.lone_continue[1] =
      lone_continue_cost(policy.lone[1], r, model.marginal(Forwarder::kSecond),
                         config.tau, config.eta_2, "F2");
  long double a1 = 0, a2 = 0, bsum = 0;
  for (const auto& c : model.joint()) {
    const auto s = policy.joint(c.i, c.j);
    if (s[0] < 0 || s[0] > 1 || s[1] < 0 || s[1] > 1)
      throw std::invalid_argument("stopping probability outside [0,1]");
    if ((s[0] > 0 && !r[c.i].feasible()) || (s[1] > 0 && !r[c.j].feasible()))
      throw std::invalid_argument("policy stops on an INFEASIBLE relay");
    a1 += c.p * immediate_first(s[0], s[1], r[c.i], ev.lone_continue[0], config);
    a2 += c.p * immediate_second(s[0], s[1], r[c.j], ev.lone_continue[1], config);
    bsum += c.p * (1 - s[0]) * (1 - s[1]);
  }
  const long double den = 1 - bsum;
  if (den <= 1e-14) throw SolverError("infinite expected delay: nobody stops");
  ev.next_value = {static_cast<double>(a1 / den), static_cast<double>(a2 / den)};
  ev.cost = {config.tau + ev.next_value[0], config.tau + ev.next_value[1]};
  return ev;
}

CostPair state_values(const PolicyEvaluation& ev,
                      const std::array<double, 2>& s, Reward r_i, Reward r_j,
                      const GameConfig& config) {
  const double b = (1 - s[0]) * (1 - s[1]);
  return {immediate_first(s[0], s[1], r_i, ev.lone_continue[0], config) +
              b * ev.next_value[0],
          immediate_second(s[0], s[1], r_j, ev.lone_continue[1], config) +
              b * ev.next_value[1]};
}

CellOutcome cell_outcome(Reward r_i, Reward r_j, const CostPair& c,
                         const CostPair& d, const Thresholds& t, Family family,
                         const GameConfig& cfg) {
  CellOutcome o;
  o.region = classify_region(r_i, r_j, t);
  auto stop1 = [&] { return -cfg.eta_1 * r_i.value(); };
  auto stop2 = [&] { return -cfg.eta_2 * r_j.value(); };
  switch (coarse_region(o.region)) {
    case 1:
      o.sigma = {0, 0};
      o.value = {c[0], c[1]};
      break;
    case 2:
      o.sigma = {1, 0};
      o.value = {stop1(), d[1]};
      break;
    case 3:
      o.sigma = {0, 1};
      o.value = {d[0], stop2()};
      break;
    case 5:
      o.sigma = {1, 1};
      o.value = {contention_cost(Forwarder::kFirst, r_i, d[0], cfg),
                 contention_cost(Forwarder::kSecond, r_j, d[1], cfg)};
      break;
    case 4:
      switch (family) {
        case Family::kSC:
          o.sigma = {1, 0};
          o.value = {stop1(), d[1]};
          break;
        case Family::kCS:
          o.sigma = {0, 1};
          o.value = {d[0], stop2()};
          break;
        case Family::kMixed: {
          // A player whose C equals D is indifferent everywhere; the other
          // then simply continues.
          const bool live1 = t.zeta[0] < t.alpha[0];
          const bool live2 = t.zeta[1] < t.alpha[1];
          const double g1 =
              live2 ? indifference_prob(r_j, t.zeta[1], t.alpha[1],
                                        cfg.nu(Forwarder::kSecond))
                    : 0.0;
          const double g2 =
              live1 ? indifference_prob(r_i, t.zeta[0], t.alpha[0],
                                        cfg.nu(Forwarder::kFirst))
                    : 0.0;
          o.sigma = {g1, g2};
          o.value = {live1 ? g2 * d[0] + (1 - g2) * c[0] : c[0],
                     live2 ? g1 * d[1] + (1 - g1) * c[1] : c[1]};
          break;
        }
      }
      break;
  }
  return o;
}

CostPair apply_T(const CostPair& c, Family family, const RewardModel& model,
                 const CostPair& d, const GameConfig& config) {
  const Thresholds t = Thresholds::From(c, d, config);
  const auto& r = model.rewards();
  long double s1 = 0, s2 = 0;
  for (const auto& cell : model.joint()) {
    const auto o = cell_outcome(r[cell.i], r[cell.j], c, d, t, family, config);
    s1 += cell.p * o.value[0];
    s2 += cell.p * o.value[1];
  }
  return {config.tau + static_cast<double>(s1),
          config.tau + static_cast<double>(s2)};
}

namespace {

// T restricted to the current region assignment (and, for the mixed family,
// the current Gamma values) is affine: T_k = a_k + b_k C_k.
struct AffineMap {
  CostPair a{}, b{};
};

AffineMap linearize_T(const CostPair& c, Family family, const RewardModel& model,
                      const CostPair& d, const GameConfig& config) {
  const Thresholds t = Thresholds::From(c, d, config);
  const auto& r = model.rewards();
  long double a[2] = {0, 0}, b[2] = {0, 0};
  for (const auto& cell : model.joint()) {
    const auto o = cell_outcome(r[cell.i], r[cell.j], c, d, t, family, config);
    const int reg = coarse_region(o.region);
    for (int k = 0; k < 2; ++k) {
      if (reg == 1) {
        b[k] += cell.p;
      } else if (reg == 4 && family == Family::kMixed) {
        const double g = o.sigma[1 - k];  // opponent's stopping probability
        if (t.zeta[k] < t.alpha[k]) {
          a[k] += cell.p * g * d[k];
          b[k] += cell.p * (1 - g);
        } else {
          b[k] += cell.p;
        }
      } else {
        a[k] += cell.p * o.value[k];
      }
    }
  }
  AffineMap m;
  for (int k = 0; k < 2; ++k) {
    m.a[k] = config.tau + static_cast<double>(a[k]);
    m.b[k] = static_cast<double>(b[k]);
  }
  return m;
}

double sup_gap(const CostPair& x, const CostPair& y) {
  return std::max(std::abs(x[0] - y[0]), std::abs(x[1] - y[1]));
}

}  // namespace

// ---------------------------------------------------------------------------

CellOutcome CoNeppSolution::outcome(int i, int j) const {
  return cell_outcome(rewards[i], rewards[j], cost, d, thresholds, family,
                      config);
}

double CoNeppSolution::lone_stop_prob(Forwarder f, int i) const {
  const auto& r = rewards[i];
  return r.feasible() && r.value() >= alpha[index_of(f)] ? 1.0 : 0.0;
}

double CoNeppSolution::lone_value(Forwarder f, int i) const {
  const auto& r = rewards[i];
  const int k = index_of(f);
  if (lone_stop_prob(f, i) > 0) return -config.eta(f) * r.value();
  return d[k];
}

PolicyPairCO CoNeppSolution::policy() const {
  PolicyPairCO p;
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    auto& v = p.lone[index_of(f)];
    v.resize(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i)
      v[i] = lone_stop_prob(f, static_cast<int>(i));
  }
  CoNeppSolution self = *this;
  p.joint = [self](int i, int j) { return self.outcome(i, j).sigma; };
  return p;
}

CoNeppSolution CoNeppSolution::with_cost(const CostPair& c) const {
  CoNeppSolution s = *this;
  s.cost = c;
  s.thresholds = Thresholds::From(c, d, config);
  return s;
}

CoNeppSolution solve_nepp(const RewardModel& model, const GameConfig& config,
                          Family family, const CoSolverOptions& opts) {
  config.validate();
  if (!(opts.relaxation > 0 && opts.relaxation <= 1))
    throw std::invalid_argument("relaxation must lie in (0, 1]");
  CoNeppSolution sol;
  sol.family = family;
  sol.config = config;
  sol.rewards = model.rewards();
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    const auto sa = solve_threshold(model, config, f, opts.single);
    sol.alpha[index_of(f)] = sa.alpha;
    sol.d[index_of(f)] = sa.d_cost;
  }
  const CostPair& d = sol.d;
  // Start strictly below D, then lift onto {C >= D} for the first map; T
  // keeps later iterates there.
  CostPair c = {d[0] - config.tau, d[1] - config.tau};
  std::vector<double> trace;
  for (long k = 1;; ++k) {
    const CostPair in = {std::max(c[0], d[0]), std::max(c[1], d[1])};
    const CostPair t = apply_T(in, family, model, d, config);
    const double w = opts.relaxation;
    const CostPair next = {(1 - w) * in[0] + w * t[0], (1 - w) * in[1] + w * t[1]};
    const double res = std::max(std::abs(next[0] - c[0]), std::abs(next[1] - c[1]));
    c = next;
    trace.push_back(res);
    if (trace.size() > 64) trace.erase(trace.begin());
    if (k > 1 && res <= opts.tol) {
      sol.iterations = k;
      break;
    }
    if (k >= opts.max_iters)
      throw ConvergenceError("T iteration did not converge for family " +
                                 family_name(family),
                             trace);
  }
  // T keeps {C >= D} invariant; tiny rounding below D is clamped away.
  for (int k = 0; k < 2; ++k) {
    if (c[k] < d[k] - 1e-9 * std::max(1.0, std::abs(d[k])))
      throw SolverError("fixed point violates D <= C");
    c[k] = std::max(c[k], d[k]);
  }
  // Solve the affine restriction exactly; keep it only while it lowers the
  // fixed-point residual.
  double res = sup_gap(apply_T(c, family, model, d, config), c);
  for (int round = 0; round < 100 && res > 0; ++round) {
    const AffineMap m = linearize_T(c, family, model, d, config);
    if (!(m.b[0] < 1 && m.b[1] < 1)) break;
    const CostPair cand = {std::max(m.a[0] / (1 - m.b[0]), d[0]),
                           std::max(m.a[1] / (1 - m.b[1]), d[1])};
    const double cres = sup_gap(apply_T(cand, family, model, d, config), cand);
    if (!(cres < res)) break;
    c = cand;
    res = cres;
  }
  sol.residual = res;
  sol.cost = c;
  sol.thresholds = Thresholds::From(c, d, config);
  return sol;
}

// ---------------------------------------------------------------------------

namespace {

std::string state_name(const std::vector<Reward>& r, int i, int j) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ")";
  auto show = [&](int k) {
    if (r[k].feasible()) os << r[k].value(); else os << "INFEASIBLE";
  };
  os << " rewards (";
  show(i);
  os << ", ";
  show(j);
  os << ")";
  return os.str();
}

}  // namespace

VerificationReport verify_nepp(const CoNeppSolution& sol,
                               const RewardModel& model,
                               const GameConfig& config, double tol) {
  VerificationReport rep;
  rep.claimed = sol.cost;
  const auto& r = model.rewards();
  const int n = model.size();
  auto fail = [&](const std::string& msg) {
    rep.ok = false;
    if (rep.failures.size() < 20) rep.failures.push_back(msg);
  };
  for (int k = 0; k < 2; ++k)
    if (!(sol.d[k] <= sol.cost[k] + 1e-9))
      fail("D > C for F" + std::to_string(k + 1));

  const PolicyPairCO pol = sol.policy();
  const PolicyEvaluation ev = evaluate_policy_pair(pol, model, config);
  rep.evaluated = ev.cost;
  for (int k = 0; k < 2; ++k) {
    const double gap = std::abs(ev.cost[k] - sol.cost[k]);
    if (gap > tol)
      fail("claimed C" + std::to_string(k + 1) + " differs from its evaluation by " +
           std::to_string(gap));
  }

  // Lone best responses: optimal stopping against nobody.
  CostPair lone_best{};
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    const int k = index_of(f);
    std::vector<StopTerm> terms;
    const auto& pmf = model.marginal(f);
    for (int i = 0; i < n; ++i) {
      if (pmf[i] == 0) continue;
      terms.push_back({pmf[i], r[i].feasible(),
                       r[i].feasible() ? -config.eta(f) * r[i].value() : 0.0,
                       config.tau, 1.0});
    }
    const double y = stopping_fixed_point(terms, sol.d[k] - config.tau, 1000000);
    lone_best[k] = config.tau + y;
    const double gap = ev.lone_continue[k] - lone_best[k];
    rep.max_gain = std::max(rep.max_gain, gap);
    if (gap > tol || std::abs(lone_best[k] - sol.d[k]) > tol)
      fail("lone Bellman equation violated for F" + std::to_string(k + 1));
    for (int i = 0; i < n; ++i) {
      const double own = sol.lone_value(f, i);
      const double best = r[i].feasible()
                              ? std::min(-config.eta(f) * r[i].value(), lone_best[k])
                              : lone_best[k];
      if (own - best > tol)
        fail("F" + std::to_string(k + 1) + " alone deviates profitably at reward index " +
             std::to_string(i) + " by " + std::to_string(own - best));
    }
  }

  // Joint best responses against the fixed opponent policy.
  CostPair br_next{};
  for (int k = 0; k < 2; ++k) {
    const Forwarder f = k == 0 ? Forwarder::kFirst : Forwarder::kSecond;
    const double nu = config.nu(f), eta = config.eta(f), L = lone_best[k];
    std::vector<StopTerm> terms;
    terms.reserve(model.joint().size());
    for (const auto& c : model.joint()) {
      const auto s = pol.joint(c.i, c.j);
      const double so = s[1 - k];
      const Reward& own = r[k == 0 ? c.i : c.j];
      StopTerm t{c.p, own.feasible(), 0.0, (1 - so) * config.tau + so * L, 1 - so};
      if (own.feasible()) {
        const double st = -eta * own.value();
        t.stop = (1 - so) * st + so * (nu * st + (1 - nu) * L);
      }
      terms.push_back(t);
    }
    br_next[k] = stopping_fixed_point(terms, sol.cost[k] - config.tau, 1000000);
    rep.best_response[k] = config.tau + br_next[k];
    const double gain = ev.cost[k] - rep.best_response[k];
    rep.max_gain = std::max(rep.max_gain, gain);
    if (gain > tol)
      fail("F" + std::to_string(k + 1) + " gains " + std::to_string(gain) +
           " from deviating at time 0");
  }

  // Every state: value tables, no profitable deviation, stage-game NE.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto o = sol.outcome(i, j);
      const CostPair jp = state_values(ev, o.sigma, r[i], r[j], config);
      for (int k = 0; k < 2; ++k) {
        const double te = std::abs(jp[k] - o.value[k]);
        rep.max_table_error = std::max(rep.max_table_error, te);
        if (te > tol)
          fail("value table mismatch for F" + std::to_string(k + 1) + " at " +
               state_name(r, i, j));
        const Forwarder f = k == 0 ? Forwarder::kFirst : Forwarder::kSecond;
        const Reward& own = k == 0 ? r[i] : r[j];
        const double so = o.sigma[1 - k];
        const double L = lone_best[k];
        double best = (1 - so) * (config.tau + br_next[k]) + so * L;
        if (own.feasible()) {
          const double st = -config.eta(f) * own.value();
          best = std::min(best, (1 - so) * st +
                                    so * (config.nu(f) * st + (1 - config.nu(f)) * L));
        }
        const double gain = jp[k] - best;
        rep.max_gain = std::max(rep.max_gain, gain);
        if (gain > tol)
          fail("F" + std::to_string(k + 1) + " deviates profitably at " +
               state_name(r, i, j) + " gaining " + std::to_string(gain));
      }
      const StageGame g = build_stage_game(r[i], r[j], sol.cost, sol.d, config);
      const double gap = nash_gap(g, o.sigma[0], o.sigma[1]);
      rep.max_stage_gap = std::max(rep.max_stage_gap, gap);
      if (gap > tol)
        fail("played profile is not a stage NE at " + state_name(r, i, j));
    }
  }
  return rep;
}

}  // namespace relaygame
