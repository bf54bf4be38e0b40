#include "relaygame/coop_solver.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaygame/errors.h"
#include "relaygame/fixed_point.h"

namespace relaygame {

namespace {

double weight(Forwarder f, double gamma) {
  return f == Forwarder::kFirst ? gamma : 1 - gamma;
}

std::vector<StopTerm> lone_terms(const RewardModel& model, const GameConfig& cfg,
                                 Forwarder f, double gamma) {
  const double w = weight(f, gamma);
  std::vector<StopTerm> terms;
  const auto& pmf = model.marginal(f);
  for (int i = 0; i < model.size(); ++i) {
    if (pmf[i] == 0) continue;
    const Reward& r = model.reward(i);
    terms.push_back({pmf[i], r.feasible(),
                     r.feasible() ? -w * cfg.eta(f) * r.value() : 0.0, w * cfg.tau,
                     1.0});
  }
  return terms;
}

}  // namespace

CoopStateCosts CoopSolution::state_costs(int i, int j) const {
  const double g = gamma;
  CoopStateCosts s;
  const Reward& ri = rewards[i];
  const Reward& rj = rewards[j];
  if (ri.feasible()) s.sc = -g * config.eta_1 * ri.value() + (1 - g) * config.tau + y[1];
  if (rj.feasible()) s.cs = g * config.tau - (1 - g) * config.eta_2 * rj.value() + y[0];
  s.cc = config.tau + x;
  if (s.sc && s.cs) s.ss = config.nu_1 * *s.sc + (1 - config.nu_1) * *s.cs;
  return s;
}

JointAction CoopSolution::action(int i, int j) const {
  const auto s = state_costs(i, j);
  if (s.sc && *s.sc <= s.cc && (!s.cs || *s.sc <= *s.cs))
    return JointAction::kStopContinue;
  if (s.cs && *s.cs <= s.cc) return JointAction::kContinueStop;
  return JointAction::kContinueContinue;
}

double CoopSolution::value(int i, int j) const {
  const auto s = state_costs(i, j);
  double v = s.cc;
  if (s.sc) v = std::min(v, *s.sc);
  if (s.cs) v = std::min(v, *s.cs);
  return v;
}

bool CoopSolution::lone_stops(Forwarder f, int i) const {
  const Reward& r = rewards[i];
  if (!r.feasible()) return false;
  const double w = weight(f, gamma);
  return -w * config.eta(f) * r.value() <= w * config.tau + y[index_of(f)];
}

double CoopSolution::lone_value(Forwarder f, int i) const {
  const double w = weight(f, gamma);
  const double cont = w * config.tau + y[index_of(f)];
  if (!lone_stops(f, i)) return cont;
  return -w * config.eta(f) * rewards[i].value();
}

PolicyPairCO CoopSolution::policy() const {
  PolicyPairCO p;
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    auto& v = p.lone[index_of(f)];
    v.resize(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i)
      v[i] = lone_stops(f, static_cast<int>(i)) ? 1.0 : 0.0;
  }
  CoopSolution self = *this;
  p.joint = [self](int i, int j) -> std::array<double, 2> {
    switch (self.action(i, j)) {
      case JointAction::kStopContinue: return {1.0, 0.0};
      case JointAction::kContinueStop: return {0.0, 1.0};
      default: return {0.0, 0.0};
    }
  };
  return p;
}

CoopSolution coop_value_iteration(const RewardModel& model,
                                  const GameConfig& config, double gamma,
                                  const CoopOptions& opts) {
  config.validate();
  if (!(gamma > 0 && gamma < 1))
    throw std::invalid_argument("gamma must lie strictly inside (0, 1)");
  bool any = false;
  for (const auto& c : model.joint())
    if (model.reward(c.i).feasible() || model.reward(c.j).feasible()) any = true;
  if (!any) throw SolverError("every relay is INFEASIBLE");

  CoopSolution sol;
  sol.gamma = gamma;
  sol.rewards = model.rewards();
  sol.config = config;
  const auto t1 = lone_terms(model, config, Forwarder::kFirst, gamma);
  const auto t2 = lone_terms(model, config, Forwarder::kSecond, gamma);

  // Joint terms depend on y, so they are rebuilt every sweep.
  auto joint_terms = [&](const CoopSolution& s) {
    std::vector<StopTerm> terms;
    terms.reserve(model.joint().size());
    for (const auto& c : model.joint()) {
      const auto sc = s.state_costs(c.i, c.j);
      StopTerm t{c.p, sc.sc || sc.cs, 0.0, config.tau, 1.0};
      if (sc.sc && sc.cs)
        t.stop = std::min(*sc.sc, *sc.cs);
      else if (sc.sc)
        t.stop = *sc.sc;
      else if (sc.cs)
        t.stop = *sc.cs;
      terms.push_back(t);
    }
    return terms;
  };

  std::vector<double> trace;
  for (long k = 1;; ++k) {
    // Each sweep is followed by a Newton step on the active piece of the
    // scalar equation; X is updated with the new Y.
    CoopSolution next = sol;
    next.y = {polish_stopping_fixed_point(t1, stopping_rhs(t1, sol.y[0])),
              polish_stopping_fixed_point(t2, stopping_rhs(t2, sol.y[1]))};
    const auto jt_k = joint_terms(next);
    next.x = polish_stopping_fixed_point(jt_k, stopping_rhs(jt_k, sol.x));
    const double step =
        std::max({std::abs(next.x - sol.x) / (1 + std::abs(next.x)),
                  std::abs(next.y[0] - sol.y[0]) / (1 + std::abs(next.y[0])),
                  std::abs(next.y[1] - sol.y[1]) / (1 + std::abs(next.y[1]))});
    sol.x = next.x;
    sol.y = next.y;
    trace.push_back(step);
    if (trace.size() > 64) trace.erase(trace.begin());
    if (step <= opts.tol) {
      sol.iterations = k;
      break;
    }
    if (k >= opts.max_iters)
      throw ConvergenceError("cooperative value iteration did not converge", trace);
  }
  sol.y = {polish_stopping_fixed_point(t1, sol.y[0]),
           polish_stopping_fixed_point(t2, sol.y[1])};
  const auto jt = joint_terms(sol);
  sol.x = polish_stopping_fixed_point(jt, sol.x);
  sol.residual = std::max({std::abs(stopping_rhs(jt, sol.x) - sol.x),
                           std::abs(stopping_rhs(t1, sol.y[0]) - sol.y[0]),
                           std::abs(stopping_rhs(t2, sol.y[1]) - sol.y[1])});
  sol.weighted_cost = config.tau + sol.x;
  sol.cost = evaluate_policy_pair(sol.policy(), model, config).cost;
  return sol;
}

std::vector<ParetoPoint> pareto_sweep(const RewardModel& model,
                                      const GameConfig& config,
                                      std::vector<double> gammas,
                                      const CoopOptions& opts) {
  if (gammas.empty()) throw std::invalid_argument("gamma grid is empty");
  std::sort(gammas.begin(), gammas.end());
  std::vector<ParetoPoint> out;
  for (double g : gammas) {
    const auto s = coop_value_iteration(model, config, g, opts);
    if (!out.empty() && out.back().cost == s.cost) continue;
    out.push_back({g, s.cost});
  }
  return out;
}

}  // namespace relaygame
