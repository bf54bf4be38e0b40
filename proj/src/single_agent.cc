#include "relaygame/single_agent.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaygame/errors.h"

namespace relaygame {

void GameConfig::validate() const {
  if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
  if (!(eta_1 > 0) || !(eta_2 > 0))
    throw std::invalid_argument("eta must be positive");
  if (!(nu_1 > 0 && nu_1 < 1))
    throw std::invalid_argument("nu_1 must lie strictly inside (0, 1)");
}

double beta(const std::vector<Reward>& rewards, const std::vector<double>& pmf,
            double tau_over_eta, double x) {
  double e = 0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (pmf[i] == 0) continue;
    e += pmf[i] * (rewards[i].above(x) ? rewards[i].value() : x);
  }
  return e - tau_over_eta;
}

namespace {

// On the segment where the set {r_i > x} is fixed, beta is affine and the
// fixed point solves x * P = sum p r - c. Returns the candidate if it lands
// back on the segment it was computed from.
bool polish(const std::vector<Reward>& rewards, const std::vector<double>& pmf,
            double c, double x, double* out) {
  long double mass = 0, first = 0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (pmf[i] > 0 && rewards[i].above(x)) {
      mass += pmf[i];
      first += pmf[i] * rewards[i].value();
    }
  }
  if (mass <= 0) return false;
  const double cand = static_cast<double>((first - c) / mass);
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (pmf[i] == 0) continue;
    if (rewards[i].above(x) != rewards[i].above(cand)) return false;
  }
  *out = cand;
  return true;
}

}  // namespace

SingleAgentSolution solve_threshold(const std::vector<Reward>& rewards,
                                    const std::vector<double>& pmf, double tau,
                                    double eta,
                                    const SingleAgentOptions& opts) {
  if (rewards.size() != pmf.size())
    throw std::invalid_argument("reward and pmf sizes differ");
  if (!(tau > 0) || !(eta > 0))
    throw std::invalid_argument("tau and eta must be positive");
  double lo = 0, hi = 0;
  bool any = false;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (pmf[i] > 0 && rewards[i].feasible()) {
      const double v = rewards[i].value();
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (!any) throw SolverError("no feasible relay ever");

  const double c = tau / eta;
  double x = lo - c;
  SingleAgentSolution sol;
  std::vector<double> trace;
  for (sol.iterations = 1;; ++sol.iterations) {
    const double nx = beta(rewards, pmf, c, x);
    const double step = std::abs(nx - x);
    x = nx;
    if (step <= opts.tol) break;
    if (sol.iterations >= opts.max_iters) {
      trace.push_back(step);
      throw ConvergenceError("single-agent iteration did not converge", trace);
    }
  }
  double best = x;
  double best_res = std::abs(beta(rewards, pmf, c, x) - x);
  double cand;
  if (polish(rewards, pmf, c, x, &cand)) {
    const double r = std::abs(beta(rewards, pmf, c, cand) - cand);
    if (r <= best_res) {
      best = cand;
      best_res = r;
    }
  }
  sol.alpha = std::min(best, hi);
  sol.residual = best_res;
  sol.d_cost = -eta * sol.alpha;
  return sol;
}

SingleAgentSolution solve_threshold(const RewardModel& model,
                                    const GameConfig& config, Forwarder f,
                                    const SingleAgentOptions& opts) {
  return solve_threshold(model.rewards(), model.marginal(f), config.tau,
                         config.eta(f), opts);
}

std::vector<double> value_iteration_oracle(const std::vector<Reward>& rewards,
                                           const std::vector<double>& pmf,
                                           double tau, double eta, int sweeps) {
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  std::vector<double> j(rewards.size(), 0.0);
  for (int k = 0; k < sweeps; ++k) {
    double ej = 0;
    for (std::size_t i = 0; i < rewards.size(); ++i) ej += pmf[i] * j[i];
    const double cont = tau + ej;
    for (std::size_t i = 0; i < rewards.size(); ++i)
      j[i] = rewards[i].feasible() ? std::min(-eta * rewards[i].value(), cont)
                                   : cont;
  }
  return j;
}

}  // namespace relaygame
