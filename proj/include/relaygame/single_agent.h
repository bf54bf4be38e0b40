#ifndef RELAYGAME_SINGLE_AGENT_H_
#define RELAYGAME_SINGLE_AGENT_H_

#include <vector>

#include "relaygame/reward.h"
#include "relaygame/reward_model.h"

namespace relaygame {

// Costs are in milliseconds of delay; rewards are scaled by eta.
struct GameConfig {
  double tau = 10.0;
  double eta_1 = 100.0;
  double eta_2 = 100.0;
  double nu_1 = 0.5;

  double eta(Forwarder f) const {
    return f == Forwarder::kFirst ? eta_1 : eta_2;
  }
  double nu(Forwarder f) const {
    return f == Forwarder::kFirst ? nu_1 : 1.0 - nu_1;
  }
  void validate() const;
  GameConfig swapped() const { return {tau, eta_2, eta_1, 1.0 - nu_1}; }
};

struct SingleAgentSolution {
  double alpha = 0.0;
  double d_cost = 0.0;  // -eta * alpha, the cost of continuing alone
  long iterations = 0;
  double residual = 0.0;
};

struct SingleAgentOptions {
  double tol = 1e-10;
  long max_iters = 1000000;
};

// beta(x) = E[max{x, R}] - tau/eta, INFEASIBLE contributing x.
double beta(const std::vector<Reward>& rewards, const std::vector<double>& pmf,
            double tau_over_eta, double x);

SingleAgentSolution solve_threshold(const std::vector<Reward>& rewards,
                                    const std::vector<double>& pmf, double tau,
                                    double eta,
                                    const SingleAgentOptions& opts = {});

SingleAgentSolution solve_threshold(const RewardModel& model,
                                    const GameConfig& config, Forwarder f,
                                    const SingleAgentOptions& opts = {});

// J_k(r_i) = min{-eta r_i, tau + E J_{k-1}(R)} from J_0 = 0; INFEASIBLE
// entries can only continue. Returns J after `sweeps` sweeps.
std::vector<double> value_iteration_oracle(const std::vector<Reward>& rewards,
                                           const std::vector<double>& pmf,
                                           double tau, double eta, int sweeps);

}  // namespace relaygame

#endif  // RELAYGAME_SINGLE_AGENT_H_
