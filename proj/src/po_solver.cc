#include "relaygame/po_solver.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaygame/errors.h"

namespace relaygame {

std::string variant_name(Variant v) {
  return v == Variant::kNabla ? "NABLA" : "DELTA";
}

Variant parse_variant(const std::string& s) {
  if (s == "NABLA" || s == "nabla") return Variant::kNabla;
  if (s == "DELTA" || s == "delta") return Variant::kDelta;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

double continue_prob(int threshold, const std::vector<SparseEntry>& cond) {
  long double g = 0;
  for (const auto& e : cond) {
    if (e.index >= threshold) break;
    g += e.p;
  }
  return std::min(1.0, static_cast<double>(g));
}

StageCosts stage_costs(Reward r, double g, double c_bar, double d,
                       const GameConfig& config, Forwarder role) {
  StageCosts out;
  out.cont = g * c_bar + (1 - g) * d;
  if (r.feasible())
    out.stop = g * (-config.eta(role) * r.value()) +
               (1 - g) * contention_cost(role, r, d, config);
  return out;
}

namespace {

// Stop-minus-continue cost divided by eta, in reward units. Nonincreasing in
// r for every g, which makes best responses thresholds.
struct Incentive {
  double g, zeta_bar, alpha, nu;
  double at(double r) const {
    return g * (zeta_bar - r) + (1 - g) * nu * (alpha - r);
  }
};

Incentive make_incentive(int opponent_threshold, int location, Forwarder role,
                         const PoContext& ctx) {
  const int k = index_of(role);
  const double g =
      continue_prob(opponent_threshold, ctx.model.conditional(other(role), location));
  const double eta = ctx.config.eta(role);
  return {g, ctx.c_bar[k] / -eta, ctx.d[k] / -eta, ctx.config.nu(role)};
}

}  // namespace

int best_response_threshold(int opponent_threshold, int location,
                            Forwarder role, const PoContext& ctx) {
  const Incentive in = make_incentive(opponent_threshold, location, role, ctx);
  const auto& r = ctx.model.rewards();
  int lo = 1, hi = ctx.model.size();  // first index in [lo, hi) that stops
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (in.at(r[mid].value()) <= 0)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

int best_response_threshold_scan(int opponent_threshold, int location,
                                 Forwarder role, const PoContext& ctx) {
  const Incentive in = make_incentive(opponent_threshold, location, role, ctx);
  const auto& r = ctx.model.rewards();
  int count = 0;
  for (const auto& ri : r)
    if (!ri.feasible() || in.at(ri.value()) > 0) ++count;
  return count;
}

namespace {

// Image of a threshold set under a best-response map. The response only
// depends on the continuation probability, so each distinct value is
// evaluated once.
std::vector<int> image(const std::vector<int>& set, int location, Forwarder role,
                       const PoContext& ctx) {
  const auto& cond = ctx.model.conditional(other(role), location);
  std::vector<int> out;
  double last_g = -1;
  int last_br = -1;
  for (int t : set) {
    const double g = continue_prob(t, cond);
    if (g != last_g) {
      last_g = g;
      last_br = best_response_threshold(t, location, role, ctx);
    }
    out.push_back(last_br);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Elimination inductive_elimination(int location, const PoContext& ctx) {
  const int n = ctx.model.size();
  Elimination e;
  e.a.resize(n + 1);
  for (int k = 0; k <= n; ++k) e.a[k] = k;
  // The first image only depends on which continuation probabilities occur
  // in {0..n}; one representative threshold per value is enough.
  std::vector<int> reps = {0};
  for (const auto& en : ctx.model.conditional(Forwarder::kFirst, location))
    reps.push_back(en.index + 1);
  for (int step = 1; step <= n; ++step) {
    auto b = image(step == 1 ? reps : e.a, location, Forwarder::kSecond, ctx);
    auto a = image(b, location, Forwarder::kFirst, ctx);
    const bool stable = a == e.a && b == e.b;
    e.a = std::move(a);
    e.b = std::move(b);
    e.steps = step;
    if (stable) break;
  }
  if (e.a.size() != e.b.size() || e.a.empty())
    throw SolverError("threshold elimination produced unmatched sets at location " +
                      std::to_string(location));
  const std::size_t N = e.a.size();
  for (std::size_t t = 0; t < N; ++t) e.pairs.push_back({e.a[t], e.b[N - 1 - t]});
  return e;
}

std::vector<std::pair<int, int>> exhaustive_ne_oracle(int location,
                                                      const PoContext& ctx) {
  std::vector<std::pair<int, int>> out;
  for (int psi = 0; psi <= ctx.model.size(); ++psi) {
    const int phi = best_response_threshold_scan(psi, location, Forwarder::kFirst, ctx);
    if (best_response_threshold_scan(phi, location, Forwarder::kSecond, ctx) == psi)
      out.push_back({phi, psi});
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double location_stage_sum(Forwarder f, int location, int opp_threshold,
                          const PoContext& ctx) {
  const int k = index_of(f);
  const double g =
      continue_prob(opp_threshold, ctx.model.conditional(other(f), location));
  long double s = 0;
  for (const auto& e : ctx.model.conditional(f, location)) {
    const auto sc = stage_costs(ctx.model.reward(e.index), g, ctx.c_bar[k],
                                ctx.d[k], ctx.config, f);
    s += e.p * (sc.stop ? std::min(*sc.stop, sc.cont) : sc.cont);
  }
  return static_cast<double>(s);
}

struct AffineMap {
  CostPair a{}, b{};
};

std::pair<int, int> pick(const Elimination& e, Variant v) {
  return v == Variant::kNabla ? e.pairs.front() : e.pairs.back();
}

CostPair t_bar(const PoContext& ctx, Variant variant,
               std::vector<std::pair<int, int>>* chosen) {
  long double s1 = 0, s2 = 0;
  if (chosen) chosen->clear();
  for (int l = 0; l < ctx.model.num_locations(); ++l) {
    const auto [phi, psi] = pick(inductive_elimination(l, ctx), variant);
    if (chosen) chosen->push_back({phi, psi});
    const double q = ctx.model.location_prob(l);
    s1 += q * location_stage_sum(Forwarder::kFirst, l, psi, ctx);
    s2 += q * location_stage_sum(Forwarder::kSecond, l, phi, ctx);
  }
  return {ctx.config.tau + static_cast<double>(s1),
          ctx.config.tau + static_cast<double>(s2)};
}

AffineMap linearize_T_bar(const PoContext& ctx, Variant variant) {
  long double a[2] = {0, 0}, b[2] = {0, 0};
  for (int l = 0; l < ctx.model.num_locations(); ++l) {
    const auto [phi, psi] = pick(inductive_elimination(l, ctx), variant);
    const double q = ctx.model.location_prob(l);
    for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
      const int k = index_of(f);
      const double g = continue_prob(f == Forwarder::kFirst ? psi : phi,
                                     ctx.model.conditional(other(f), l));
      for (const auto& e : ctx.model.conditional(f, l)) {
        const auto sc = stage_costs(ctx.model.reward(e.index), g, ctx.c_bar[k],
                                    ctx.d[k], ctx.config, f);
        if (sc.stop && *sc.stop <= sc.cont) {
          a[k] += q * e.p * *sc.stop;
        } else {
          a[k] += q * e.p * (1 - g) * ctx.d[k];
          b[k] += q * e.p * g;
        }
      }
    }
  }
  AffineMap m;
  for (int k = 0; k < 2; ++k) {
    m.a[k] = ctx.config.tau + static_cast<double>(a[k]);
    m.b[k] = static_cast<double>(b[k]);
  }
  return m;
}

double sup_gap(const CostPair& x, const CostPair& y) {
  return std::max(std::abs(x[0] - y[0]), std::abs(x[1] - y[1]));
}

}  // namespace

CostPair apply_T_bar(const CostPair& c_bar, Variant variant,
                     const RewardModel& model, const CostPair& d,
                     const GameConfig& config) {
  return t_bar(PoContext{model, config, c_bar, d}, variant, nullptr);
}

double PoNeppSolution::stage_value(Forwarder f, int index, int location,
                                   const RewardModel& model,
                                   const GameConfig& config) const {
  const int k = index_of(f);
  const auto [phi, psi] = thresholds.at(location);
  const double g = continue_prob(f == Forwarder::kFirst ? psi : phi,
                                 model.conditional(other(f), location));
  const auto sc = stage_costs(model.reward(index), g, cost[k], d[k], config, f);
  return sc.stop ? std::min(*sc.stop, sc.cont) : sc.cont;
}

PoNeppSolution solve_po_nepp(const RewardModel& model, const GameConfig& config,
                             Variant variant, const CoSolverOptions& opts) {
  config.validate();
  const double dep = model.independence_error();
  if (dep > 1e-9)
    throw std::invalid_argument("model violates the independence condition by " +
                                std::to_string(dep));
  if (!(opts.relaxation > 0 && opts.relaxation <= 1))
    throw std::invalid_argument("relaxation must lie in (0, 1]");
  PoNeppSolution sol;
  sol.variant = variant;
  for (Forwarder f : {Forwarder::kFirst, Forwarder::kSecond}) {
    const auto sa = solve_threshold(model, config, f, opts.single);
    sol.alpha[index_of(f)] = sa.alpha;
    sol.d[index_of(f)] = sa.d_cost;
  }
  const CostPair& d = sol.d;
  CostPair c = {d[0] - config.tau, d[1] - config.tau};
  std::vector<double> trace;
  for (long k = 1;; ++k) {
    const CostPair in = {std::max(c[0], d[0]), std::max(c[1], d[1])};
    const CostPair t = t_bar(PoContext{model, config, in, d}, variant, nullptr);
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
      throw ConvergenceError("T-bar iteration did not converge for variant " +
                                 variant_name(variant),
                             trace);
  }
  // T keeps {C >= D} invariant; tiny rounding below D is clamped away.
  for (int k = 0; k < 2; ++k) {
    if (c[k] < d[k] - 1e-9 * std::max(1.0, std::abs(d[k])))
      throw SolverError("fixed point violates D <= C-bar");
    c[k] = std::max(c[k], d[k]);
  }
  double res = sup_gap(t_bar(PoContext{model, config, c, d}, variant, nullptr), c);
  for (int round = 0; round < 100 && res > 0; ++round) {
    const AffineMap m = linearize_T_bar(PoContext{model, config, c, d}, variant);
    if (!(m.b[0] < 1 && m.b[1] < 1)) break;
    const CostPair cand = {std::max(m.a[0] / (1 - m.b[0]), d[0]),
                           std::max(m.a[1] / (1 - m.b[1]), d[1])};
    const double cres =
        sup_gap(t_bar(PoContext{model, config, cand, d}, variant, nullptr), cand);
    if (!(cres < res)) break;
    c = cand;
    res = cres;
  }
  sol.residual = res;
  sol.cost = c;
  t_bar(PoContext{model, config, c, d}, variant, &sol.thresholds);
  return sol;
}

}  // namespace relaygame
