#ifndef RELAYGAME_FIXED_POINT_H_
#define RELAYGAME_FIXED_POINT_H_

#include <vector>

namespace relaygame {

// One term of a scalar stopping equation
//   X = sum_k w_k * min(stop_k, kc_k + kb_k * X),
// where stop_k is ignored when stopping is not allowed.
struct StopTerm {
  double w = 0;
  bool can_stop = false;
  double stop = 0;
  double kc = 0;
  double kb = 0;
};

// Right-hand side of the equation at x.
double stopping_rhs(const std::vector<StopTerm>& terms, double x);

// Exact fixed point on the linear piece active at x, if it stays on that
// piece and improves the residual; otherwise x.
double polish_stopping_fixed_point(const std::vector<StopTerm>& terms, double x);

// Value iteration with a Newton step per sweep, from x0 until successive
// iterates agree to ~1e-13 relative (or max_iters), then polished.
double stopping_fixed_point(const std::vector<StopTerm>& terms, double x0,
                            long max_iters, long* iterations = nullptr);

}  // namespace relaygame

#endif  // RELAYGAME_FIXED_POINT_H_
