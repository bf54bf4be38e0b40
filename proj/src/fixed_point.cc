#include "relaygame/fixed_point.h"

#include <cmath>

namespace relaygame {

namespace {

double evaluate(const std::vector<StopTerm>& terms, double x,
                long double* cont_slope, long double* rest) {
  long double v = 0, sl = 0, re = 0;
  for (const auto& t : terms) {
    const double cont = t.kc + t.kb * x;
    if (t.can_stop && t.stop <= cont) {
      v += t.w * t.stop;
      re += t.w * t.stop;
    } else {
      v += t.w * cont;
      sl += t.w * t.kb;
      re += t.w * t.kc;
    }
  }
  if (cont_slope) *cont_slope = sl;
  if (rest) *rest = re;
  return static_cast<double>(v);
}

}  // namespace

double stopping_rhs(const std::vector<StopTerm>& terms, double x) {
  return evaluate(terms, x, nullptr, nullptr);
}

double polish_stopping_fixed_point(const std::vector<StopTerm>& terms, double x) {
  long double sl, re;
  const double fx = evaluate(terms, x, &sl, &re);
  if (!(sl < 1)) return x;
  const double cand = static_cast<double>(re / (1 - sl));
  if (std::abs(stopping_rhs(terms, cand) - cand) <= std::abs(fx - x)) return cand;
  return x;
}

double stopping_fixed_point(const std::vector<StopTerm>& terms, double x0,
                            long max_iters, long* iterations) {
  double x = x0;
  long k = 0;
  while (k < max_iters) {
    ++k;
    // A Newton step on the active linear piece after each sweep; the
    // polish only accepts it when the residual does not grow.
    const double nx = polish_stopping_fixed_point(terms, stopping_rhs(terms, x));
    const double step = std::abs(nx - x);
    x = nx;
    if (step <= 1e-13 * (1 + std::abs(x))) break;
  }
  if (iterations) *iterations = k;
  return polish_stopping_fixed_point(terms, x);
}

}  // namespace relaygame
