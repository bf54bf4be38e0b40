#ifndef RELAYGAME_ERRORS_H_
#define RELAYGAME_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relaygame {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an iteration hits its cap. Carries the tail of the residual
// sequence so callers can see whether it was stalling or oscillating.
class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : SolverError(what), trace_(std::move(trace)) {}
  const std::vector<double>& residual_trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace relaygame

#endif  // RELAYGAME_ERRORS_H_
