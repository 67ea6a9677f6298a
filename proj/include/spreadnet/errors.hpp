#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spreadnet {

// An iterative solver ran out of its iteration or time budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_value, long iterations)
      : std::runtime_error(what), last_value(last_value), iterations(iterations) {}

  double last_value;
  long iterations;
};

// A constrained subproblem has an empty feasible set; `violated` names the
// constraints that cannot be met.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::string> violated)
      : std::runtime_error(what), violated(std::move(violated)) {}

  std::vector<std::string> violated;
};

}  // namespace spreadnet
