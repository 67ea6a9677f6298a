#pragma once

#include <vector>

namespace spreadnet::lp {

using Vector = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;

struct Result {
  enum class Status { Optimal, Infeasible, Unbounded };

  Status status = Status::Infeasible;
  double value = 0.0;
  Vector x;
};

// Dense two-phase simplex for  max c.x  s.t.  A x <= b, x >= 0.
// Bland-style lexicographic tie-breaking keeps the tiny instances used here
// out of cycles; tolerance 1e-9.
Result maximize(const Matrix& a, const Vector& b, const Vector& c);

}  // namespace spreadnet::lp
