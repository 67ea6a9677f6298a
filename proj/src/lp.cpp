#include "spreadnet/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace spreadnet::lp {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Classic dense tableau simplex with an auxiliary variable for phase 1.
// Row m holds the objective, row m+1 the phase-1 objective; column n is the
// auxiliary, column n+1 the right-hand side.
struct Tableau {
  int m, n;
  std::vector<int> nonbasic, basic;
  std::vector<std::vector<double>> d;

  Tableau(const Matrix& a, const Vector& b, const Vector& c)
      : m(static_cast<int>(b.size())),
        n(static_cast<int>(c.size())),
        nonbasic(n + 1),
        basic(m),
        d(m + 2, std::vector<double>(n + 2, 0.0)) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = a[i][j];
    for (int i = 0; i < m; ++i) {
      basic[i] = n + i;
      d[i][n] = -1.0;
      d[i][n + 1] = b[i];
    }
    for (int j = 0; j < n; ++j) {
      nonbasic[j] = j;
      d[m][j] = -c[j];
    }
    nonbasic[n] = -1;
    d[m + 1][n] = 1.0;
  }

  void pivot(int r, int s) {
    double* a = d[r].data();
    const double inv = 1.0 / a[s];
    for (int i = 0; i < m + 2; ++i) {
      if (i == r || std::fabs(d[i][s]) <= kEps) continue;
      double* row = d[i].data();
      const double inv2 = row[s] * inv;
      for (int j = 0; j < n + 2; ++j) row[j] -= a[j] * inv2;
      row[s] = a[s] * inv2;
    }
    for (int j = 0; j < n + 2; ++j)
      if (j != s) d[r][j] *= inv;
    for (int i = 0; i < m + 2; ++i)
      if (i != r) d[i][s] *= -inv;
    d[r][s] = inv;
    std::swap(basic[r], nonbasic[s]);
  }

  bool simplex(int phase) {
    const int x = m + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j < n + 1; ++j) {
        if (nonbasic[j] == -phase) continue;
        if (s == -1 || std::pair(d[x][j], nonbasic[j]) < std::pair(d[x][s], nonbasic[s]))
          s = j;
      }
      if (d[x][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m; ++i) {
        if (d[i][s] <= kEps) continue;
        if (r == -1 || std::pair(d[i][n + 1] / d[i][s], basic[i]) <
                           std::pair(d[r][n + 1] / d[r][s], basic[r]))
          r = i;
      }
      if (r == -1) return false;  // unbounded in this phase
      pivot(r, s);
    }
  }

  double solve(Vector& x) {
    int r = 0;
    for (int i = 1; i < m; ++i)
      if (d[i][n + 1] < d[r][n + 1]) r = i;
    if (m > 0 && d[r][n + 1] < -kEps) {
      pivot(r, n);
      if (!simplex(2) || d[m + 1][n + 1] < -kEps) return -kInf;
      for (int i = 0; i < m; ++i) {
        if (basic[i] != -1) continue;
        int s = 0;
        for (int j = 1; j < n + 1; ++j)
          if (std::pair(d[i][j], nonbasic[j]) < std::pair(d[i][s], nonbasic[s])) s = j;
        pivot(i, s);
      }
    }
    const bool bounded = simplex(1);
    x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
      if (basic[i] < n) x[basic[i]] = d[i][n + 1];
    return bounded ? d[m][n + 1] : kInf;
  }
};

}  // namespace

Result maximize(const Matrix& a, const Vector& b, const Vector& c) {
  if (a.size() != b.size()) throw std::invalid_argument("lp: |A| must match |b|");
  for (const auto& row : a)
    if (row.size() != c.size()) throw std::invalid_argument("lp: A row width must match |c|");

  Tableau tableau(a, b, c);
  Result res;
  const double value = tableau.solve(res.x);
  if (value == -kInf) {
    res.status = Result::Status::Infeasible;
    res.x.clear();
  } else if (value == kInf) {
    res.status = Result::Status::Unbounded;
    res.x.clear();
  } else {
    res.status = Result::Status::Optimal;
    res.value = value;
    for (auto& v : res.x)
      if (v < 0.0 && v > -1e-9) v = 0.0;  // scrub pivot noise
  }
  return res;
}

}  // namespace spreadnet::lp
