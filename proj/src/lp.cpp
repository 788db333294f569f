#include "mmconc/lp.hpp"

#include <cmath>
#include <string>

#include "mmconc/error.hpp"

namespace mmconc::lp {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kFeasTol = 1e-9;
constexpr std::size_t kDegenerateRunBeforeBland = 50;

}  // namespace

void Problem::add_row(const std::vector<double>& coeffs, double rhs) {
  if (coeffs.size() != num_vars) {
    throw Error(ErrorKind::DimensionMismatch, "LP row has wrong number of coefficients");
  }
  a.insert(a.end(), coeffs.begin(), coeffs.end());
  b.push_back(rhs);
}

void Problem::add_row(std::size_t i, double ci, std::size_t j, double cj, double rhs) {
  const std::size_t start = a.size();
  a.resize(start + num_vars, 0.0);
  a[start + i] += ci;
  a[start + j] += cj;
  b.push_back(rhs);
}

Solution maximize(const Problem& problem) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.num_rows();
  if (problem.objective.size() != n || problem.a.size() != n * m) {
    throw Error(ErrorKind::DimensionMismatch, "LP dimensions are inconsistent");
  }
  for (double bi : problem.b) {
    if (!(bi >= 0.0)) throw Error(ErrorKind::InvalidArgument, "LP right-hand side must be >= 0");
  }

  // Tableau rows 0..m-1 are constraints, row m is the objective row holding
  // reduced costs negated (entering candidates are negative entries).
  const std::size_t cols = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<double> t((m + 1) * cols, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * cols + c]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) at(r, c) = problem.a[r * n + c];
    at(r, n + r) = 1.0;
    at(r, rhs) = problem.b[r];
    basis[r] = n + r;
  }
  for (std::size_t c = 0; c < n; ++c) at(m, c) = -problem.objective[c];

  Solution sol;
  const std::size_t max_pivots = 50 * (n + m) + 1000;
  std::size_t degenerate_run = 0;
  while (true) {
    const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
    std::size_t enter = cols;
    double best = -kPivotTol;
    for (std::size_t c = 0; c < n + m; ++c) {
      const double rc = at(m, c);
      if (rc < best) {
        enter = c;
        if (bland) break;
        best = rc;
      }
    }
    if (enter == cols) break;

    std::size_t leave = m;
    double ratio = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double coef = at(r, enter);
      if (coef <= kPivotTol) continue;
      const double q = at(r, rhs) / coef;
      if (leave == m || q < ratio || (q == ratio && basis[r] < basis[leave])) {
        leave = r;
        ratio = q;
      }
    }
    if (leave == m) throw Error(ErrorKind::SolverFailure, "LP is unbounded");
    if (++sol.pivots > max_pivots) throw Error(ErrorKind::SolverFailure, "LP iteration cap reached");
    degenerate_run = ratio <= kPivotTol ? degenerate_run + 1 : 0;

    const double inv = 1.0 / at(leave, enter);
    for (std::size_t c = 0; c < cols; ++c) at(leave, c) *= inv;
    at(leave, enter) = 1.0;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < cols; ++c) at(r, c) -= factor * at(leave, c);
      at(r, enter) = 0.0;
    }
    basis[leave] = enter;
  }

  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) sol.x[basis[r]] = std::max(0.0, at(r, rhs));
  }
  sol.value = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.value += problem.objective[c] * sol.x[c];

  for (std::size_t r = 0; r < m; ++r) {
    double lhs = 0.0;
    for (std::size_t c = 0; c < n; ++c) lhs += problem.a[r * n + c] * sol.x[c];
    if (lhs > problem.b[r] + kFeasTol) {
      throw Error(ErrorKind::SolverFailure,
                  "LP solution violates row " + std::to_string(r) + " by " +
                      std::to_string(lhs - problem.b[r]));
    }
  }
  return sol;
}

}  // namespace mmconc::lp
