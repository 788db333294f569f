#pragma once

#include <cstddef>
#include <vector>

namespace mmconc::lp {

/// maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0 so the origin
/// is a feasible starting vertex. Rows are stored row-major in `a`.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<double> a;
  std::vector<double> b;

  std::size_t num_rows() const noexcept { return b.size(); }
  void add_row(const std::vector<double>& coeffs, double rhs);
  /// Row with only two non-zero coefficients, the common shape here.
  void add_row(std::size_t i, double ci, std::size_t j, double cj, double rhs);
};

struct Solution {
  double value = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

/// Dense tableau simplex. Dantzig pricing, falling back to Bland's rule after
/// a run of degenerate pivots so the method cannot cycle. Throws
/// Error(SolverFailure) on unboundedness, an iteration cap, or a final
/// feasibility residual above 1e-9.
Solution maximize(const Problem& problem);

}  // namespace mmconc::lp
