#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmconc/core.hpp"

namespace mmconc {

struct BoundedLipschitzSolution {
  /// max sum_i f_i * signed_mass_i over f with |f_i - f_j| <= d_ij, |f_i| <= 1.
  double value = 0.0;
  /// Optimal f (the potentials of the final spanning tree).
  std::vector<double> witness;
  /// Cost of the optimal transshipment; equals `value` by duality.
  double primal_cost = 0.0;
  std::size_t pivots = 0;
};

/// Solves the bounded-Lipschitz linear program through its dual, an
/// uncapacitated transshipment from the positive to the negative part of the
/// signed mass, with a ground node at cost 1 from every point standing in for
/// the bound |f| <= 1. Primal network simplex with strongly feasible spanning
/// trees (no cycling) and block pricing. The returned f is the transform of
/// the optimal sink potentials and is feasible on the whole space.
///
/// signed_mass must sum to zero (within 1e-12). Throws Error(SolverFailure)
/// if the final potentials or flows miss feasibility by more than 1e-9.
BoundedLipschitzSolution solve_bounded_lipschitz(std::span<const double> signed_mass,
                                                 const FiniteMetricSpace& x);

}  // namespace mmconc
