#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmconc/core.hpp"
#include "mmconc/lipschitz.hpp"

namespace mmconc {

/// Finitely supported probability measure on the real line.
class PushforwardOnR {
 public:
  struct Atom {
    double value;
    double mass;
  };

  /// f_*(mu): atoms at the values of f, equal values merged, zero masses dropped.
  static PushforwardOnR of(const RealFunction& f, const Measure& mu);
  explicit PushforwardOnR(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<Atom> atoms_;
};

/// Smallest diameter of a set of mass >= one_minus_alpha. 0 when
/// one_minus_alpha <= 0; Infeasible when it exceeds 1.
double part_diam(const PushforwardOnR& nu, double one_minus_alpha);

enum class ObsDiamMethod { Candidates, LocalSearch, Oracle };
const char* to_string(ObsDiamMethod method);

struct ObsDiamOptions {
  std::size_t budget = 0;  // 0 means n + 64
  std::uint64_t seed = 1;
  bool use_oracle = false;
  /// Exhaustive ordering enumeration runs on supports up to this size.
  std::size_t oracle_max_points = 8;
  /// Coordinate ascent with McShane re-projection runs up to this size.
  std::size_t local_search_max_points = 64;
  std::size_t local_search_sweeps = 6;
  /// Hill climbing over support orderings (one LP per ordering) runs up to
  /// this support size, from this many starting orderings.
  std::size_t order_lp_max_points = 10;
  std::size_t order_lp_starts = 6;
};

struct ObsDiamReport {
  double alpha = 0.0;
  double lower_bound = 0.0;
  std::optional<double> oracle_value;
  /// diam / 64; the documented tolerance between lower bound and oracle.
  double eta = 0.0;
  RealFunction witness;
  /// Index into the candidate family, or -1 when local search improved on it.
  long witness_id = -1;
  ObsDiamMethod method = ObsDiamMethod::Candidates;

  bool certified() const noexcept { return oracle_value.has_value(); }
  /// The certified value when available, the lower bound otherwise.
  double best_value() const noexcept { return oracle_value.value_or(lower_bound); }
};

/// Lower bound on ObsDiam(X, d, mu; -alpha) from a Lipschitz candidate family
/// plus local search; exact value attached when the oracle applies.
ObsDiamReport obs_diam(const MmSpace& m, double alpha, const ObsDiamOptions& options = {});

struct ObsDiamOracle {
  double value = 0.0;
  RealFunction witness;
  /// True when every atom is needed and the value is the support diameter.
  bool closed_form = false;
};

/// Exact ObsDiam. For each ordering of the support points, PartDiam is the
/// minimum of linear window spreads, so its maximum over 1-Lipschitz f that
/// respect the ordering is a small LP. Enumerating orderings (with a bound
/// from pairwise distances pruning prefixes) gives the global maximum.
/// When alpha is below the smallest atom, all atoms are needed and the value
/// is the support diameter directly. Throws TooLarge if neither applies and
/// the support exceeds max_points.
ObsDiamOracle obs_diam_oracle(const MmSpace& m, double alpha, std::size_t max_points = 8);

/// ObsDiam under d0 <= ObsDiam under d1 (+1e-7), evaluated with the oracle.
/// NotDominated if d0 > d1 somewhere.
bool obs_diam_monotone_check(const Measure& mu, const FiniteMetricSpace& d0,
                             const FiniteMetricSpace& d1, double alpha,
                             std::size_t max_points = 8);

/// Smallest m with mu(f >= m) >= 1/2 and mu(f <= m) >= 1/2.
double median(const RealFunction& f, const Measure& mu);

/// For each space: sup over a candidate 1-Lipschitz family of
/// mu(|f - median(f)| > eps). A lower bound on the supremum over Lip_1.
std::vector<double> median_concentration_profile(std::span<const MmSpace> spaces, double eps,
                                                 std::size_t family_budget,
                                                 std::uint64_t seed = 1);

struct LevyTable {
  struct Cell {
    std::size_t index = 0;
    std::size_t n_points = 0;
    double scale = 0.0;
    ObsDiamReport report;
  };
  std::vector<double> alphas;
  /// Row-major: cells[i * alphas.size() + a].
  std::vector<Cell> cells;
  /// Least-squares slope of log(lower bound) against log(scale), per alpha;
  /// NaN when fewer than two positive values exist.
  std::vector<double> decay_exponents;

  const Cell& at(std::size_t i, std::size_t a) const { return cells[i * alphas.size() + a]; }
};

/// ObsDiam table over a sequence of spaces and an alpha grid. `scales` gives
/// the abscissa for the decay fit (defaults to 1, 2, 3, ...).
LevyTable levy_diagnostic(std::span<const MmSpace> sequence, std::span<const double> alphas,
                          const ObsDiamOptions& options = {},
                          std::span<const double> scales = {}, std::size_t threads = 1);

/// Fitted slope of log(values) against log(scales) over the positive entries.
double fit_decay_exponent(std::span<const double> scales, std::span<const double> values);

/// inf over arbitrary functions g on the target of me_mu(h, g o p). Lower
/// bound for the same infimum restricted to Lipschitz g.
double fiberwise_ky_fan_floor(const RealFunction& h, const PointMap& p, const Measure& mu);

struct CriterionRow {
  std::size_t index = 0;
  /// d_P((p_i)_* mu_i, mu_X) on the target space.
  double prokhorov = 0.0;
  /// Upper bound on sup_{g in Lip_1(X)} inf_{h in Lip_1(X_i)} me(g o p_i, h).
  double lip_target_to_source_upper = 0.0;
  /// Lower bound on sup_{h in Lip_1(X_i)} inf_{g in Lip_1(X)} me(h, g o p_i).
  double lip_source_to_target_lower = 0.0;
};

/// Evaluates the two conditions of the map-based concentration criterion for
/// user-supplied maps p_i : X_i -> X.
std::vector<CriterionRow> concentration_criterion(std::span<const MmSpace> sequence,
                                                  const MmSpace& target,
                                                  std::span<const PointMap> maps,
                                                  std::size_t budget, std::uint64_t seed = 1,
                                                  std::size_t threads = 1);

}  // namespace mmconc
