#include "mmconc/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmconc/lp.hpp"
#include "mmconc/measure_metrics.hpp"
#include "mmconc/parallel.hpp"

namespace mmconc {

namespace {

constexpr double kImproveTol = 1e-12;

/// Support points with their masses; PartDiam only ever looks at these.
struct SupportView {
  IndexSet points;
  std::vector<double> mass;

  explicit SupportView(const Measure& mu) : points(support(mu)) {
    mass.reserve(points.size());
    for (Index i : points) mass.push_back(mu[i]);
  }
  std::size_t size() const { return points.size(); }
};

/// Minimal-diameter window over atoms sorted by value. Masses are compared
/// with prefix sums and tolerance kMassTol.
double window_part_diam(const std::vector<PushforwardOnR::Atom>& atoms, double target) {
  if (target <= 0.0 || atoms.empty()) return 0.0;
  const std::size_t m = atoms.size();
  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + atoms[i].mass;
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    j = std::max(j, i + 1);
    while (j < m && prefix[j] - prefix[i] < target - kMassTol) ++j;
    if (prefix[j] - prefix[i] < target - kMassTol) break;
    best = std::min(best, atoms[j - 1].value - atoms[i].value);
  }
  if (!std::isfinite(best)) best = atoms.back().value - atoms.front().value;
  return best;
}

double part_diam_of(const RealFunction& f, const SupportView& view, double target) {
  if (target <= 0.0) return 0.0;
  std::vector<PushforwardOnR::Atom> atoms;
  atoms.reserve(view.size());
  for (std::size_t k = 0; k < view.size(); ++k) atoms.push_back({f[view.points[k]], view.mass[k]});
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (out > 0 && atoms[out - 1].value == atoms[k].value) {
      atoms[out - 1].mass += atoms[k].mass;
    } else {
      atoms[out++] = atoms[k];
    }
  }
  atoms.resize(out);
  return window_part_diam(atoms, target);
}

/// Support values extended to the whole space by the McShane formula and
/// then projected onto Lip_1, which only removes rounding-level violations.
RealFunction witness_from_support(const FiniteMetricSpace& x, const SupportView& view,
                                  const std::vector<double>& values) {
  std::vector<double> full(x.size(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < view.size(); ++k) {
    const auto row = x.row(view.points[k]);
    for (Index y = 0; y < x.size(); ++y) full[y] = std::min(full[y], values[k] + row[y]);
  }
  for (std::size_t k = 0; k < view.size(); ++k) full[view.points[k]] = values[k];
  return mcshane_nearest(RealFunction(std::move(full)), x, 1.0);
}

/// Minimal windows [i, j] of an ordering: j is the first position where the
/// mass from i reaches the target.
std::vector<std::pair<std::size_t, std::size_t>> minimal_windows(
    const std::vector<double>& ordered_mass, double target) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t m = ordered_mass.size();
  for (std::size_t i = 0; i < m; ++i) {
    double mass = 0.0;
    std::size_t j = i;
    for (; j < m; ++j) {
      mass += ordered_mass[j];
      if (mass >= target - kMassTol) break;
    }
    if (j == m) break;
    out.emplace_back(i, j);
  }
  return out;
}

struct OrderingOptimum {
  double value = 0.0;
  std::vector<double> values;  // by support slot
};

/// max PartDiam over 1-Lipschitz f that are non-decreasing along `order`
/// (a permutation of support slots). f at the first slot is pinned to 0.
OrderingOptimum solve_ordering_lp(const FiniteMetricSpace& x, const SupportView& view,
                                  const std::vector<std::size_t>& order, double target) {
  const std::size_t m = order.size();
  OrderingOptimum out;
  out.values.assign(view.size(), 0.0);
  if (m <= 1 || target <= 0.0) return out;
  std::vector<double> ordered_mass(m);
  for (std::size_t p = 0; p < m; ++p) ordered_mass[p] = view.mass[order[p]];
  const auto windows = minimal_windows(ordered_mass, target);

  // Variables: f at positions 1..m-1 (index p-1), then t (index m-1).
  lp::Problem problem;
  problem.num_vars = m;
  problem.objective.assign(m, 0.0);
  problem.objective[m - 1] = 1.0;
  const std::size_t t = m - 1;
  auto var = [](std::size_t p) { return p - 1; };
  for (std::size_t p = 1; p + 1 < m; ++p) problem.add_row(var(p), 1.0, var(p + 1), -1.0, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double d = x(view.points[order[a]], view.points[order[b]]);
      if (a == 0) {
        std::vector<double> row(m, 0.0);
        row[var(b)] = 1.0;
        problem.add_row(row, d);
      } else {
        problem.add_row(var(b), 1.0, var(a), -1.0, d);
      }
    }
  }
  for (const auto& [i, j] : windows) {
    if (i == j) {
      std::vector<double> row(m, 0.0);
      row[t] = 1.0;
      problem.add_row(row, 0.0);
    } else if (i == 0) {
      problem.add_row(t, 1.0, var(j), -1.0, 0.0);
    } else {
      std::vector<double> row(m, 0.0);
      row[t] = 1.0;
      row[var(j)] -= 1.0;
      row[var(i)] += 1.0;
      problem.add_row(row, 0.0);
    }
  }
  const lp::Solution sol = lp::maximize(problem);
  out.value = sol.value;
  for (std::size_t p = 1; p < m; ++p) out.values[order[p]] = sol.x[var(p)];
  return out;
}

std::vector<std::size_t> ordering_of(const RealFunction& f, const SupportView& view) {
  std::vector<std::size_t> order(view.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f[view.points[a]] < f[view.points[b]];
  });
  return order;
}

bool all_atoms_needed(const SupportView& view, double target) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double w : view.mass) smallest = std::min(smallest, w);
  return 1.0 - smallest < target - kMassTol;
}

/// Depth-first enumeration of orderings with a pairwise-distance bound.
class OrderingSearch {
 public:
  OrderingSearch(const FiniteMetricSpace& x, const SupportView& view, double target)
      : x_(x), view_(view), target_(target), used_(view.size(), false) {}

  void seed(double value, std::vector<double> values) {
    best_ = value;
    best_values_ = std::move(values);
  }

  void run() {
    order_.clear();
    extend(std::numeric_limits<double>::infinity());
  }

  double best() const { return best_; }
  const std::vector<double>& best_values() const { return best_values_; }

 private:
  double dist(std::size_t pa, std::size_t pb) const {
    return x_(view_.points[order_[pa]], view_.points[order_[pb]]);
  }

  void extend(double bound) {
    const std::size_t m = view_.size();
    const std::size_t p = order_.size();
    if (p == m) {
      if (order_.front() > order_.back()) return;  // mirror image of another ordering
      const OrderingOptimum opt = solve_ordering_lp(x_, view_, order_, target_);
      if (opt.value > best_ + kImproveTol) {
        best_ = opt.value;
        best_values_ = opt.values;
      }
      return;
    }
    for (std::size_t s = 0; s < m; ++s) {
      if (used_[s]) continue;
      used_[s] = true;
      order_.push_back(s);
      // Windows whose minimal right end is this new position.
      double next_bound = bound;
      double suffix = 0.0;
      for (std::size_t i = p + 1; i-- > 0;) {
        const double before = suffix;
        suffix += view_.mass[order_[i]];
        if (suffix >= target_ - kMassTol && before < target_ - kMassTol) {
          next_bound = std::min(next_bound, i == p ? 0.0 : dist(i, p));
        }
      }
      if (next_bound > best_ + kImproveTol) extend(next_bound);
      order_.pop_back();
      used_[s] = false;
    }
  }

  const FiniteMetricSpace& x_;
  const SupportView& view_;
  double target_;
  std::vector<bool> used_;
  std::vector<std::size_t> order_;
  double best_ = 0.0;
  std::vector<double> best_values_;
};

}  // namespace

PushforwardOnR PushforwardOnR::of(const RealFunction& f, const Measure& mu) {
  if (f.size() != mu.size()) throw Error(ErrorKind::DimensionMismatch, "function and measure differ in size");
  std::vector<Atom> atoms;
  for (Index i = 0; i < f.size(); ++i) {
    if (mu[i] > 0.0) atoms.push_back({f[i], mu[i]});
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().mass += a.mass;
    } else {
      merged.push_back(a);
    }
  }
  return PushforwardOnR(std::move(merged));
}

PushforwardOnR::PushforwardOnR(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  double total = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (!(atoms_[k].mass >= 0.0) || !std::isfinite(atoms_[k].value)) {
      throw Error(ErrorKind::InvalidArgument, "atom with negative mass or non-finite value");
    }
    if (k > 0 && !(atoms_[k - 1].value < atoms_[k].value)) {
      throw Error(ErrorKind::InvalidArgument, "atom values must be strictly increasing");
    }
    total += atoms_[k].mass;
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw Error(ErrorKind::MassNotOne, "atoms carry mass " + std::to_string(total));
  }
}

double part_diam(const PushforwardOnR& nu, double one_minus_alpha) {
  if (one_minus_alpha <= 0.0) return 0.0;
  if (one_minus_alpha > 1.0 + kMassTol) {
    throw Error(ErrorKind::Infeasible, "no set carries mass " + std::to_string(one_minus_alpha));
  }
  return window_part_diam(nu.atoms(), one_minus_alpha);
}

const char* to_string(ObsDiamMethod method) {
  switch (method) {
    case ObsDiamMethod::Candidates: return "candidates";
    case ObsDiamMethod::LocalSearch: return "local_search";
    case ObsDiamMethod::Oracle: return "oracle";
  }
  return "unknown";
}

ObsDiamOracle obs_diam_oracle(const MmSpace& m, double alpha, std::size_t max_points) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  const FiniteMetricSpace& x = m.space();
  const SupportView view(m.measure());
  const double target = 1.0 - alpha;
  ObsDiamOracle out;
  out.witness = RealFunction::constant(x.size(), 0.0);
  if (target <= 0.0 || view.size() <= 1) return out;

  // Seed with the best single-source distance function on the support.
  std::vector<double> seed_values(view.size(), 0.0);
  double seed_value = 0.0;
  Index seed_source = view.points.front();
  for (Index s : view.points) {
    const auto row = x.row(s);
    const double v = part_diam_of(RealFunction(std::vector<double>(row.begin(), row.end())), view, target);
    if (v > seed_value) {
      seed_value = v;
      seed_source = s;
    }
  }
  for (std::size_t k = 0; k < view.size(); ++k) seed_values[k] = x(seed_source, view.points[k]);

  if (all_atoms_needed(view, target)) {
    // Every window is the whole support, so the value is the largest spread
    // a 1-Lipschitz function can have there: the support diameter.
    out.value = x.diameter(view.points);
    out.closed_form = true;
    Index a = view.points.front();
    for (Index i : view.points)
      for (Index j : view.points)
        if (x(i, j) == out.value) a = i;
    std::vector<double> values(view.size());
    for (std::size_t k = 0; k < view.size(); ++k) values[k] = x(a, view.points[k]);
    out.witness = witness_from_support(x, view, values);
    return out;
  }
  if (view.size() > max_points) {
    throw Error(ErrorKind::TooLarge, "ordering enumeration is limited to " +
                                         std::to_string(max_points) + " support points");
  }
  OrderingSearch search(x, view, target);
  search.seed(seed_value, seed_values);
  search.run();
  out.value = search.best();
  out.witness = witness_from_support(x, view, search.best_values());
  return out;
}

ObsDiamReport obs_diam(const MmSpace& m, double alpha, const ObsDiamOptions& options) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  const FiniteMetricSpace& x = m.space();
  const std::size_t n = x.size();
  const SupportView view(m.measure());
  const double target = 1.0 - alpha;

  ObsDiamReport report;
  report.alpha = alpha;
  report.eta = x.diameter() / 64.0;
  report.witness = RealFunction::constant(n, 0.0);
  report.witness_id = 0;

  if (target > 0.0 && n > 1) {
    const std::size_t budget = options.budget == 0 ? n + 64 : options.budget;
    const auto candidates = lip1_candidates(x, budget, options.seed);
    std::vector<double> candidate_values(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double v = part_diam_of(candidates[c], view, target);
      candidate_values[c] = v;
      if (v > report.lower_bound + kImproveTol) {
        report.lower_bound = v;
        report.witness = candidates[c];
        report.witness_id = static_cast<long>(c);
      }
    }

    if (n <= options.local_search_max_points) {
      const double diam = x.diameter();
      RealFunction f = report.witness;
      double best = report.lower_bound;
      bool improved = false;
      double step = diam / 4.0;
      for (std::size_t sweep = 0; sweep < options.local_search_sweeps; ++sweep, step /= 2.0) {
        for (Index p = 0; p < n; ++p) {
          for (double sign : {1.0, -1.0}) {
            std::vector<double> moved(f.values());
            moved[p] += sign * step;
            RealFunction g = mcshane_nearest(RealFunction(std::move(moved)), x, 1.0);
            const double v = part_diam_of(g, view, target);
            if (v > best + kImproveTol) {
              best = v;
              f = std::move(g);
              improved = true;
            }
          }
        }
      }
      if (view.size() <= options.order_lp_max_points) {
        // Hill climbing over orderings of the support, started from the
        // orderings of the current function and of the best candidates.
        std::vector<std::vector<std::size_t>> starts{ordering_of(f, view)};
        std::vector<std::size_t> ranked(candidates.size());
        std::iota(ranked.begin(), ranked.end(), std::size_t{0});
        std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
          return candidate_values[a] > candidate_values[b];
        });
        for (std::size_t c : ranked) {
          if (starts.size() >= options.order_lp_starts) break;
          auto order = ordering_of(candidates[c], view);
          if (std::find(starts.begin(), starts.end(), order) == starts.end()) starts.push_back(std::move(order));
        }
        OrderingOptimum overall;
        overall.value = -1.0;
        for (auto& order : starts) {
          OrderingOptimum current = solve_ordering_lp(x, view, order, target);
          for (std::size_t rounds = 0; rounds < 100; ++rounds) {
            bool moved = false;
            for (std::size_t p = 0; p < order.size() && !moved; ++p) {
              for (std::size_t q = p + 1; q < order.size() && !moved; ++q) {
                std::swap(order[p], order[q]);
                OrderingOptimum next = solve_ordering_lp(x, view, order, target);
                if (next.value > current.value + kImproveTol) {
                  current = std::move(next);
                  moved = true;
                } else {
                  std::swap(order[p], order[q]);
                }
              }
            }
            if (!moved) break;
          }
          if (current.value > overall.value) overall = std::move(current);
        }
        RealFunction g = witness_from_support(x, view, overall.values);
        const double v = part_diam_of(g, view, target);
        if (v > best + kImproveTol) {
          best = v;
          f = std::move(g);
          improved = true;
        }
      }
      if (improved) {
        report.lower_bound = best;
        report.witness = std::move(f);
        report.witness_id = -1;
        report.method = ObsDiamMethod::LocalSearch;
      }
    }
  }

  if (options.use_oracle) {
    try {
      report.oracle_value = obs_diam_oracle(m, alpha, options.oracle_max_points).value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooLarge) throw;
    }
  }
  return report;
}

bool obs_diam_monotone_check(const Measure& mu, const FiniteMetricSpace& d0,
                             const FiniteMetricSpace& d1, double alpha, std::size_t max_points) {
  if (d0.size() != d1.size() || mu.size() != d0.size()) {
    throw Error(ErrorKind::DimensionMismatch, "spaces and measure differ in size");
  }
  if (!d0.dominated_by(d1)) throw Error(ErrorKind::NotDominated, "d0 exceeds d1 somewhere");
  const double lo = obs_diam_oracle(MmSpace(d0, mu), alpha, max_points).value;
  const double hi = obs_diam_oracle(MmSpace(d1, mu), alpha, max_points).value;
  return lo <= hi + 1e-7;
}

double median(const RealFunction& f, const Measure& mu) {
  if (f.size() != mu.size()) throw Error(ErrorKind::DimensionMismatch, "function and measure differ in size");
  const auto atoms = PushforwardOnR::of(f, mu).atoms();
  double below = 0.0;  // mass strictly below the current atom
  for (const auto& atom : atoms) {
    const double at_most = below + atom.mass;
    const double at_least = 1.0 - below;
    if (at_most >= 0.5 - kMassTol && at_least >= 0.5 - kMassTol) return atom.value;
    below = at_most;
  }
  return atoms.back().value;
}

std::vector<double> median_concentration_profile(std::span<const MmSpace> spaces, double eps,
                                                 std::size_t family_budget, std::uint64_t seed) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  std::vector<double> out;
  out.reserve(spaces.size());
  for (const MmSpace& m : spaces) {
    double worst = 0.0;
    for (const RealFunction& f : lip1_candidates(m.space(), family_budget, seed)) {
      const double med = median(f, m.measure());
      double mass = 0.0;
      for (Index i = 0; i < f.size(); ++i)
        if (std::abs(f[i] - med) > eps) mass += m.measure()[i];
      worst = std::max(worst, mass);
    }
    out.push_back(worst);
  }
  return out;
}

double fit_decay_exponent(std::span<const double> scales, std::span<const double> values) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < std::min(scales.size(), values.size()); ++i) {
    if (!(values[i] > 0.0) || !(scales[i] > 0.0)) continue;
    const double lx = std::log(scales[i]);
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  const double denom = static_cast<double>(count) * sxx - sx * sx;
  if (count < 2 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (static_cast<double>(count) * sxy - sx * sy) / denom;
}

LevyTable levy_diagnostic(std::span<const MmSpace> sequence, std::span<const double> alphas,
                          const ObsDiamOptions& options, std::span<const double> scales,
                          std::size_t threads) {
  for (double a : alphas) {
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "alphas must be positive");
  }
  if (!scales.empty() && scales.size() != sequence.size()) {
    throw Error(ErrorKind::DimensionMismatch, "one scale per sequence entry is required");
  }
  LevyTable table;
  table.alphas.assign(alphas.begin(), alphas.end());
  table.cells.resize(sequence.size() * alphas.size());
  parallel_for(table.cells.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / alphas.size();
    const std::size_t a = k % alphas.size();
    LevyTable::Cell& cell = table.cells[k];
    cell.index = i;
    cell.n_points = sequence[i].size();
    cell.scale = scales.empty() ? static_cast<double>(i + 1) : scales[i];
    cell.report = obs_diam(sequence[i], alphas[a], options);
  });
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      xs.push_back(table.at(i, a).scale);
      ys.push_back(table.at(i, a).report.lower_bound);
    }
    table.decay_exponents.push_back(fit_decay_exponent(xs, ys));
  }
  return table;
}

double fiberwise_ky_fan_floor(const RealFunction& h, const PointMap& p, const Measure& mu) {
  if (h.size() != mu.size() || p.source_size() != mu.size()) {
    throw Error(ErrorKind::DimensionMismatch, "function, map and measure differ in size");
  }
  std::vector<std::vector<PushforwardOnR::Atom>> fibers(p.target_size());
  for (Index i = 0; i < h.size(); ++i) {
    if (mu[i] > 0.0) fibers[p(i)].push_back({h[i], mu[i]});
  }
  std::vector<double> breaks{0.0};
  for (auto& fiber : fibers) {
    std::sort(fiber.begin(), fiber.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    for (std::size_t a = 0; a < fiber.size(); ++a)
      for (std::size_t b = a + 1; b < fiber.size(); ++b)
        breaks.push_back((fiber[b].value - fiber[a].value) / 2.0);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // Mass that no choice of per-fiber constant can bring within e of h.
  auto missed = [&](double e) {
    double total = 0.0;
    for (const auto& fiber : fibers) {
      double fiber_mass = 0.0;
      for (const auto& atom : fiber) fiber_mass += atom.mass;
      double best = 0.0, window = 0.0;
      std::size_t lo = 0;
      for (std::size_t hi = 0; hi < fiber.size(); ++hi) {
        window += fiber[hi].mass;
        while (fiber[hi].value - fiber[lo].value > 2.0 * e) window -= fiber[lo++].mass;
        best = std::max(best, window);
      }
      total += std::max(0.0, fiber_mass - best);
    }
    return total;
  };
  std::size_t lo = 0;
  std::size_t hi = breaks.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (missed(breaks[mid]) < breaks[mid + 1]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::max(breaks[lo], missed(breaks[lo]));
}

std::vector<CriterionRow> concentration_criterion(std::span<const MmSpace> sequence,
                                                  const MmSpace& target,
                                                  std::span<const PointMap> maps,
                                                  std::size_t budget, std::uint64_t seed,
                                                  std::size_t threads) {
  if (maps.size() != sequence.size()) {
    throw Error(ErrorKind::MapMismatch, "one map per sequence entry is required");
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].source_size() != sequence[i].size() || maps[i].target_size() != target.size()) {
      throw Error(ErrorKind::MapMismatch, "map " + std::to_string(i) + " has the wrong shape");
    }
  }
  std::vector<CriterionRow> rows(sequence.size());
  parallel_for(sequence.size(), threads, [&](std::size_t i) {
    const MmSpace& source = sequence[i];
    const PointMap& p = maps[i];
    CriterionRow& row = rows[i];
    row.index = i;
    row.prokhorov = d_prokhorov(pushforward(source.measure(), p), target.measure(), target.space());

    // g o p is within (d_X(p a, p b) - d_i(a, b))^+ / 2 of Lip_1(X_i) in sup
    // norm on the support (McShane projection), and the worst g is a
    // distance function, so the pairwise expansion bounds the supremum.
    const IndexSet supp = support(source.measure());
    double expansion = 0.0;
    for (Index a : supp)
      for (Index b : supp)
        expansion = std::max(expansion, target.space()(p(a), p(b)) - source.space()(a, b));
    row.lip_target_to_source_upper = std::min(1.0, 0.5 * expansion);

    double worst = 0.0;
    for (const RealFunction& h : lip1_candidates(source.space(), budget, seed)) {
      worst = std::max(worst, fiberwise_ky_fan_floor(h, p, source.measure()));
    }
    row.lip_source_to_target_lower = worst;
  });
  return rows;
}

}  // namespace mmconc
