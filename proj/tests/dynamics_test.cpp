#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mmconc/concentration.hpp"
#include "mmconc/dynamics.hpp"
#include "support.hpp"

using namespace mmconc;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mmconc::Error");
  return ErrorKind::InvalidArgument;
}

FiniteMetricSpace path3() { return FiniteMetricSpace::unlabeled({0, 1, 2, 1, 0, 1, 2, 1, 0}, 3); }

FlowInstance z3_regular() {
  return regular_flow(FiniteGroup::cyclic(3), cyclic_geodesic_space(3, false));
}

/// Translation-invariant metric on Z_n from random symmetric generator
/// weights: shortest paths in the weighted Cayley graph.
FiniteMetricSpace random_cyclic_metric(std::size_t n, Rng& rng) {
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 1; k <= n / 2; ++k) w[k] = w[n - k] = rng.uniform(0.2, 2.0);
  for (int pass = 0; pass < static_cast<int>(n); ++pass)
    for (std::size_t a = 1; a < n; ++a)
      for (std::size_t b = 1; b < n; ++b) w[(a + b) % n] = std::min(w[(a + b) % n], w[a] + w[b]);
  w[0] = 0.0;
  std::vector<double> d(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) d[a * n + b] = w[(b + n - a) % n];
  return FiniteMetricSpace::unlabeled(std::move(d), n);
}

std::vector<Index> all_elements(const FiniteGroup& g) {
  std::vector<Index> e(g.order());
  for (Index i = 0; i < e.size(); ++i) e[i] = i;
  return e;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("flow validation") {
    const auto z2 = FiniteGroup::cyclic(2);
    const auto x = FiniteMetricSpace::unlabeled({0, 1, 1, 0}, 2);
    CHECK(kind_of([&] { FlowInstance(z2, x, {{0, 1}, {0, 0}}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { FlowInstance(z2, x, {{1, 0}, {1, 0}}); }) == ErrorKind::InvalidArgument);
    const auto z3 = FiniteGroup::cyclic(3);
    // Element 1 swaps the points, so 1 + 1 = 2 would have to swap them back.
    const auto x3 = path3();
    CHECK(kind_of([&] { FlowInstance(z3, x3, {{0, 1, 2}, {1, 0, 2}, {1, 0, 2}}); }) ==
          ErrorKind::InvalidArgument);
    CHECK_NOTHROW(FlowInstance(z2, x, {{0, 1}, {1, 0}}));
  }

  TEST_CASE("d_Gx and d_GX examples") {
    const auto triv = trivial_flow(FiniteGroup::cyclic(3), path3());
    for (Index x = 0; x < 3; ++x) CHECK(d_Gx(triv, x).diameter() == 0.0);
    CHECK(d_GX(triv).base().diameter() == 0.0);
    CHECK(kind_of([&] { d_Gx(triv, 3); }) == ErrorKind::BadPoint);

    const auto reg = z3_regular();
    const auto d = cyclic_geodesic_space(3, false);
    for (Index x = 0; x < 3; ++x) {
      const auto dx = d_Gx(reg, x);
      CHECK(dx.is_pseudo());
      CHECK(dx.matrix() == d.matrix());
    }
    CHECK(d_GX(reg).base().matrix() == d.matrix());

    const auto apex = cycle_with_apex_flow(4);
    CHECK(apex.space().labels().back() == "apex");
    CHECK(d_Gx(apex, 4).diameter() == 0.0);
  }

  TEST_CASE("d_GX dominates every d_Gx and is right-invariant") {
    const auto s3 = FiniteGroup::sym(3);
    const RightInvariantMetric d(s3, sym_hamming_space(3));
    const std::vector<Index> gens{1};
    const auto cosets = coset_flow(s3, d, gens);
    CHECK(cosets.space().size() == 3);
    for (const auto* flow : {&cosets}) {
      const auto big = d_GX(*flow).base();
      for (Index x = 0; x < flow->space().size(); ++x) CHECK(d_Gx(*flow, x).dominated_by(big));
      const auto& g = flow->group();
      for (Index a = 0; a < g.order(); ++a)
        for (Index b = 0; b < g.order(); ++b)
          for (Index k = 0; k < g.order(); ++k) CHECK(big(g.mul(a, k), g.mul(b, k)) == big(a, b));
    }
  }

  TEST_CASE("ObsDiam under d_Gx is at most ObsDiam under d_GX") {
    const auto s3 = FiniteGroup::sym(3);
    const RightInvariantMetric d(s3, sym_hamming_space(3));
    const std::vector<Index> gens{1};
    const auto flow = coset_flow(s3, d, gens);
    const auto big = d_GX(flow).base();
    Rng rng(21);
    for (int trial = 0; trial < 6; ++trial) {
      const auto mu = testing::random_measure(6, rng, true);
      for (Index x = 0; x < flow.space().size(); ++x)
        for (double alpha : {0.1, 0.3})
          CHECK(obs_diam_monotone_check(mu, d_Gx(flow, x), big, alpha));
    }
  }

  TEST_CASE("average orbit displacement") {
    const auto triv = trivial_flow(FiniteGroup::cyclic(3), path3());
    const std::vector<Index> all{0, 1, 2}, one{1}, e{0}, none{};
    CHECK(avg_orbit_displacement(triv, Measure::uniform(3), all) == 0.0);
    const auto reg = z3_regular();
    CHECK(avg_orbit_displacement(reg, Measure::uniform(3), one) == 1.0);
    CHECK(avg_orbit_displacement(reg, Measure::uniform(3), e) == 0.0);
    CHECK(kind_of([&] { avg_orbit_displacement(reg, Measure::uniform(3), none); }) == ErrorKind::EmptySet);
  }

  TEST_CASE("Haar averages") {
    const auto apex = cycle_with_apex_flow(4);
    const auto cycle = haar_average(apex, Measure::point_mass(5, 0));
    CHECK(cycle.weights() == std::vector<double>{0.25, 0.25, 0.25, 0.25, 0.0});
    CHECK(haar_average(apex, Measure::point_mass(5, 4)) == Measure::point_mass(5, 4));
    const auto reg = z3_regular();
    CHECK(haar_average(reg, Measure({0.7, 0.2, 0.1})) == Measure::uniform(3));

    Rng rng(22);
    for (int trial = 0; trial < 20; ++trial) {
      const auto nu0 = testing::random_measure(5, rng, true);
      const auto nu = haar_average(apex, nu0);
      CHECK(flow_invariance_gap(apex, nu) == 0.0);
      CHECK(haar_average(apex, nu) == nu);
    }
  }

  TEST_CASE("verify_orbit_bound examples") {
    const auto reg = z3_regular();
    const std::vector<Measure> haar(4, Measure::uniform(3));
    const std::vector<Index> one{1};
    OrbitBoundOptions opt;
    opt.alphas = {0.2};
    const auto rep = verify_orbit_bound(reg, haar, Measure::uniform(3), one, opt);
    CHECK(rep.lhs == 1.0);
    CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.certified);
    CHECK(rep.holds);
    CHECK_FALSE(rep.violated());
    CHECK(rep.tail_start == 2);
    for (double v : rep.defects) CHECK(v == 0.0);

    const auto triv = trivial_flow(FiniteGroup::cyclic(3), path3());
    const std::vector<Index> all{0, 1, 2};
    const auto trep = verify_orbit_bound(triv, haar, Measure::uniform(3), all);
    CHECK(trep.lhs == 0.0);
    CHECK(trep.holds);

    const auto apex = cycle_with_apex_flow(4);
    const std::vector<Measure> haar4(2, Measure::uniform(4));
    const std::vector<Index> all4{0, 1, 2, 3};
    const auto arep = verify_orbit_bound(apex, haar4, Measure::point_mass(5, 4), all4);
    CHECK(arep.lhs == 0.0);
    CHECK(arep.certified);

    CHECK(kind_of([&] { verify_orbit_bound(reg, haar, Measure({0.5, 0.5, 0.0}), one); }) ==
          ErrorKind::NotInvariant);
  }

  TEST_CASE("fixed point search") {
    const auto triv = trivial_flow(FiniteGroup::cyclic(3), path3());
    CHECK(least_displaced_point(triv).value == 0.0);
    const auto apex = least_displaced_point(cycle_with_apex_flow(6));
    CHECK(apex.x0 == 6);
    CHECK(apex.value == 0.0);
    CHECK(least_displaced_point(z3_regular()).value == 1.0);
  }

  TEST_CASE("certified checks hold on random invariant cyclic flows") {
    Rng rng(23);
    for (int trial = 0; trial < 12; ++trial) {
      const std::size_t n = 3 + rng.below(5);
      const auto g = FiniteGroup::cyclic(n);
      const auto flow = regular_flow(g, random_cyclic_metric(n, rng));
      const std::vector<Measure> haar(2, Measure::uniform(n));
      const auto all = all_elements(g);
      std::vector<Index> e{all.begin(), all.begin() + 1 + static_cast<long>(rng.below(n))};
      const auto rep = verify_orbit_bound(flow, haar, Measure::uniform(n), e);
      CHECK(rep.certified);
      CHECK_FALSE(rep.violated());
      CHECK(least_displaced_point(flow).value <= rep.rhs + 1e-7);
    }
  }
}
