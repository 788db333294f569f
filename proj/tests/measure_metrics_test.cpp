#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mmconc/measure_metrics.hpp"
#include "support.hpp"

using namespace mmconc;

namespace {

FiniteMetricSpace two_points(double d) { return FiniteMetricSpace::unlabeled({0, d, d, 0}, 2); }

/// Vertices of the two-variable polytope |f0|, |f1| <= 1, |f0 - f1| <= d.
double d_mt_two_point_vertices(const Measure& mu, const Measure& nu, double d) {
  const double c0 = mu[0] - nu[0];
  const double c1 = mu[1] - nu[1];
  double best = 0.0;
  for (double f0 : {-1.0, 1.0}) {
    for (double f1 : {f0 - d, f0 + d, -1.0, 1.0}) {
      const double g1 = std::clamp(f1, -1.0, 1.0);
      if (std::abs(f0 - g1) > d + 1e-15) continue;
      best = std::max(best, std::abs(c0 * f0 + c1 * g1));
    }
  }
  return best;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an mmconc::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("measure_metrics") {
  TEST_CASE("d_mt examples") {
    const Measure a = Measure::point_mass(2, 0);
    const Measure b = Measure::point_mass(2, 1);
    CHECK(d_mt(a, a, two_points(1.0)) == 0.0);
    CHECK(d_mt(a, b, two_points(3.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d_mt(a, b, two_points(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kind_of([&] { d_mt(a, Measure::uniform(3), two_points(1.0)); }) == ErrorKind::DimensionMismatch);
  }

  TEST_CASE("d_mt matches two-point vertex enumeration") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
      const double d = rng.uniform(0.01, 3.0);
      const Measure mu = testing::random_measure(2, rng);
      const Measure nu = testing::random_measure(2, rng);
      CHECK(d_mt(mu, nu, two_points(d)) == doctest::Approx(d_mt_two_point_vertices(mu, nu, d)).epsilon(1e-10));
    }
  }

  TEST_CASE("d_mt matches the dense primal LP and its witness is optimal") {
    Rng rng(32);
    for (int t = 0; t < 150; ++t) {
      const std::size_t n = 1 + rng.below(14);
      const auto x = testing::random_space(n, rng);
      const Measure mu = testing::random_measure(n, rng, rng.coin());
      const Measure nu = testing::random_measure(n, rng, rng.coin());
      const auto sol = d_mt_solution(mu, nu, x);
      CHECK(sol.value == doctest::Approx(testing::d_mt_primal(mu, nu, x)).epsilon(1e-9));
      const RealFunction w(sol.witness);
      CHECK(is_lipschitz(w, x, 1.0));
      CHECK(w.sup_norm() <= 1.0 + 1e-9);
      CHECK(integral_gap(w, mu, nu) == doctest::Approx(sol.value).epsilon(1e-9));
    }
  }

  TEST_CASE("d_mt on larger and tied instances") {
    Rng rng(33);
    for (int t = 0; t < 6; ++t) {
      const std::size_t n = 25 + rng.below(20);
      const auto x = testing::random_graph_metric(n, rng, 0.25, 1.5, true);
      const Measure mu = testing::random_measure(n, rng, true);
      const Measure nu = testing::random_measure(n, rng, true);
      CHECK(d_mt(mu, nu, x) == doctest::Approx(testing::d_mt_primal(mu, nu, x)).epsilon(1e-9));
    }
    // pseudo-metric with zero distances
    const auto pseudo = FiniteMetricSpace::unlabeled({0, 0, 1, 0, 0, 1, 1, 1, 0}, 3, true);
    CHECK(d_mt(Measure::point_mass(3, 0), Measure::point_mass(3, 1), pseudo) == 0.0);
    CHECK(d_mt(Measure::point_mass(3, 0), Measure::point_mass(3, 2), pseudo) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("d_mt dominates candidate functionals") {
    Rng rng(34);
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 2 + rng.below(8);
      const auto x = testing::random_space(n, rng);
      const Measure mu = testing::random_measure(n, rng);
      const Measure nu = testing::random_measure(n, rng);
      std::vector<RealFunction> family;
      for (const auto& f : lip1_candidates(x, n + 30, t)) family.push_back(truncate(f, 1.0));
      for (const auto& f : lip1_candidates(x, n + 30, t)) family.push_back(truncate(f.shifted(-f.max() / 2), 1.0));
      CHECK(invariance_equivalence_check(mu, nu, x, family) <= d_mt(mu, nu, x) + 1e-9);
    }
  }

  TEST_CASE("invariance_equivalence_check examples") {
    const auto x = two_points(1.0);
    const Measure a = Measure::point_mass(2, 0);
    const Measure b = Measure::point_mass(2, 1);
    const std::vector<RealFunction> zero{RealFunction::constant(2, 0.0)};
    CHECK(invariance_equivalence_check(a, b, x, zero) == 0.0);
    const std::vector<RealFunction> dist{RealFunction({0, 1}), RealFunction({1, 0})};
    CHECK(invariance_equivalence_check(a, b, x, dist) == 1.0);
    CHECK(invariance_equivalence_check(a, b, x, dist) == doctest::Approx(d_mt(a, b, x)).epsilon(1e-12));
    CHECK(invariance_equivalence_check(a, a, x, dist) == 0.0);
    const std::vector<RealFunction> bad{RealFunction({0, 2})};
    CHECK(kind_of([&] { invariance_equivalence_check(a, b, x, bad); }) == ErrorKind::BadFamily);
  }

  TEST_CASE("d_prokhorov examples") {
    const Measure a = Measure::point_mass(2, 0);
    const Measure b = Measure::point_mass(2, 1);
    CHECK(d_prokhorov(a, a, two_points(1.0)) == 0.0);
    CHECK(d_prokhorov(a, b, two_points(0.4)) == 0.4);
    CHECK(d_prokhorov(Measure({0.7, 0.3}), Measure({0.3, 0.7}), two_points(1.0)) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d_prokhorov(a, b, two_points(3.0)) == 1.0);
  }

  TEST_CASE("d_prokhorov_oracle examples") {
    const Measure a = Measure::point_mass(2, 0);
    const Measure b = Measure::point_mass(2, 1);
    CHECK(d_prokhorov_oracle(a, a, two_points(1.0)).value == 0.0);
    for (double d : {0.1, 0.4, 0.99, 1.0, 2.5}) {
      CHECK(d_prokhorov_oracle(a, b, two_points(d)).value == std::min(d, 1.0));
    }
    std::vector<double> ones(21 * 21, 1.0);
    for (std::size_t i = 0; i < 21; ++i) ones[i * 21 + i] = 0.0;
    const auto big = FiniteMetricSpace::unlabeled(ones, 21);
    CHECK(kind_of([&] { d_prokhorov_oracle(Measure::uniform(21), Measure::uniform(21), big); }) ==
          ErrorKind::TooLarge);
  }

  TEST_CASE("d_prokhorov equals the subset oracle") {
    Rng rng(35);
    for (int t = 0; t < 150; ++t) {
      const std::size_t n = 1 + rng.below(10);
      const auto x = rng.coin() ? testing::random_graph_metric(n, rng, 0.1, 1.2, true)
                                : testing::random_space(n, rng);
      Measure mu = testing::random_measure(n, rng, rng.coin());
      Measure nu = testing::random_measure(n, rng, rng.coin());
      if (rng.coin(0.3)) {
        // coarse weights make mass ties with distances likely
        std::vector<double> w(n), v(n);
        for (auto& c : w) c = static_cast<double>(rng.below(5));
        for (auto& c : v) c = static_cast<double>(rng.below(5));
        w[0] += 1;
        v[n - 1] += 1;
        mu = Measure::normalized(w);
        nu = Measure::normalized(v);
      }
      const auto oracle = d_prokhorov_oracle(mu, nu, x);
      CHECK(oracle.mu_over_nu == doctest::Approx(oracle.nu_over_mu).epsilon(1e-9));
      CHECK(d_prokhorov(mu, nu, x) == doctest::Approx(oracle.value).epsilon(1e-9));
    }
  }

  TEST_CASE("metric axioms") {
    Rng rng(36);
    for (int t = 0; t < 100; ++t) {
      const std::size_t n = 1 + rng.below(10);
      const auto x = testing::random_space(n, rng);
      const Measure a = testing::random_measure(n, rng, rng.coin());
      const Measure b = testing::random_measure(n, rng, rng.coin());
      const Measure c = testing::random_measure(n, rng, rng.coin());
      for (auto dist : {&d_mt, &d_prokhorov}) {
        CHECK((*dist)(a, a, x) == 0.0);
        CHECK((*dist)(a, b, x) == doctest::Approx((*dist)(b, a, x)).epsilon(1e-9));
        CHECK((*dist)(a, c, x) <= (*dist)(a, b, x) + (*dist)(b, c, x) + 1e-7);
        if (!(a == b)) CHECK((*dist)(a, b, x) > 0.0);
      }
      // comparison between the two metrics
      const double p = d_prokhorov(a, b, x);
      const double m = d_mt(a, b, x);
      CHECK(p * p <= m + 1e-9);
      CHECK(m <= 3.0 * p + 1e-9);
    }
  }

  TEST_CASE("ky_fan") {
    const Measure mu = Measure::uniform(3);
    const RealFunction f({0, 1, 2});
    CHECK(ky_fan(f, f, mu) == 0.0);
    CHECK(ky_fan(f, f.shifted(0.3), mu) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(ky_fan(f, f.shifted(2.0), mu) == 1.0);
    CHECK(ky_fan(RealFunction({0, 0}), RealFunction({0, 1}), Measure::uniform(2)) == 0.5);
    CHECK(kind_of([&] { ky_fan(f, RealFunction({0}), mu); }) == ErrorKind::DimensionMismatch);

    Rng rng(37);
    for (int t = 0; t < 200; ++t) {
      const std::size_t n = 1 + rng.below(8);
      const Measure m = testing::random_measure(n, rng, true);
      auto rf = [&] {
        std::vector<double> v(n);
        for (double& c : v) c = std::round(rng.uniform(-2, 2) * 4) / 4;
        return RealFunction(v);
      };
      const auto g = rf(), h = rf(), k = rf();
      CHECK(ky_fan(g, h, m) == ky_fan(h, g, m));
      CHECK(ky_fan(g, k, m) <= ky_fan(g, h, m) + ky_fan(h, k, m) + 1e-12);
      const double v = ky_fan(g, h, m);
      // definition: the tail at v is at most v, and any smaller eps fails
      double tail = 0.0, tail_below = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (std::abs(g[i] - h[i]) > v) tail += m[i];
        if (std::abs(g[i] - h[i]) > v - 1e-9) tail_below += m[i];
      }
      CHECK(tail <= v + 1e-12);
      if (v > 1e-9) CHECK(tail_below > v - 1e-9 - 1e-12);
    }
  }
}
