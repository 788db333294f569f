#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mmconc/groups.hpp"
#include "mmconc/measure_metrics.hpp"
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

Index label_index(const FiniteGroup& g, const std::string& label) {
  auto it = std::find(g.labels().begin(), g.labels().end(), label);
  REQUIRE(it != g.labels().end());
  return static_cast<Index>(it - g.labels().begin());
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_SUITE("groups") {
  TEST_CASE("cyclic and hypercube tables") {
    const auto z4 = FiniteGroup::cyclic(4);
    CHECK(z4.order() == 4);
    CHECK(z4.identity() == 0);
    CHECK(z4.mul(1, 3) == 0);
    CHECK(z4.mul(2, 3) == 1);
    CHECK(z4.inverse(1) == 3);

    const auto h3 = FiniteGroup::hypercube(3);
    CHECK(h3.order() == 8);
    for (Index a = 0; a < 8; ++a) {
      CHECK(h3.inverse(a) == a);
      for (Index b = 0; b < 8; ++b) CHECK(h3.mul(a, b) == (a ^ b));
    }
  }

  TEST_CASE("symmetric group follows apply-left-then-right") {
    const auto s3 = FiniteGroup::sym(3);
    CHECK(s3.order() == 6);
    CHECK(s3.labels().front() == "012");
    CHECK(s3.identity() == 0);
    for (Index a = 0; a < 6; ++a)
      for (Index b = 0; b < 6; ++b) {
        const auto pa = sym_permutation(3, a), pb = sym_permutation(3, b);
        std::vector<std::size_t> composed(3);
        for (std::size_t i = 0; i < 3; ++i) composed[i] = pb[pa[i]];
        CHECK(s3.mul(a, b) == sym_rank(composed));
      }
    for (Index r = 0; r < 24; ++r) CHECK(sym_rank(sym_permutation(4, r)) == r);
  }

  TEST_CASE("normalized Hamming on Sym(3)") {
    const auto d = sym_hamming_space(3);
    const auto s3 = FiniteGroup::sym(3);
    // (12) in one-line notation swaps the last two positions.
    CHECK(d(0, label_index(s3, "021")) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(d(0, label_index(s3, "120")) == doctest::Approx(1.0));
    CHECK_NOTHROW(RightInvariantMetric(s3, d));
  }

  TEST_CASE("cyclic geodesic distances") {
    const auto d = cyclic_geodesic_space(4, false);
    CHECK(d(0, 1) == 1.0);
    CHECK(d(0, 2) == 2.0);
    CHECK(d(0, 3) == 1.0);
    const auto dn = cyclic_geodesic_space(5, true);
    CHECK(dn.diameter() == doctest::Approx(1.0));
  }

  TEST_CASE("group validation errors") {
    CHECK(kind_of([] { FiniteGroup({{0, 1}, {1, 1}}); }) == ErrorKind::NotAGroup);
    CHECK(kind_of([] { FiniteGroup({{0, 2}, {1, 0}}); }) == ErrorKind::NotAGroup);
    CHECK(kind_of([] { FiniteGroup::sym(8); }) == ErrorKind::TooLarge);
    CHECK(kind_of([] { FiniteGroup::cyclic(3).check_element(3); }) == ErrorKind::BadElement);
    // A path metric on Z_3 is not translation invariant.
    const auto z3 = FiniteGroup::cyclic(3);
    const auto path = FiniteMetricSpace::unlabeled({0, 1, 2, 1, 0, 1, 2, 1, 0}, 3);
    CHECK(kind_of([&] { RightInvariantMetric(z3, path); }) == ErrorKind::NotInvariant);
  }

  TEST_CASE("weighted Sym metric is right- but not left-invariant") {
    const auto s3 = FiniteGroup::sym(3);
    const std::vector<double> w{0.5, 0.25, 0.125};
    const auto d = sym_weighted_space(3, w);
    CHECK_NOTHROW(RightInvariantMetric(s3, d));
    bool left_invariant = true;
    for (Index k = 0; k < 6; ++k)
      for (Index a = 0; a < 6; ++a)
        for (Index b = 0; b < 6; ++b)
          if (std::abs(d(s3.mul(k, a), s3.mul(k, b)) - d(a, b)) > 1e-15) left_invariant = false;
    CHECK_FALSE(left_invariant);
  }

  TEST_CASE("support product density") {
    const auto z4 = FiniteGroup::cyclic(4);
    const std::vector<Measure> mus{Measure({0.5, 0.5, 0.0, 0.0})};
    CHECK(support_product_density(mus, z4) == IndexSet{0, 1, 3});
  }

  TEST_CASE("sign homomorphism") {
    const auto s3 = FiniteGroup::sym(3);
    const auto z2 = FiniteGroup::cyclic(2);
    const auto sign = sign_homomorphism(s3, 3, z2);
    CHECK(sign(0) == 0);
    CHECK(sign(label_index(s3, "021")) == 1);
    CHECK(sign(label_index(s3, "120")) == 0);
    std::vector<Index> bad(6, 0);
    bad[1] = 1;
    CHECK(kind_of([&] { GroupHomomorphism(s3, z2, bad); }) == ErrorKind::NotHomomorphism);
    const auto triv = trivial_homomorphism(s3, z2);
    for (Index g = 0; g < 6; ++g) CHECK(triv(g) == 0);
  }

  TEST_CASE("Haar measure has zero defect up to Sym(6)") {
    for (std::size_t n = 2; n <= 6; ++n) {
      const auto g = FiniteGroup::sym(n);
      const RightInvariantMetric d(g, sym_hamming_space(n));
      const auto defects = invariance_defects(Measure::uniform(g.order()), g, d);
      CHECK(*std::max_element(defects.begin(), defects.end()) == 0.0);
    }
    const auto z7 = FiniteGroup::cyclic(7);
    const RightInvariantMetric dz(z7, cyclic_geodesic_space(7, true));
    for (double v : invariance_defects(Measure::uniform(7), z7, dz)) CHECK(v == 0.0);
  }

  TEST_CASE("defect on Z_2 matches the two-point closed form") {
    // On two points at distance t, d_MT(mu, nu) = |mu_0 - nu_0| * min(t, 2).
    const auto z2 = FiniteGroup::cyclic(2);
    for (double t : {0.25, 1.0, 3.0}) {
      const RightInvariantMetric d(z2, FiniteMetricSpace::unlabeled({0, t, t, 0}, 2));
      const Measure mu({0.8, 0.2});
      CHECK(invariance_defect(mu, 1, z2, d) == doctest::Approx(0.6 * std::min(t, 2.0)).epsilon(1e-12));
      CHECK(invariance_defect(mu, 0, z2, d) == 0.0);
    }
  }

  TEST_CASE("translations conserve mass exactly") {
    Rng rng(11);
    const auto s4 = FiniteGroup::sym(4);
    for (int trial = 0; trial < 20; ++trial) {
      const auto mu = testing::random_measure(24, rng, true);
      const Index g = rng.below(24);
      const auto left = left_translate_measure(mu, g, s4);
      const auto right = right_translate_measure(mu, g, s4);
      CHECK(sorted(left.weights()) == sorted(mu.weights()));
      CHECK(sorted(right.weights()) == sorted(mu.weights()));
      for (Index x = 0; x < 24; ++x) {
        CHECK(left[s4.mul(g, x)] == mu[x]);
        CHECK(right[s4.mul(x, g)] == mu[x]);
      }
    }
  }

  TEST_CASE("defect triangle bound on bi-invariant metrics") {
    Rng rng(12);
    const auto s3 = FiniteGroup::sym(3);
    const RightInvariantMetric ds(s3, sym_hamming_space(3));
    const auto z6 = FiniteGroup::cyclic(6);
    const RightInvariantMetric dz(z6, cyclic_geodesic_space(6, false));
    for (int trial = 0; trial < 40; ++trial) {
      const bool sym = trial % 2 == 0;
      const auto& group = sym ? s3 : z6;
      const auto& d = sym ? ds : dz;
      const auto mu = testing::random_measure(6, rng, trial % 3 == 0);
      const Index g = rng.below(6), h = rng.below(6);
      const double lhs = invariance_defect(mu, group.mul(g, h), group, d);
      CHECK(lhs <= invariance_defect(mu, g, group, d) + invariance_defect(mu, h, group, d) + 1e-9);
    }
  }

  TEST_CASE("right translation keeps every defect") {
    Rng rng(13);
    const auto s3 = FiniteGroup::sym(3);
    const RightInvariantMetric d(s3, sym_hamming_space(3));
    for (int trial = 0; trial < 20; ++trial) {
      const auto mu = testing::random_measure(6, rng);
      const auto moved = right_translate_measure(mu, rng.below(6), s3);
      const auto a = invariance_defects(mu, s3, d);
      const auto b = invariance_defects(moved, s3, d);
      for (std::size_t g = 0; g < 6; ++g) CHECK(a[g] == doctest::Approx(b[g]).epsilon(1e-9));
    }
  }

  TEST_CASE("defect through a homomorphism equals the pulled-back defect") {
    // Functions 1-Lipschitz for the pulled-back pseudo-metric factor through
    // the homomorphism, so both transport values coincide.
    Rng rng(14);
    const auto s3 = FiniteGroup::sym(3);
    const auto z2 = FiniteGroup::cyclic(2);
    const auto sign = sign_homomorphism(s3, 3, z2);
    const RightInvariantMetric dz(z2, FiniteMetricSpace::unlabeled({0, 0.7, 0.7, 0}, 2));
    const auto pulled = pull_back(sign, s3, dz);
    CHECK(pulled.base().is_pseudo());
    for (int trial = 0; trial < 20; ++trial) {
      const auto mu = testing::random_measure(6, rng);
      const auto image = pushforward_hom(mu, sign);
      CHECK(std::abs(image.weights()[0] + image.weights()[1] - 1.0) < 1e-12);
      const Index g = rng.below(6);
      CHECK(invariance_defect(mu, g, s3, pulled) ==
            doctest::Approx(invariance_defect(image, sign(g), z2, dz)).epsilon(1e-9));
    }
  }
}
