#include "multibang/penalty_concentric.hpp"
#include "multibang/prox_kernel.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <limits>

using namespace multibang;

namespace {

AdmissibleSet radial_set(double alpha) { return testing::radial_m3().admissible_set(alpha); }

} // namespace

TEST_CASE("admissible set rejects bad input") {
  CHECK_THROWS_AS(AdmissibleSet({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(AdmissibleSet({Vec2(1, 0), Vec2(1, 0)}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(AdmissibleSet({Vec2(1, 0)}, 0.0), std::invalid_argument);
  const AdmissibleSet s({Vec2(3, 4)}, 0.5);
  CHECK(s.costs()[0] == doctest::Approx(0.5 * 25 / 2));
}

TEST_CASE("conjugate oracle values") {
  CHECK(conjugate_oracle(Vec2(0, 0), radial_set(0.1)) == 0.0);
  CHECK(conjugate_oracle(Vec2(1, 0), radial_set(0.1)) == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(conjugate_oracle(Vec2(0, 0), ConcentricSet::admissible_set(1e-3)) ==
        doctest::Approx(-1e-3).epsilon(1e-15));
}

TEST_CASE("prox oracle values") {
  const Vec2 u3 = testing::radial_m3().vertex(3);
  CHECK(prox_oracle(Vec2(0, 0), radial_set(0.1), {0.1, 0.1}).norm() <= 1e-9);
  const Vec2 w = prox_oracle(2.0 * u3, radial_set(0.1), {0.1, 0.1});
  CHECK((w - Vec2(0.95, 1.6454482671904334)).norm() <= 1e-8);
  const Vec2 c = prox_oracle(Vec2(10, 10), ConcentricSet::admissible_set(1e-3), {1e-3, 1e-2});
  CHECK((c - Vec2(9.98, 9.98)).norm() <= 1e-8);
}

TEST_CASE("penalty value by enumeration") {
  const auto rs = radial_set(0.1);
  for (const auto &v : rs.points()) CHECK(penalty_value(v, rs) == doctest::Approx(0.05 * v.squaredNorm()));
  const auto cs = ConcentricSet::admissible_set(1e-3);
  CHECK(penalty_value(Vec2(0, 0), cs) == doctest::Approx(1e-3).epsilon(1e-13));
  CHECK(penalty_value(Vec2(100, 100), cs) == std::numeric_limits<double>::infinity());
  // edge midpoint between (1,1) and (2,2): cost (1 + 4) / 2 * alpha
  CHECK(penalty_value(Vec2(1.5, 1.5), cs) == doctest::Approx(2.5e-3).epsilon(1e-13));
}

TEST_CASE("inclusion distance") {
  const SubgradientSet with_zero{{Vec2(0, 0), Vec2(1, 0)}};
  CHECK(subgradient_inclusion_distance(Vec2(1, 2), Vec2(1, 2), with_zero, {0.1, 0.1}) == 0.0);
  const SubgradientSet tri{{Vec2(1, 0), Vec2(0, 1), Vec2(-1, -1)}};
  const Vec2 w(0.3, 0.2);
  CHECK(subgradient_inclusion_distance(w + 0.5 * Vec2(0, 1), w, tri, {1.0, 0.5}) <= 1e-15);
  CHECK(subgradient_inclusion_distance(w + 0.5 * Vec2(3, 0), w, tri, {1.0, 0.5}) ==
        doctest::Approx(2.0));
}

TEST_CASE("conjugate oracle is convex along lines") {
  std::mt19937_64 rng(7);
  for (const auto &set : {radial_set(0.1), ConcentricSet::admissible_set(1e-3)})
    for (int s = 0; s < 2000; ++s) {
      const Vec2 a = testing::uniform_point(rng, 5), b = testing::uniform_point(rng, 5);
      const double mid = conjugate_oracle(0.5 * (a + b), set);
      CHECK(mid <= 0.5 * (conjugate_oracle(a, set) + conjugate_oracle(b, set)) + 1e-12);
    }
}

TEST_CASE("prox oracle is nonexpansive and satisfies Fenchel-Young") {
  std::mt19937_64 rng(11);
  for (const auto &set : {radial_set(0.1), ConcentricSet::admissible_set(1e-3)}) {
    const PenaltyParams params(set.alpha(), 0.1);
    for (int s = 0; s < 40; ++s) {
      const Vec2 q1 = testing::uniform_point(rng, 3), q2 = testing::uniform_point(rng, 3);
      const Vec2 w1 = prox_oracle(q1, set, params), w2 = prox_oracle(q2, set, params);
      CHECK((w1 - w2).norm() <= (q1 - q2).norm() + 1e-6);
      // v = (q - w) / gamma is a subgradient of g* at w, so g(v) + g*(w) = <v, w>
      // (oracle resolution may put v a hair outside co M, then g(v) = inf)
      const Vec2 v = (q1 - w1) / params.gamma;
      const double gv = penalty_value(v, set);
      if (!std::isfinite(gv)) {
        CHECK(distance_to_hull(v, set.points()) <= 1e-6);
        continue;
      }
      const double gap = gv + conjugate_oracle(w1, set) - v.dot(w1);
      CHECK(gap >= -1e-8);
      CHECK(gap <= 1e-6);
    }
  }
}

TEST_CASE("penalty value is convex inside the hull and dominated by Fenchel-Young") {
  std::mt19937_64 rng(5);
  const auto set = ConcentricSet::admissible_set(1e-3);
  for (int s = 0; s < 500; ++s) {
    const Vec2 a = testing::uniform_point(rng, 2), b = testing::uniform_point(rng, 2);
    const double ga = penalty_value(a, set), gb = penalty_value(b, set);
    CHECK(penalty_value(0.5 * (a + b), set) <= 0.5 * (ga + gb) + 1e-12);
    const Vec2 q = testing::uniform_point(rng, 5);
    CHECK(ga + conjugate_oracle(q, set) >= a.dot(q) - 1e-8);
  }
}
