#include "multibang/penalty_radial.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <numbers>

using namespace multibang;
using std::numbers::pi;

TEST_CASE("radial set construction") {
  const RadialSet s = testing::radial_m3();
  CHECK(s.size() == 3);
  CHECK(s.vertex(0).norm() == 0.0);
  for (int i = 1; i <= 3; ++i) {
    CHECK(s.vertex(i).norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.midpoint(i).norm() == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(s.next(3) == 1);
  CHECK(s.prev(1) == 3);
  CHECK_THROWS_AS(RadialSet(1.0, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialSet(1.0, {0.0, 2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialSet(1.0, {0.0, 0.1, 0.2}), std::invalid_argument); // periodic gap > pi
  CHECK_THROWS_AS(RadialSet(0.0, {-pi, -pi / 3, pi / 3}), std::invalid_argument);
}

TEST_CASE("sectors are closest vertex directions with ties to the lower index") {
  const RadialSet s = testing::radial_m3();
  for (int i = 1; i <= 3; ++i) CHECK(s.sector(2.0 * s.vertex(i)) == i);
  CHECK(s.sector(s.midpoint(1)) == 1);
  CHECK(s.sector(s.midpoint(2)) == 2);
  CHECK(s.sector(s.midpoint(3)) == 1);
}

TEST_CASE("radial conjugate") {
  const RadialSet s = testing::radial_m3();
  CHECK(conjugate_radial(Vec2(0, 0), s, 0.1) == 0.0);
  CHECK(conjugate_radial(Vec2(1, 0), s, 0.1) == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(conjugate_radial(0.04 * s.vertex(2), s, 0.1) == 0.0);
  std::mt19937_64 rng(3);
  const auto set = s.admissible_set(0.1);
  for (int k = 0; k < 5000; ++k) {
    const Vec2 q = testing::uniform_point(rng, 5);
    CHECK(std::abs(conjugate_radial(q, s, 0.1) - conjugate_oracle(q, set)) <= 1e-12);
  }
}

TEST_CASE("radial subdifferential") {
  const RadialSet s = testing::radial_m3();
  const auto a = subdiff_radial(Vec2(0, 0), s, 0.1);
  REQUIRE(a.vertices.size() == 1);
  CHECK(a.vertices[0].norm() == 0.0);
  const auto b = subdiff_radial(3.0 * s.vertex(2), s, 0.1);
  REQUIRE(b.vertices.size() == 1);
  CHECK((b.vertices[0] - s.vertex(2)).norm() == 0.0);
  const auto c = subdiff_radial(0.05 * s.vertex(2), s, 0.1);
  REQUIRE(c.vertices.size() == 2);
  CHECK(c.vertices[0].norm() == 0.0);
  CHECK((c.vertices[1] - s.vertex(2)).norm() == 0.0);
}

TEST_CASE("radial classification") {
  const RadialSet s = testing::radial_m3();
  const PenaltyParams p(0.1, 0.1);
  CHECK(classify_radial(Vec2(0, 0), s, p).kind == RadialKind::Q0);
  const auto r = classify_radial(2.0 * s.vertex(3), s, p);
  CHECK(r.kind == RadialKind::Qi);
  CHECK(r.i == 3);
  CHECK(r.aux.rho_q == doctest::Approx(2.0));
  const auto t = classify_radial(0.07 * s.vertex(2), s, p);
  CHECK(t.kind == RadialKind::Q0i);
  CHECK(t.i == 2);
  CHECK(!t.aux.fallback);
}

TEST_CASE("radial prox, regularization and Newton derivative values") {
  const RadialSet s = testing::radial_m3();
  const PenaltyParams p(0.1, 0.1);
  CHECK(prox_radial(Vec2(0, 0), s, p).norm() == 0.0);
  CHECK((prox_radial(2.0 * s.vertex(3), s, p) - 1.9 * s.vertex(3)).norm() <= 1e-15);
  CHECK(my_radial(2.0 * s.vertex(3), s, p) == s.vertex(3));
  CHECK(my_radial(Vec2(0.01, 0.0), s, p).norm() == 0.0);
  CHECK((my_radial(0.07 * s.vertex(2), s, p) - 0.2 * s.vertex(2)).norm() <= 1e-14);
  CHECK(newton_deriv_radial(2.0 * s.vertex(3), s, p).norm() == 0.0);
  // between two vertices with small projection onto both
  const Vec2 q(0.13, 0.0);
  const auto region = classify_radial(q, s, p);
  CHECK(region.kind == RadialKind::Q0ii1);
  CHECK((newton_deriv_radial(q, s, p) - Mat2::Identity() / 0.1).norm() <= 1e-12);
}

TEST_CASE("radial prox matches the oracle") {
  const RadialSet s = testing::radial_m3();
  std::mt19937_64 rng(17);
  for (const auto &[alpha, gamma] : {std::pair{0.1, 0.1}, {1e-3, 1e-2}, {1e-3, 1e-5}}) {
    const auto set = s.admissible_set(alpha);
    const PenaltyParams p(alpha, gamma);
    for (int k = 0; k < 150; ++k) {
      const Vec2 q = testing::uniform_point(rng, 5);
      CHECK((prox_radial(q, s, p) - prox_oracle(q, set, p)).norm() <= 1e-6);
    }
  }
}

TEST_CASE("radial labels are stable away from boundaries") {
  const RadialSet s = testing::radial_m3();
  const PenaltyParams p(0.1, 0.1);
  std::mt19937_64 rng(23);
  int stable = 0;
  for (int k = 0; k < 100000; ++k) {
    const Vec2 q = testing::uniform_point(rng, 3);
    const auto r = classify_radial(q, s, p);
    bool near = false;
    for (int d = 0; d < 2 && !near; ++d)
      for (double sg : {-1e-9, 1e-9})
        if (!(classify_radial(q + sg * Vec2::Unit(d), s, p) == r)) near = true;
    if (near) continue;
    ++stable;
    const Vec2 e = 1e-12 * testing::uniform_point(rng, 1);
    CHECK(classify_radial(q + e, s, p) == r);
  }
  CHECK(stable > 99000);
}

TEST_CASE("radial structural properties") {
  const auto pen = Penalty::radial(testing::radial_m3(), 0.1);
  for (double gamma : {0.1, 1e-2, 1e-5}) {
    testing::check_penalty_properties(pen, gamma, 3000, 3.0, 31);
    testing::check_continuity_across_strata(pen, gamma, 1000, 3.0, 37);
  }
  const auto six = Penalty::radial(
      RadialSet(1.0, {-pi, -2 * pi / 3, -pi / 3, 0.0, pi / 3, 2 * pi / 3}), 0.1);
  testing::check_penalty_properties(six, 0.05, 3000, 3.0, 41);
}
