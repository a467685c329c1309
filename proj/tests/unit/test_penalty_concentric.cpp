#include "multibang/penalty_concentric.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace multibang;

namespace {

bool same_points(std::vector<Vec2> a, std::vector<Vec2> b) {
  auto less = [](const Vec2 &x, const Vec2 &y) {
    return x.x() < y.x() || (x.x() == y.x() && x.y() < y.y());
  };
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (std::size_t k = 0; k < a.size(); ++k)
    if ((a[k] - b[k]).norm() > 1e-15) return false;
  return true;
}

} // namespace

TEST_CASE("concentric vertices") {
  const auto &v = ConcentricSet::vertices();
  CHECK(v.size() == 8);
  CHECK(ConcentricSet::vertex(1, 1, -1) == Vec2(1, 1));
  CHECK(ConcentricSet::vertex(-1, 1, 1) == Vec2(-2, 2));
}

TEST_CASE("concentric conjugate") {
  const double a = 1e-3;
  CHECK(conjugate_concentric(Vec2(0, 0), a) == doctest::Approx(-1e-3).epsilon(1e-15));
  CHECK(conjugate_concentric(Vec2(3 * a, 0), a) == doctest::Approx(2 * a).epsilon(1e-14));
  CHECK(conjugate_concentric(Vec2(10, 10), a) == doctest::Approx(39.996).epsilon(1e-15));
  const auto set = ConcentricSet::admissible_set(a);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 q = testing::uniform_point(rng, 5);
    CHECK(conjugate_concentric(q, a) == doctest::Approx(conjugate_oracle(q, set)).epsilon(1e-14));
  }
}

TEST_CASE("concentric subdifferential") {
  const double a = 1e-3;
  CHECK(same_points(subdiff_concentric(Vec2(10, 10), a).vertices, {Vec2(2, 2)}));
  CHECK(same_points(subdiff_concentric(Vec2(0, 2 * a), a).vertices, {Vec2(-1, 1), Vec2(1, 1)}));
  CHECK(same_points(subdiff_concentric(Vec2(1.5 * a, 1.5 * a), a).vertices,
                    {Vec2(1, 1), Vec2(2, 2)}));
}

TEST_CASE("concentric classification") {
  const PenaltyParams p(1e-3, 1e-2);
  CHECK(classify_concentric(Vec2(0, 0), p) == ConcentricRegion{0, 0, -1});
  CHECK(classify_concentric(Vec2(10, 10), p) == ConcentricRegion{1, 1, 1});
  CHECK(classify_concentric(Vec2(3e-3 + 1.5e-2, 0), p) == ConcentricRegion{1, 0, 0});
}

TEST_CASE("concentric prox and regularization") {
  const PenaltyParams p(1e-3, 1e-2);
  CHECK(prox_concentric(Vec2(0, 0), p) == Vec2(0, 0));
  CHECK((prox_concentric(Vec2(10, 10), p) - Vec2(9.98, 9.98)).norm() <= 1e-14);
  CHECK(my_concentric(Vec2(0, 0), p) == Vec2(0, 0));
  CHECK(my_concentric(Vec2(10, 10), p) == Vec2(2, 2));
  CHECK(newton_deriv_concentric(Vec2(10, 10), p).norm() == 0.0);
  CHECK((newton_deriv_concentric(Vec2(0, 0), p) - Mat2::Identity() / 1e-2).norm() == 0.0);

  const PenaltyParams small(1e-3, 1e-5);
  const Vec2 q(3e-3 + 1.5e-5, 0);
  CHECK(classify_concentric(q, small).k == 0);
  const Vec2 h = my_concentric(q, small);
  CHECK((h - (q - prox_concentric(q, small)) / 1e-5).norm() <= 1e-9);
  CHECK(h.x() >= 1.0 - 1e-12);
  CHECK(h.x() <= 2.0 + 1e-12);
}

TEST_CASE("concentric prox matches the oracle") {
  std::mt19937_64 rng(19);
  for (const auto &[alpha, gamma] : {std::pair{0.1, 0.1}, {1e-3, 1e-2}, {1e-3, 1e-5}}) {
    const auto set = ConcentricSet::admissible_set(alpha);
    const PenaltyParams p(alpha, gamma);
    for (int k = 0; k < 150; ++k) {
      const Vec2 q = testing::uniform_point(rng, 5);
      CHECK((prox_concentric(q, p) - prox_oracle(q, set, p)).norm() <= 1e-6);
    }
  }
}

TEST_CASE("concentric regularization commutes with the square symmetries") {
  std::mt19937_64 rng(29);
  for (const auto &[alpha, gamma] : {std::pair{0.1, 0.1}, {1e-3, 1e-2}, {1e-3, 1e-5}}) {
    const PenaltyParams p(alpha, gamma);
    for (int k = 0; k < 2000; ++k) {
      const Vec2 q = testing::uniform_point(rng, 5);
      const Vec2 h = my_concentric(q, p);
      for (int sx : {-1, 1})
        for (int sy : {-1, 1}) {
          const Vec2 f(sx * q.x(), sy * q.y());
          const Vec2 hf(sx * h.x(), sy * h.y());
          CHECK(my_concentric(f, p) == hf);
          CHECK(my_concentric(Vec2(f.y(), f.x()), p) == Vec2(hf.y(), hf.x()));
        }
    }
  }
}

TEST_CASE("concentric structural properties") {
  const auto pen = Penalty::concentric(1e-3);
  for (double gamma : {0.1, 1e-2, 1e-5}) {
    testing::check_penalty_properties(pen, gamma, 3000, 3.0, 43);
    testing::check_continuity_across_strata(pen, gamma, 1000, 3.0, 47);
  }
  testing::check_penalty_properties(Penalty::concentric(0.1), 0.1, 3000, 5.0, 53);
}
