#include "multibang/penalty_concentric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace multibang {

const std::array<Vec2, 8> &ConcentricSet::vertices() {
  static const std::array<Vec2, 8> v = {
      Vec2(1, 1), Vec2(1, -1), Vec2(-1, 1), Vec2(-1, -1),
      Vec2(2, 2), Vec2(2, -2), Vec2(-2, 2), Vec2(-2, -2)};
  return v;
}

AdmissibleSet ConcentricSet::admissible_set(double alpha) {
  const auto &v = vertices();
  return AdmissibleSet(std::vector<Vec2>(v.begin(), v.end()), alpha);
}

double conjugate_concentric(const Vec2 &q, double alpha) {
  const double l1 = q.lpNorm<1>();
  return std::max(l1 - alpha, 2.0 * l1 - 4.0 * alpha);
}

namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace

SubgradientSet subdiff_concentric(const Vec2 &q, double alpha, double tol) {
  const double scale = 1.0 + q.lpNorm<1>() + alpha;
  const int i = std::abs(q.x()) <= tol * scale ? 0 : sgn(q.x());
  const int j = std::abs(q.y()) <= tol * scale ? 0 : sgn(q.y());
  const double kink = q.lpNorm<1>() - 3.0 * alpha;
  const int k = std::abs(kink) <= tol * scale ? 0 : sgn(kink);

  SubgradientSet out;
  // Iterate in vertex order: magnitude first, then sign pattern.
  for (int t : {-1, 1}) {
    for (int r : {1, -1}) {
      for (int s : {1, -1}) {
        if (std::abs(r - i) <= 1 && std::abs(s - j) <= 1 && std::abs(t - k) <= 1)
          out.vertices.push_back(ConcentricSet::vertex(r, s, t));
      }
    }
  }
  return out;
}

namespace {

bool valid_label(int i, int j, int k) {
  const int zeros = (i == 0) + (j == 0) + (k == 0);
  if (zeros == 0 || zeros == 1) return true;
  if (zeros == 2) return !(i == 0 && j == 0 && k != -1); // Q_{0,0,1} is empty
  return false;
}

Vec2 prox_formula(const Vec2 &q, const PenaltyParams &p, int i, int j, int k) {
  const double a3 = 3.0 * p.alpha;
  if (i != 0 && j != 0 && k != 0) return q - p.gamma * ConcentricSet::vertex(i, j, k);
  if (std::abs(i) + std::abs(j) + std::abs(k) == 1) return a3 * Vec2(i, j);
  if (i == 0 && k != 0) return Vec2(0.0, q.y() - p.gamma * 0.5 * (k + 3) * j);
  if (j == 0 && k != 0) return Vec2(q.x() - p.gamma * 0.5 * (k + 3) * i, 0.0);
  // k == 0, i, j != 0
  return q - 0.5 * (q.lpNorm<1>() - a3) * Vec2(i, j);
}

double prox_objective(const Vec2 &q, const Vec2 &w, const PenaltyParams &p) {
  return (w - q).squaredNorm() / (2.0 * p.gamma) + conjugate_concentric(w, p.alpha);
}

double eta(double x, const PenaltyParams &p) {
  const double a3 = 3.0 * p.alpha;
  if (x < a3 + p.gamma) return p.gamma;
  if (x <= a3 + 2.0 * p.gamma) return x - a3;
  return 2.0 * p.gamma;
}

} // namespace

ConcentricRegion classify_concentric(const Vec2 &q, const PenaltyParams &p) {
  const double a3 = 3.0 * p.alpha;
  const double q1 = std::abs(q.x()), q2 = std::abs(q.y());
  const double linf = std::max(q1, q2), l1 = q1 + q2;

  ConcentricRegion r;
  r.i = q1 <= eta(q2, p) ? 0 : sgn(q.x());
  r.j = q2 <= eta(q1, p) ? 0 : sgn(q.y());
  if (linf < a3 + p.gamma && l1 < a3 + 2.0 * p.gamma)
    r.k = -1;
  else if (linf > a3 + 2.0 * p.gamma || l1 > a3 + 4.0 * p.gamma)
    r.k = 1;
  else
    r.k = 0;

  // Certify the label against all candidate formulas (see penalty_radial).
  double best_val = std::numeric_limits<double>::infinity();
  ConcentricRegion best;
  for (int k = -1; k <= 1; ++k) {
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        if (!valid_label(i, j, k)) continue;
        const double v = prox_objective(q, prox_formula(q, p, i, j, k), p);
        if (v < best_val) {
          best_val = v;
          best.i = i;
          best.j = j;
          best.k = k;
        }
      }
    }
  }
  const double tol = 1e-12 * (1.0 + l1 * 2.0 + p.alpha);
  if (valid_label(r.i, r.j, r.k) &&
      prox_objective(q, prox_formula(q, p, r.i, r.j, r.k), p) <= best_val + tol)
    return r;
  best.fallback = true;
  return best;
}

Vec2 prox_concentric(const Vec2 &q, const PenaltyParams &p, const ConcentricRegion &r) {
  return prox_formula(q, p, r.i, r.j, r.k);
}

Vec2 prox_concentric(const Vec2 &q, const PenaltyParams &p) {
  return prox_concentric(q, p, classify_concentric(q, p));
}

Vec2 my_concentric(const Vec2 &q, const PenaltyParams &p, const ConcentricRegion &r) {
  const double g = p.gamma;
  const int i = r.i, j = r.j, k = r.k;
  if (i != 0 && j != 0 && k != 0) return ConcentricSet::vertex(i, j, k);
  if (std::abs(i) + std::abs(j) + std::abs(k) == 1) return (q - 3.0 * p.alpha * Vec2(i, j)) / g;
  if (i == 0 && k != 0) return Vec2(q.x() / g, 0.5 * (k + 3) * j);
  if (j == 0 && k != 0) return Vec2(0.5 * (k + 3) * i, q.y() / g);
  return ((q.lpNorm<1>() - 3.0 * p.alpha) / (2.0 * g)) * Vec2(i, j);
}

Vec2 my_concentric(const Vec2 &q, const PenaltyParams &p) {
  return my_concentric(q, p, classify_concentric(q, p));
}

Mat2 newton_deriv_concentric(const PenaltyParams &p, const ConcentricRegion &r) {
  const double g = p.gamma;
  const int i = r.i, j = r.j, k = r.k;
  if (i != 0 && j != 0 && k != 0) return Mat2::Zero();
  if (std::abs(i) + std::abs(j) + std::abs(k) == 1) return Mat2::Identity() / g;
  if (std::abs(i) + std::abs(j) == 1) {
    const Vec2 v(j, i);
    return (v * v.transpose()) / g;
  }
  const Vec2 v(i, j);
  return (v * v.transpose()) / (2.0 * g);
}

Mat2 newton_deriv_concentric(const Vec2 &q, const PenaltyParams &p) {
  return newton_deriv_concentric(p, classify_concentric(q, p));
}

} // namespace multibang
