#include "multibang/prox_kernel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace multibang {

namespace {

constexpr double kBarycentricTol = 1e-12;

// Initial grid is (2 * kCoarseHalf + 1)^2, refinement grids (2 * kFineHalf + 1)^2.
constexpr int kCoarseHalf = 100;
constexpr int kFineHalf = 8;
constexpr double kOracleResolution = 1e-9;

} // namespace

AdmissibleSet::AdmissibleSet(std::vector<Vec2> points, double alpha)
    : points_(std::move(points)), alpha_(alpha) {
  if (points_.empty()) throw std::invalid_argument("admissible set is empty");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      if (points_[i] == points_[j])
        throw std::invalid_argument("admissible set points must be distinct");
  costs_.reserve(points_.size());
  for (const auto &v : points_) costs_.push_back(0.5 * alpha_ * v.squaredNorm());
}

double AdmissibleSet::max_norm() const {
  double r = 0.0;
  for (const auto &v : points_) r = std::max(r, v.norm());
  return r;
}

double conjugate_oracle(const Vec2 &q, const AdmissibleSet &set) {
  double best = -std::numeric_limits<double>::infinity();
  const auto &pts = set.points();
  const auto &costs = set.costs();
  for (std::size_t i = 0; i < pts.size(); ++i)
    best = std::max(best, pts[i].dot(q) - costs[i]);
  return best;
}

namespace {

// Affine pieces <v, w> - c_v of g* that are maximal at w, up to tol.
bool pieces_maximal(const Vec2 &w, const AdmissibleSet &set, std::initializer_list<std::size_t> idx,
                    double tol) {
  const double top = conjugate_oracle(w, set);
  for (std::size_t k : idx)
    if (set.points()[k].dot(w) - set.costs()[k] < top - tol) return false;
  return true;
}

std::optional<Vec2> polish_by_active_sets(const Vec2 &q, const AdmissibleSet &set, double gamma) {
  const auto &pts = set.points();
  const auto &costs = set.costs();
  const std::size_t n = pts.size();
  const double scale = std::max({1.0, q.norm(), set.max_norm()}) * std::max(1.0, set.max_norm());
  const double tol = 1e-11 * scale;
  auto objective = [&](const Vec2 &w) {
    return (w - q).squaredNorm() / (2.0 * gamma) + conjugate_oracle(w, set);
  };
  std::optional<Vec2> best;
  double best_val = std::numeric_limits<double>::infinity();
  auto offer = [&](const Vec2 &w) {
    const double v = objective(w);
    if (v < best_val) {
      best_val = v;
      best = w;
    }
  };

  for (std::size_t a = 0; a < n; ++a) {
    const Vec2 w = q - gamma * pts[a];
    if (pieces_maximal(w, set, {a}, tol)) offer(w);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const Vec2 e = pts[b] - pts[a];
      const double mu = (e.dot(q) - gamma * e.dot(pts[a]) - (costs[b] - costs[a])) /
                        (gamma * e.squaredNorm());
      if (mu < -kBarycentricTol || mu > 1.0 + kBarycentricTol) continue;
      const Vec2 w = q - gamma * (pts[a] + std::clamp(mu, 0.0, 1.0) * e);
      if (pieces_maximal(w, set, {a, b}, tol)) offer(w);
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        Mat2 E;
        E.row(0) = (pts[b] - pts[a]).transpose();
        E.row(1) = (pts[c] - pts[a]).transpose();
        const double det = E.determinant();
        if (std::abs(det) <= 1e-14 * E.squaredNorm()) continue;
        const Vec2 w = E.inverse() * Vec2(costs[b] - costs[a], costs[c] - costs[a]);
        // barycentric coordinates of (q - w) / gamma in the triangle a, b, c
        const Vec2 v = (q - w) / gamma;
        const Vec2 lam = E.transpose().inverse() * (v - pts[a]);
        const double l0 = 1.0 - lam.sum();
        if (l0 < -kBarycentricTol || lam.minCoeff() < -kBarycentricTol) continue;
        if (pieces_maximal(w, set, {a, b, c}, tol)) offer(w);
      }
  return best;
}

} // namespace

Vec2 prox_oracle(const Vec2 &q, const AdmissibleSet &set,
                 const PenaltyParams &params) {
  const double gamma = params.gamma;
  // Work in offsets d = w - q so the quadratic term carries no cancellation.
  auto objective = [&](const Vec2 &d) {
    return d.squaredNorm() / (2.0 * gamma) + conjugate_oracle(q + d, set);
  };

  // |prox(q) - q| <= gamma * max|v|; the box has a factor 3 margin.
  const double radius = std::max(3.0 * gamma * set.max_norm(), 1e-300);
  double h = radius / kCoarseHalf;
  Vec2 center = Vec2::Zero();
  double best_val = objective(center);

  auto scan = [&](int half) {
    Vec2 best = center;
    int best_i = 0, best_j = 0;
    for (int i = -half; i <= half; ++i) {
      for (int j = -half; j <= half; ++j) {
        const Vec2 d = center + Vec2(i * h, j * h);
        const double v = objective(d);
        if (v < best_val) {
          best_val = v;
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    center = best;
    return std::max(std::abs(best_i), std::abs(best_j)) == half;
  };

  scan(kCoarseHalf);
  // Refine: halve the spacing around the incumbent. An incumbent on the edge
  // of the local box means the minimizer may lie outside it, so re-center at
  // the same spacing instead of shrinking.
  int guard = 0;
  while (h * std::sqrt(2.0) > kOracleResolution && guard < 10000) {
    const bool on_edge = scan(kFineHalf);
    if (!on_edge) h *= 0.5;
    ++guard;
  }

  // On a kink of g* the grid incumbent only converges like sqrt(h), so the
  // result is polished by solving the optimality condition
  // (q - w) / gamma in co{active pieces at w} for every candidate active set
  // of at most three points. Any candidate that passes is the minimizer.
  const auto polished = polish_by_active_sets(q, set, gamma);
  if (polished && objective(*polished - q) <= best_val + 1e-12 * std::max(1.0, std::abs(best_val)))
    return *polished;
  return q + center;
}

double penalty_value(const Vec2 &u, const AdmissibleSet &set) {
  const auto &pts = set.points();
  const auto &costs = set.costs();
  const std::size_t n = pts.size();
  double scale = 1.0;
  for (const auto &v : pts) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  scale = std::max(scale, u.lpNorm<Eigen::Infinity>());
  const double point_tol = 1e-12 * scale;

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double cost) {
    // Ties resolve to the first subset found (lowest indices), minimum cost
    // otherwise.
    if (cost < best) best = cost;
  };

  for (std::size_t a = 0; a < n; ++a)
    if ((pts[a] - u).lpNorm<Eigen::Infinity>() <= point_tol) consider(costs[a]);

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Vec2 e = pts[b] - pts[a];
      const double ee = e.squaredNorm();
      double lam = e.dot(u - pts[a]) / ee;
      if (lam < -kBarycentricTol || lam > 1.0 + kBarycentricTol) continue;
      lam = std::clamp(lam, 0.0, 1.0);
      const Vec2 proj = pts[a] + lam * e;
      if ((proj - u).lpNorm<Eigen::Infinity>() > point_tol) continue;
      consider((1.0 - lam) * costs[a] + lam * costs[b]);
    }
  }

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        Eigen::Matrix3d sys;
        sys << pts[a].x(), pts[b].x(), pts[c].x(),
               pts[a].y(), pts[b].y(), pts[c].y(),
               1.0, 1.0, 1.0;
        const double det = sys.determinant();
        if (std::abs(det) <= 1e-14 * scale * scale) continue; // collinear: pairs cover it
        Eigen::Vector3d lam = sys.partialPivLu().solve(Eigen::Vector3d(u.x(), u.y(), 1.0));
        if ((lam.array() < -kBarycentricTol).any()) continue;
        lam = lam.cwiseMax(0.0);
        lam /= lam.sum();
        consider(lam[0] * costs[a] + lam[1] * costs[b] + lam[2] * costs[c]);
      }
    }
  }
  return best;
}

double distance_to_hull(const Vec2 &x, const std::vector<Vec2> &vertices) {
  if (vertices.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices.size();
  for (std::size_t a = 0; a < n; ++a) best = std::min(best, (x - vertices[a]).norm());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Vec2 e = vertices[b] - vertices[a];
      const double ee = e.squaredNorm();
      if (ee == 0.0) continue;
      const double t = std::clamp(e.dot(x - vertices[a]) / ee, 0.0, 1.0);
      best = std::min(best, (x - vertices[a] - t * e).norm());
    }
  }
  for (std::size_t a = 0; a < n && best > 0.0; ++a) {
    for (std::size_t b = a + 1; b < n && best > 0.0; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        const Vec2 &A = vertices[a], &B = vertices[b], &C = vertices[c];
        const double area = cross2(B - A, C - A);
        if (area == 0.0) continue;
        const double s1 = cross2(B - A, x - A) / area;
        const double s2 = cross2(C - B, x - B) / area;
        const double s3 = cross2(A - C, x - C) / area;
        if (s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0) {
          best = 0.0;
          break;
        }
      }
    }
  }
  return best;
}

double subgradient_inclusion_distance(const Vec2 &q, const Vec2 &w,
                                      const SubgradientSet &sub,
                                      const PenaltyParams &params) {
  return distance_to_hull((q - w) / params.gamma, sub.vertices);
}

} // namespace multibang
