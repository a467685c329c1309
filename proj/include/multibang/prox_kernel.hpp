#pragma once

// Geometry-independent convex analysis on a finite admissible set, evaluated
// by brute force. These routines never use the closed forms of the penalty
// modules and serve as their reference.

#include "multibang/types.hpp"

#include <vector>

namespace multibang {

/// The finite admissible set M together with the control costs
/// alpha * |v|^2 / 2 of its points.
class AdmissibleSet {
public:
  AdmissibleSet(std::vector<Vec2> points, double alpha);

  const std::vector<Vec2> &points() const { return points_; }
  const std::vector<double> &costs() const { return costs_; }
  double alpha() const { return alpha_; }
  std::size_t size() const { return points_.size(); }
  double max_norm() const;

private:
  std::vector<Vec2> points_;
  std::vector<double> costs_;
  double alpha_;
};

/// Generators of the subdifferential of g* at a point; the subdifferential
/// is their convex hull.
struct SubgradientSet {
  std::vector<Vec2> vertices;
};

double conjugate_oracle(const Vec2 &q, const AdmissibleSet &set);

/// Grid-search minimizer of |w - q|^2 / (2 gamma) + g*(w).
Vec2 prox_oracle(const Vec2 &q, const AdmissibleSet &set,
                 const PenaltyParams &params);

/// Convex envelope g = (alpha/2 |.|^2 + delta_M)** by enumeration of all
/// convex combinations of at most three points of M. Returns +infinity
/// outside co M.
double penalty_value(const Vec2 &u, const AdmissibleSet &set);

/// Euclidean distance from a point to the convex hull of finitely many
/// points in the plane.
double distance_to_hull(const Vec2 &x, const std::vector<Vec2> &vertices);

/// Distance of (q - w) / gamma from co(sub.vertices); zero iff
/// q lies in w + gamma * co(sub).
double subgradient_inclusion_distance(const Vec2 &q, const Vec2 &w,
                                      const SubgradientSet &sub,
                                      const PenaltyParams &params);

} // namespace multibang
