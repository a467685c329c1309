#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace multibang {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Control cost weight and Moreau-Yosida parameter shared by all penalty
/// operations.
struct PenaltyParams {
  double alpha = 1.0;
  double gamma = 1.0;

  PenaltyParams() = default;
  PenaltyParams(double alpha_, double gamma_) : alpha(alpha_), gamma(gamma_) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  }
};

inline double cross2(const Vec2 &a, const Vec2 &b) {
  return a.x() * b.y() - a.y() * b.x();
}

} // namespace multibang
