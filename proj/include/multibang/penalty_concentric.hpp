#pragma once

// Closed-form convex analysis for the concentric corner set
// M = {k (i, j) : i, j in {-1, 1}, k in {1, 2}}.

#include "multibang/prox_kernel.hpp"
#include "multibang/types.hpp"

#include <array>

namespace multibang {

class ConcentricSet {
public:
  static constexpr double inner = 1.0;
  static constexpr double outer = 2.0;

  /// The eight vertices ordered (1,1), (1,-1), (-1,1), (-1,-1), then the
  /// same sign patterns at magnitude 2.
  static const std::array<Vec2, 8> &vertices();
  /// Vertex k' * (i, j) with k' = (k + 3) / 2 for k in {-1, 1}.
  static Vec2 vertex(int i, int j, int k) { return 0.5 * (k + 3) * Vec2(i, j); }
  static AdmissibleSet admissible_set(double alpha);
};

/// Index triple (i, j, k) in {-1, 0, 1}^3 of the region Q_ijk^gamma.
struct ConcentricRegion {
  int i = 0;
  int j = 0;
  int k = -1;
  /// Set when the label came from the candidate search instead of the
  /// closed-form rules.
  bool fallback = false;

  bool operator==(const ConcentricRegion &o) const { return i == o.i && j == o.j && k == o.k; }
  bool pure() const { return i != 0 && j != 0 && k != 0; }
};

double conjugate_concentric(const Vec2 &q, double alpha);

SubgradientSet subdiff_concentric(const Vec2 &q, double alpha, double tol = 1e-12);

ConcentricRegion classify_concentric(const Vec2 &q, const PenaltyParams &params);

Vec2 prox_concentric(const Vec2 &q, const PenaltyParams &params);
Vec2 prox_concentric(const Vec2 &q, const PenaltyParams &params,
                     const ConcentricRegion &region);

Vec2 my_concentric(const Vec2 &q, const PenaltyParams &params);
Vec2 my_concentric(const Vec2 &q, const PenaltyParams &params,
                   const ConcentricRegion &region);

Mat2 newton_deriv_concentric(const Vec2 &q, const PenaltyParams &params);
Mat2 newton_deriv_concentric(const PenaltyParams &params,
                             const ConcentricRegion &region);

} // namespace multibang
