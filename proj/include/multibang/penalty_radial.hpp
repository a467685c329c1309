#pragma once

// Closed-form convex analysis for the radial admissible set
// M = {0} u {omega0 (cos theta_i, sin theta_i)}.

#include "multibang/prox_kernel.hpp"
#include "multibang/types.hpp"

#include <vector>

namespace multibang {

/// Radial admissible set. Vertex 0 is the origin, vertices 1..M lie on the
/// circle of radius omega0. Sector indices are 1-based and periodic.
class RadialSet {
public:
  RadialSet(double omega0, std::vector<double> thetas);

  double omega0() const { return omega0_; }
  int size() const { return static_cast<int>(thetas_.size()); }
  const std::vector<double> &thetas() const { return thetas_; }
  /// vertex(0) is the origin.
  const Vec2 &vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const std::vector<Vec2> &vertices() const { return vertices_; }
  /// Unit bisector between vertex(i) and vertex(next(i)).
  const Vec2 &midpoint(int i) const { return midpoints_[static_cast<std::size_t>(i - 1)]; }

  int next(int i) const { return i == size() ? 1 : i + 1; }
  int prev(int i) const { return i == 1 ? size() : i - 1; }

  /// Index i in 1..M of the closed sector C_i containing x, i.e. the vertex
  /// direction maximizing <x, vertex(i)>. Ties go to the lower index.
  int sector(const Vec2 &x) const;

  AdmissibleSet admissible_set(double alpha) const;

private:
  double omega0_;
  std::vector<double> thetas_;
  std::vector<Vec2> vertices_;
  std::vector<Vec2> midpoints_;
};

enum class RadialKind { Q0, Qi, Q0i, Qii1, Q0ii1 };

/// Intermediate quantities of the subdomain classifier.
struct RadialClassifierAux {
  int i_q = 1;
  int j_q = 1;
  int k_q = 1;
  double rho_q = 0.0;
  double sigma_q = 0.0;
  /// True when none of the closed-form set rules applied (or the rule's label
  /// was not optimal) and the label was obtained from the candidate search.
  bool fallback = false;
};

/// Region Q^gamma of the Moreau-Yosida regularization containing q. For Qii1
/// and Q0ii1, `i` is the first index of the pair (i, next(i)).
struct RadialRegion {
  RadialKind kind = RadialKind::Q0;
  int i = 0;
  RadialClassifierAux aux;

  bool operator==(const RadialRegion &o) const { return kind == o.kind && i == o.i; }
};

double conjugate_radial(const Vec2 &q, const RadialSet &set, double alpha);

/// Subdifferential generators of g* at q, sorted by vertex index. Values of
/// the affine pieces within `tol` of the maximum count as active.
SubgradientSet subdiff_radial(const Vec2 &q, const RadialSet &set, double alpha,
                              double tol = 1e-12);

RadialRegion classify_radial(const Vec2 &q, const RadialSet &set,
                             const PenaltyParams &params);

Vec2 prox_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &params);
Vec2 prox_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &params,
                 const RadialRegion &region);

/// h_gamma(q) = (q - prox(q)) / gamma, evaluated from the piecewise formula.
Vec2 my_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &params);
Vec2 my_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &params,
               const RadialRegion &region);

Mat2 newton_deriv_radial(const Vec2 &q, const RadialSet &set,
                         const PenaltyParams &params);
Mat2 newton_deriv_radial(const RadialSet &set, const PenaltyParams &params,
                         const RadialRegion &region);

} // namespace multibang
