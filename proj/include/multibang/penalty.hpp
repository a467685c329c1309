#pragma once

// Geometry-erased view of a multibang penalty, as consumed by the Newton
// drivers: Moreau-Yosida map, Newton derivative, and region labels.

#include "multibang/penalty_concentric.hpp"
#include "multibang/penalty_radial.hpp"

#include <optional>
#include <span>
#include <string>

namespace multibang {

enum class Geometry { Radial, Concentric };

class Penalty {
public:
  static Penalty radial(RadialSet set, double alpha);
  static Penalty concentric(double alpha);

  struct Evaluation {
    Vec2 value;      ///< h_gamma(q)
    Mat2 derivative; ///< D_N h_gamma(q)
    int label;       ///< region code, comparable across calls
    bool multibang;  ///< h_gamma(q) is a pure vertex of M
  };

  Geometry geometry() const { return geometry_; }
  double alpha() const { return alpha_; }
  const RadialSet &radial_set() const { return *radial_; }
  std::string name() const;

  Evaluation evaluate(const Vec2 &q, double gamma) const;
  Vec2 my(const Vec2 &q, double gamma) const { return evaluate(q, gamma).value; }
  /// Closed-form prox of gamma g* at q.
  Vec2 prox(const Vec2 &q, double gamma) const;
  /// Generators of the subdifferential of g* at q.
  SubgradientSet subdifferential(const Vec2 &q, double tol = 1e-12) const;

  AdmissibleSet admissible_set() const;
  /// g(u), the convex envelope; +infinity outside co M.
  double value(const Vec2 &u) const;
  /// min over M of g.
  double min_cost() const;
  /// Index into admissible_set().points() of the vertex nearest to u.
  int nearest_vertex(const Vec2 &u) const;

private:
  Penalty(Geometry g, double alpha, std::optional<RadialSet> set)
      : geometry_(g), alpha_(alpha), radial_(std::move(set)) {}

  Geometry geometry_;
  double alpha_;
  std::optional<RadialSet> radial_;
};

/// Number of duals whose region is not a pure-vertex region, i.e. where the
/// control h_gamma(q) does not lie in M.
int count_nonmultibang(std::span<const Vec2> duals, const Penalty &penalty,
                       double gamma);

} // namespace multibang
