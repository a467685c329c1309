#include "multibang/penalty.hpp"

#include <algorithm>
#include <limits>

namespace multibang {

Penalty Penalty::radial(RadialSet set, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return Penalty(Geometry::Radial, alpha, std::move(set));
}

Penalty Penalty::concentric(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return Penalty(Geometry::Concentric, alpha, std::nullopt);
}

std::string Penalty::name() const {
  return geometry_ == Geometry::Radial ? "radial" : "concentric";
}

Penalty::Evaluation Penalty::evaluate(const Vec2 &q, double gamma) const {
  const PenaltyParams params(alpha_, gamma);
  if (geometry_ == Geometry::Radial) {
    const RadialRegion r = classify_radial(q, *radial_, params);
    const bool pure = r.kind == RadialKind::Q0 || r.kind == RadialKind::Qi;
    return {my_radial(q, *radial_, params, r), newton_deriv_radial(*radial_, params, r),
            static_cast<int>(r.kind) * 1024 + r.i, pure};
  }
  const ConcentricRegion r = classify_concentric(q, params);
  return {my_concentric(q, params, r), newton_deriv_concentric(params, r),
          (r.i + 1) * 9 + (r.j + 1) * 3 + (r.k + 1), r.pure()};
}

Vec2 Penalty::prox(const Vec2 &q, double gamma) const {
  const PenaltyParams params(alpha_, gamma);
  return geometry_ == Geometry::Radial ? prox_radial(q, *radial_, params)
                                       : prox_concentric(q, params);
}

SubgradientSet Penalty::subdifferential(const Vec2 &q, double tol) const {
  return geometry_ == Geometry::Radial ? subdiff_radial(q, *radial_, alpha_, tol)
                                       : subdiff_concentric(q, alpha_, tol);
}

AdmissibleSet Penalty::admissible_set() const {
  return geometry_ == Geometry::Radial ? radial_->admissible_set(alpha_)
                                       : ConcentricSet::admissible_set(alpha_);
}

double Penalty::value(const Vec2 &u) const { return penalty_value(u, admissible_set()); }

double Penalty::min_cost() const {
  const auto set = admissible_set();
  return *std::min_element(set.costs().begin(), set.costs().end());
}

int Penalty::nearest_vertex(const Vec2 &u) const {
  const auto set = admissible_set();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double d = (set.points()[i] - u).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int count_nonmultibang(std::span<const Vec2> duals, const Penalty &penalty,
                       double gamma) {
  int count = 0;
  for (const auto &q : duals)
    if (!penalty.evaluate(q, gamma).multibang) ++count;
  return count;
}

} // namespace multibang
