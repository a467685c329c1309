#include "multibang/penalty_radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace multibang {

RadialSet::RadialSet(double omega0, std::vector<double> thetas)
    : omega0_(omega0), thetas_(std::move(thetas)) {
  if (!(omega0_ > 0.0)) throw std::invalid_argument("omega0 must be positive");
  const int m = size();
  if (m < 3) throw std::invalid_argument("radial set needs at least three phases");
  for (int i = 1; i < m; ++i) {
    const double gap = thetas_[i] - thetas_[i - 1];
    if (!(gap > 0.0)) throw std::invalid_argument("phases must be strictly increasing");
    if (!(gap < std::numbers::pi)) throw std::invalid_argument("consecutive phase gap must be below pi");
  }
  const double wrap = thetas_.front() + 2.0 * std::numbers::pi - thetas_.back();
  if (!(wrap > 0.0)) throw std::invalid_argument("phases must span less than 2 pi");
  if (!(wrap < std::numbers::pi)) throw std::invalid_argument("periodic phase gap must be below pi");

  vertices_.reserve(static_cast<std::size_t>(m) + 1);
  vertices_.emplace_back(Vec2::Zero());
  for (double t : thetas_) vertices_.emplace_back(omega0_ * std::cos(t), omega0_ * std::sin(t));
  midpoints_.reserve(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    const Vec2 s = vertex(i) + vertex(next(i));
    midpoints_.push_back(s.normalized());
  }
}

int RadialSet::sector(const Vec2 &x) const {
  int best = 1;
  double best_val = x.dot(vertex(1));
  // ties within rounding go to the smallest index
  const double tie = 8.0 * std::numeric_limits<double>::epsilon() * x.norm() * omega0_;
  for (int i = 2; i <= size(); ++i) {
    const double v = x.dot(vertex(i));
    if (v > best_val + tie) {
      best_val = v;
      best = i;
    }
  }
  return best;
}

AdmissibleSet RadialSet::admissible_set(double alpha) const {
  return AdmissibleSet(vertices_, alpha);
}

double conjugate_radial(const Vec2 &q, const RadialSet &set, double alpha) {
  const int i = set.sector(q);
  const double w02 = set.omega0() * set.omega0();
  return std::max(0.0, q.dot(set.vertex(i)) - 0.5 * alpha * w02);
}

SubgradientSet subdiff_radial(const Vec2 &q, const RadialSet &set, double alpha,
                              double tol) {
  const double w02 = set.omega0() * set.omega0();
  const double scale = 1.0 + q.norm() * set.omega0() + alpha * w02;
  std::vector<double> values(static_cast<std::size_t>(set.size()) + 1, 0.0);
  for (int i = 1; i <= set.size(); ++i)
    values[static_cast<std::size_t>(i)] = q.dot(set.vertex(i)) - 0.5 * alpha * w02;
  const double top = *std::max_element(values.begin(), values.end());
  SubgradientSet out;
  for (int i = 0; i <= set.size(); ++i)
    if (values[static_cast<std::size_t>(i)] >= top - tol * scale) out.vertices.push_back(set.vertex(i));
  return out;
}

namespace {

Vec2 prox_formula(const Vec2 &q, const RadialSet &set, const PenaltyParams &p,
                  RadialKind kind, int i) {
  const double w02 = set.omega0() * set.omega0();
  switch (kind) {
  case RadialKind::Q0:
    return q;
  case RadialKind::Qi:
    return q - p.gamma * set.vertex(i);
  case RadialKind::Q0i: {
    const Vec2 &u = set.vertex(i);
    return q - (q.dot(u) / w02 - 0.5 * p.alpha) * u;
  }
  case RadialKind::Qii1: {
    const Vec2 &a = set.vertex(i);
    const Vec2 &b = set.vertex(set.next(i));
    const Vec2 d = a - b;
    return q - 0.5 * p.gamma * (a + b) - (q.dot(d) / d.squaredNorm()) * d;
  }
  case RadialKind::Q0ii1: {
    const Vec2 s = set.vertex(i) + set.vertex(set.next(i));
    return p.alpha * (w02 / s.squaredNorm()) * s;
  }
  }
  return q;
}

double prox_objective(const Vec2 &q, const Vec2 &w, const RadialSet &set,
                      const PenaltyParams &p) {
  return (w - q).squaredNorm() / (2.0 * p.gamma) + conjugate_radial(w, set, p.alpha);
}

struct Candidate {
  RadialKind kind;
  int i;
};

// Closed-form set rules; returns false when no rule applies.
bool apply_rules(const Vec2 &q, const RadialSet &set, const PenaltyParams &p,
                 RadialRegion &r) {
  const double w02 = set.omega0() * set.omega0();
  auto &aux = r.aux;
  aux.i_q = set.sector(q);
  const Vec2 &ui = set.vertex(aux.i_q);
  aux.rho_q = q.dot(ui);
  aux.j_q = set.sector(q - p.gamma * ui);
  const double lam = aux.rho_q / w02 - 0.5 * p.alpha;
  aux.k_q = set.sector(q - lam * ui);
  const Vec2 s = ui + set.vertex(aux.j_q);
  aux.sigma_q = (q - 0.5 * p.gamma * s).dot(s);

  const double lower = 0.5 * p.alpha * w02;
  const double upper = (0.5 * p.alpha + p.gamma) * w02;

  if (aux.rho_q < lower) {
    r.kind = RadialKind::Q0;
    r.i = 0;
    return true;
  }
  if (aux.rho_q > upper && aux.i_q == aux.j_q) {
    r.kind = RadialKind::Qi;
    r.i = aux.i_q;
    return true;
  }
  if (aux.rho_q >= lower && aux.rho_q <= upper && aux.k_q == aux.i_q) {
    r.kind = RadialKind::Q0i;
    r.i = aux.i_q;
    return true;
  }
  if (aux.i_q != aux.j_q && aux.sigma_q > p.alpha * w02) {
    if (aux.j_q == set.next(aux.i_q)) {
      r.kind = RadialKind::Qii1;
      r.i = aux.i_q;
      return true;
    }
    if (aux.i_q == set.next(aux.j_q)) {
      r.kind = RadialKind::Qii1;
      r.i = aux.j_q;
      return true;
    }
  }
  if (aux.k_q != aux.i_q && aux.sigma_q <= p.alpha * w02) {
    // sign(0) is taken as +1.
    const bool ccw = cross2(ui, q) >= 0.0;
    r.kind = RadialKind::Q0ii1;
    r.i = ccw ? aux.i_q : set.prev(aux.i_q);
    return true;
  }
  return false;
}

} // namespace

RadialRegion classify_radial(const Vec2 &q, const RadialSet &set,
                             const PenaltyParams &params) {
  RadialRegion region;
  const bool matched = apply_rules(q, set, params, region);

  // Certify against every candidate formula: the prox is the unique global
  // minimizer of the prox objective and is produced by one of them.
  const int m = set.size();
  double best_val = std::numeric_limits<double>::infinity();
  Candidate best{RadialKind::Q0, 0};
  auto consider = [&](RadialKind kind, int i) {
    const double v = prox_objective(q, prox_formula(q, set, params, kind, i), set, params);
    if (v < best_val) {
      best_val = v;
      best = {kind, i};
    }
  };
  consider(RadialKind::Q0, 0);
  for (int i = 1; i <= m; ++i) consider(RadialKind::Qi, i);
  for (int i = 1; i <= m; ++i) consider(RadialKind::Q0i, i);
  for (int i = 1; i <= m; ++i) consider(RadialKind::Qii1, i);
  for (int i = 1; i <= m; ++i) consider(RadialKind::Q0ii1, i);

  const double tol = 1e-12 * (1.0 + q.norm() * set.omega0() + params.alpha * set.omega0() * set.omega0());
  if (matched) {
    const double v = prox_objective(q, prox_formula(q, set, params, region.kind, region.i), set, params);
    if (v <= best_val + tol) return region;
  }
  region.kind = best.kind;
  region.i = best.i;
  region.aux.fallback = true;
  return region;
}

Vec2 prox_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &params,
                 const RadialRegion &region) {
  return prox_formula(q, set, params, region.kind, region.i);
}

Vec2 prox_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &params) {
  return prox_radial(q, set, params, classify_radial(q, set, params));
}

Vec2 my_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &p,
               const RadialRegion &region) {
  const double w02 = set.omega0() * set.omega0();
  const int i = region.i;
  switch (region.kind) {
  case RadialKind::Q0:
    return Vec2::Zero();
  case RadialKind::Qi:
    return set.vertex(i);
  case RadialKind::Q0i: {
    const Vec2 &u = set.vertex(i);
    return (q.dot(u) / (p.gamma * w02) - p.alpha / (2.0 * p.gamma)) * u;
  }
  case RadialKind::Qii1: {
    const Vec2 &a = set.vertex(i);
    const Vec2 &b = set.vertex(set.next(i));
    const Vec2 d = a - b;
    return 0.5 * (a + b) + (q.dot(d) / (p.gamma * d.squaredNorm())) * d;
  }
  case RadialKind::Q0ii1: {
    const Vec2 s = set.vertex(i) + set.vertex(set.next(i));
    return q / p.gamma - (p.alpha / p.gamma) * (w02 / s.squaredNorm()) * s;
  }
  }
  return Vec2::Zero();
}

Vec2 my_radial(const Vec2 &q, const RadialSet &set, const PenaltyParams &params) {
  return my_radial(q, set, params, classify_radial(q, set, params));
}

Mat2 newton_deriv_radial(const RadialSet &set, const PenaltyParams &p,
                         const RadialRegion &region) {
  const double w02 = set.omega0() * set.omega0();
  const int i = region.i;
  switch (region.kind) {
  case RadialKind::Q0:
  case RadialKind::Qi:
    return Mat2::Zero();
  case RadialKind::Q0i: {
    const Vec2 &u = set.vertex(i);
    return (u * u.transpose()) / (p.gamma * w02);
  }
  case RadialKind::Qii1: {
    const Vec2 d = set.vertex(i) - set.vertex(set.next(i));
    return (d * d.transpose()) / (p.gamma * d.squaredNorm());
  }
  case RadialKind::Q0ii1:
    return Mat2::Identity() / p.gamma;
  }
  return Mat2::Zero();
}

Mat2 newton_deriv_radial(const Vec2 &q, const RadialSet &set,
                         const PenaltyParams &params) {
  return newton_deriv_radial(set, params, classify_radial(q, set, params));
}

} // namespace multibang
