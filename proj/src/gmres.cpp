#include "multibang/gmres.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace multibang {

GmresResult gmres(const LinearOperator &apply, const Eigen::VectorXd &rhs, double tol,
                  int max_iter, const Eigen::VectorXd *weights) {
  const Eigen::Index n = rhs.size();
  if (weights && weights->size() != n) throw std::invalid_argument("weight size mismatch");
  auto dot = [&](const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    return weights ? (weights->array() * a.array() * b.array()).sum() : a.dot(b);
  };
  auto norm = [&](const Eigen::VectorXd &a) { return std::sqrt(dot(a, a)); };

  GmresResult res;
  res.x = Eigen::VectorXd::Zero(n);
  const double beta = norm(rhs);
  if (beta == 0.0) {
    res.converged = true;
    return res;
  }
  if (!std::isfinite(beta)) return res;

  std::vector<Eigen::VectorXd> V;
  V.push_back(rhs / beta);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(max_iter + 1, max_iter);
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(max_iter), sn = Eigen::VectorXd::Zero(max_iter);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(max_iter + 1);
  g(0) = beta;

  int k = 0;
  double rel = 1.0;
  while (k < max_iter) {
    Eigen::VectorXd w = apply(V[static_cast<std::size_t>(k)]);
    if (w.size() != n) throw std::invalid_argument("operator dimension mismatch");
    for (int i = 0; i <= k; ++i) {
      H(i, k) = dot(w, V[static_cast<std::size_t>(i)]);
      w -= H(i, k) * V[static_cast<std::size_t>(i)];
    }
    H(k + 1, k) = norm(w);
    if (!std::isfinite(H(k + 1, k))) return res;

    for (int i = 0; i < k; ++i) {
      const double t = cs(i) * H(i, k) + sn(i) * H(i + 1, k);
      H(i + 1, k) = -sn(i) * H(i, k) + cs(i) * H(i + 1, k);
      H(i, k) = t;
    }
    const double r = std::hypot(H(k, k), H(k + 1, k));
    cs(k) = r == 0.0 ? 1.0 : H(k, k) / r;
    sn(k) = r == 0.0 ? 0.0 : H(k + 1, k) / r;
    const double hk1 = H(k + 1, k);
    H(k, k) = r;
    H(k + 1, k) = 0.0;
    g(k + 1) = -sn(k) * g(k);
    g(k) = cs(k) * g(k);
    ++k;
    rel = std::abs(g(k)) / beta;
    if (rel <= tol || hk1 == 0.0) break;
    V.push_back(w / hk1);
  }

  const Eigen::VectorXd y =
      H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
  for (int i = 0; i < k; ++i) res.x += y(i) * V[static_cast<std::size_t>(i)];
  res.iterations = k;
  res.relative_residual = rel;
  res.converged = std::isfinite(rel) && rel <= tol;
  return res;
}

} // namespace multibang
