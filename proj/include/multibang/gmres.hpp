#pragma once

#include <Eigen/Core>

#include <functional>

namespace multibang {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Full (non-restarted) GMRES with modified Gram-Schmidt and Givens
/// rotations, started from zero. An optional inner product weight w turns
/// the Arnoldi basis orthonormal in <a, b> = sum w_i a_i b_i.
GmresResult gmres(const LinearOperator &apply, const Eigen::VectorXd &rhs, double tol,
                  int max_iter, const Eigen::VectorXd *weights = nullptr);

} // namespace multibang
