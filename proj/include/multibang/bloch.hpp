#pragma once

// Bloch equation without relaxation, discretized with Crank-Nicolson on a
// uniform grid, together with its exact discrete adjoint and second-order
// adjoint.

#include "multibang/types.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

namespace multibang {

/// u = gyro * field * u_tilde.
struct BlochScaling {
  double gyro = 267.51;
  double field = 1e-2;
  double factor() const { return gyro * field; }
};

struct BlochProblem {
  std::vector<double> omegas;
  double T = 1.0;
  int n_intervals = 1000;
  Vec3 m0 = Vec3(0.0, 0.0, 1.0);
  std::vector<Vec3> targets;
  BlochScaling scaling;

  /// Throws std::invalid_argument when the invariants are violated.
  void validate() const;
  double dt() const { return T / n_intervals; }
  int isochromats() const { return static_cast<int>(omegas.size()); }
};

/// Piecewise constant unscaled control, one value per interval.
using Control = std::vector<Vec2>;

Eigen::VectorXd flatten(const Control &u);
Control unflatten(const Eigen::VectorXd &v);
/// Discrete L2 inner product h * sum_m <a_m, b_m>.
double inner(const Control &a, const Control &b, double dt);

/// Nodal magnetizations, (N+1) x J.
struct Trajectory {
  int n_intervals = 0;
  int isochromats = 0;
  std::vector<Vec3> states;

  Vec3 &at(int m, int j) { return states[static_cast<std::size_t>(m * isochromats + j)]; }
  const Vec3 &at(int m, int j) const {
    return states[static_cast<std::size_t>(m * isochromats + j)];
  }
};

/// Adjoint on intervals 1..N (values) and its nodal companion 0..N. The
/// interval value is the average of the two adjacent nodal values.
struct AdjointTrajectory {
  int n_intervals = 0;
  int isochromats = 0;
  std::vector<Vec3> values;
  std::vector<Vec3> nodal;

  /// Interval m in 1..N.
  const Vec3 &at(int m, int j) const {
    return values[static_cast<std::size_t>((m - 1) * isochromats + j)];
  }
  const Vec3 &node(int m, int j) const {
    return nodal[static_cast<std::size_t>(m * isochromats + j)];
  }
};

/// Skew matrix of M' = M x (u1, u2, omega), with u already scaled.
Mat3 bloch_matrix(const Vec2 &u, double omega);

/// Constant matrices of the gradient pairing.
extern const Mat3 kB1;
extern const Mat3 kB2;

Trajectory forward_solve(const BlochProblem &problem, const Control &u);
double objective(const BlochProblem &problem, const Control &u);
double objective(const BlochProblem &problem, const Trajectory &traj);

AdjointTrajectory adjoint_solve(const BlochProblem &problem, const Control &u,
                                const Trajectory &traj);
/// p = -F'(u) as an L2 representer on the control grid.
Control reduced_gradient(const BlochProblem &problem, const Control &u,
                         const Trajectory &traj, const AdjointTrajectory &adj);
Control reduced_gradient(const BlochProblem &problem, const Control &u);

Trajectory linearized_solve(const BlochProblem &problem, const Control &u,
                            const Trajectory &traj, const Control &phi);
AdjointTrajectory linearized_adjoint_solve(const BlochProblem &problem,
                                           const Control &u, const Control &phi,
                                           const AdjointTrajectory &adj,
                                           const Trajectory &dtraj);
/// F''(u) phi as an L2 representer.
Control hessian_apply(const BlochProblem &problem, const Control &u,
                      const Trajectory &traj, const AdjointTrajectory &adj,
                      const Control &phi);
Control hessian_apply(const BlochProblem &problem, const Control &u,
                      const Control &phi);

/// Columns t, j, Mx, My, Mz.
void write_trajectory_csv(const std::filesystem::path &path,
                          const BlochProblem &problem, const Trajectory &traj);

} // namespace multibang
