#include "multibang/bloch.hpp"

#include "multibang/csv.hpp"

#include <cmath>
#include <stdexcept>

namespace multibang {

namespace {

// dB/du1 and dB/du2 of bloch_matrix.
const Mat3 kG1 = (Mat3() << 0, 0, 0, 0, 0, 1, 0, -1, 0).finished();
const Mat3 kG2 = (Mat3() << 0, 0, -1, 0, 0, 0, 1, 0, 0).finished();

void check_control(const BlochProblem &problem, const Control &u) {
  if (static_cast<int>(u.size()) != problem.n_intervals)
    throw std::invalid_argument("control length does not match the number of intervals");
}

Mat3 step_matrix(const BlochProblem &problem, const Vec2 &u_tilde, double omega) {
  return Mat3::Identity() -
         0.5 * problem.dt() * bloch_matrix(problem.scaling.factor() * u_tilde, omega);
}

Mat3 direction_matrix(const BlochProblem &problem, const Vec2 &phi) {
  return problem.scaling.factor() * (phi.x() * kG1 + phi.y() * kG2);
}

} // namespace

const Mat3 kB1 = (Mat3() << 0, 0, 0, 0, 0, -1, 0, 1, 0).finished();
const Mat3 kB2 = (Mat3() << 0, 0, -1, 0, 0, 0, 1, 0, 0).finished();

void BlochProblem::validate() const {
  if (n_intervals < 1) throw std::invalid_argument("n_intervals must be at least 1");
  if (!(T > 0.0)) throw std::invalid_argument("final time must be positive");
  if (omegas.empty()) throw std::invalid_argument("at least one isochromat is required");
  if (targets.size() != omegas.size())
    throw std::invalid_argument("one target per isochromat is required");
  if (std::abs(m0.norm() - 1.0) > 1e-12) throw std::invalid_argument("|M0| must be 1");
  for (const auto &t : targets)
    if (std::abs(t.norm() - 1.0) > 1e-12) throw std::invalid_argument("|Md| must be 1");
  if (!(scaling.factor() > 0.0)) throw std::invalid_argument("scaling must be positive");
}

Eigen::VectorXd flatten(const Control &u) {
  Eigen::VectorXd v(2 * static_cast<Eigen::Index>(u.size()));
  for (std::size_t m = 0; m < u.size(); ++m) v.segment<2>(2 * static_cast<Eigen::Index>(m)) = u[m];
  return v;
}

Control unflatten(const Eigen::VectorXd &v) {
  Control u(static_cast<std::size_t>(v.size() / 2));
  for (std::size_t m = 0; m < u.size(); ++m) u[m] = v.segment<2>(2 * static_cast<Eigen::Index>(m));
  return u;
}

double inner(const Control &a, const Control &b, double dt) {
  double s = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) s += a[m].dot(b[m]);
  return dt * s;
}

Mat3 bloch_matrix(const Vec2 &u, double omega) {
  Mat3 B;
  B << 0.0, omega, -u.y(),
      -omega, 0.0, u.x(),
      u.y(), -u.x(), 0.0;
  return B;
}

Trajectory forward_solve(const BlochProblem &problem, const Control &u) {
  check_control(problem, u);
  const int N = problem.n_intervals, J = problem.isochromats();
  Trajectory traj{N, J, std::vector<Vec3>(static_cast<std::size_t>((N + 1) * J))};
  for (int j = 0; j < J; ++j) traj.at(0, j) = problem.m0;
  for (int m = 1; m <= N; ++m) {
    for (int j = 0; j < J; ++j) {
      const Mat3 A = step_matrix(problem, u[static_cast<std::size_t>(m - 1)], problem.omegas[j]);
      traj.at(m, j) = A.partialPivLu().solve(A.transpose() * traj.at(m - 1, j));
    }
  }
  return traj;
}

double objective(const BlochProblem &problem, const Trajectory &traj) {
  double f = 0.0;
  for (int j = 0; j < problem.isochromats(); ++j)
    f += 0.5 * (traj.at(traj.n_intervals, j) - problem.targets[j]).squaredNorm();
  return f;
}

double objective(const BlochProblem &problem, const Control &u) {
  return objective(problem, forward_solve(problem, u));
}

AdjointTrajectory adjoint_solve(const BlochProblem &problem, const Control &u,
                                const Trajectory &traj) {
  check_control(problem, u);
  const int N = problem.n_intervals, J = problem.isochromats();
  AdjointTrajectory adj{N, J, std::vector<Vec3>(static_cast<std::size_t>(N * J)),
                        std::vector<Vec3>(static_cast<std::size_t>((N + 1) * J))};
  auto node = [&](int m, int j) -> Vec3 & {
    return adj.nodal[static_cast<std::size_t>(m * J + j)];
  };
  for (int j = 0; j < J; ++j) node(N, j) = traj.at(N, j) - problem.targets[j];
  for (int m = N; m >= 1; --m) {
    for (int j = 0; j < J; ++j) {
      const Mat3 A = step_matrix(problem, u[static_cast<std::size_t>(m - 1)], problem.omegas[j]);
      const Vec3 lam = A.transpose().partialPivLu().solve(node(m, j));
      adj.values[static_cast<std::size_t>((m - 1) * J + j)] = lam;
      node(m - 1, j) = 2.0 * lam - node(m, j);
    }
  }
  return adj;
}

Control reduced_gradient(const BlochProblem &problem, const Control &u,
                         const Trajectory &traj, const AdjointTrajectory &adj) {
  const int N = problem.n_intervals, J = problem.isochromats();
  const double s = problem.scaling.factor();
  Control p(static_cast<std::size_t>(N), Vec2::Zero());
  for (int m = 1; m <= N; ++m) {
    Vec2 acc = Vec2::Zero();
    for (int j = 0; j < J; ++j) {
      const Vec3 mbar = 0.5 * (traj.at(m, j) + traj.at(m - 1, j));
      const Vec3 &lam = adj.at(m, j);
      acc.x() -= s * lam.dot(kG1 * mbar);
      acc.y() -= s * lam.dot(kG2 * mbar);
    }
    p[static_cast<std::size_t>(m - 1)] = acc;
  }
  (void)u;
  return p;
}

Control reduced_gradient(const BlochProblem &problem, const Control &u) {
  const auto traj = forward_solve(problem, u);
  return reduced_gradient(problem, u, traj, adjoint_solve(problem, u, traj));
}

Trajectory linearized_solve(const BlochProblem &problem, const Control &u,
                            const Trajectory &traj, const Control &phi) {
  check_control(problem, u);
  check_control(problem, phi);
  const int N = problem.n_intervals, J = problem.isochromats();
  const double h = problem.dt();
  Trajectory d{N, J, std::vector<Vec3>(static_cast<std::size_t>((N + 1) * J), Vec3::Zero())};
  for (int m = 1; m <= N; ++m) {
    const Mat3 Phi = direction_matrix(problem, phi[static_cast<std::size_t>(m - 1)]);
    for (int j = 0; j < J; ++j) {
      const Mat3 A = step_matrix(problem, u[static_cast<std::size_t>(m - 1)], problem.omegas[j]);
      const Vec3 mbar = 0.5 * (traj.at(m, j) + traj.at(m - 1, j));
      d.at(m, j) = A.partialPivLu().solve(A.transpose() * d.at(m - 1, j) + h * (Phi * mbar));
    }
  }
  return d;
}

AdjointTrajectory linearized_adjoint_solve(const BlochProblem &problem,
                                           const Control &u, const Control &phi,
                                           const AdjointTrajectory &adj,
                                           const Trajectory &dtraj) {
  check_control(problem, u);
  check_control(problem, phi);
  const int N = problem.n_intervals, J = problem.isochromats();
  const double h = problem.dt();
  AdjointTrajectory d{N, J, std::vector<Vec3>(static_cast<std::size_t>(N * J)),
                      std::vector<Vec3>(static_cast<std::size_t>((N + 1) * J), Vec3::Zero())};
  // rhs of A_m^T dlam_m; nodal slot m holds it before the solve at step m.
  auto node = [&](int m, int j) -> Vec3 & {
    return d.nodal[static_cast<std::size_t>(m * J + j)];
  };
  for (int j = 0; j < J; ++j) node(N, j) = dtraj.at(N, j);
  for (int m = N; m >= 1; --m) {
    const Mat3 Phi = direction_matrix(problem, phi[static_cast<std::size_t>(m - 1)]);
    for (int j = 0; j < J; ++j) {
      const Mat3 A = step_matrix(problem, u[static_cast<std::size_t>(m - 1)], problem.omegas[j]);
      const Vec3 &lam = adj.at(m, j);
      const Vec3 rhs = node(m, j) - 0.5 * h * (Phi * lam);
      const Vec3 dlam = A.transpose().partialPivLu().solve(rhs);
      d.values[static_cast<std::size_t>((m - 1) * J + j)] = dlam;
      node(m - 1, j) = A * dlam - 0.5 * h * (Phi * lam);
    }
  }
  return d;
}

Control hessian_apply(const BlochProblem &problem, const Control &u,
                      const Trajectory &traj, const AdjointTrajectory &adj,
                      const Control &phi) {
  const auto dtraj = linearized_solve(problem, u, traj, phi);
  const auto dadj = linearized_adjoint_solve(problem, u, phi, adj, dtraj);
  const int N = problem.n_intervals, J = problem.isochromats();
  const double s = problem.scaling.factor();
  Control out(static_cast<std::size_t>(N), Vec2::Zero());
  for (int m = 1; m <= N; ++m) {
    Vec2 acc = Vec2::Zero();
    for (int j = 0; j < J; ++j) {
      const Vec3 mbar = 0.5 * (traj.at(m, j) + traj.at(m - 1, j));
      const Vec3 dmbar = 0.5 * (dtraj.at(m, j) + dtraj.at(m - 1, j));
      const Vec3 &lam = adj.at(m, j);
      const Vec3 &dlam = dadj.at(m, j);
      acc.x() += s * (dlam.dot(kG1 * mbar) + lam.dot(kG1 * dmbar));
      acc.y() += s * (dlam.dot(kG2 * mbar) + lam.dot(kG2 * dmbar));
    }
    out[static_cast<std::size_t>(m - 1)] = acc;
  }
  return out;
}

Control hessian_apply(const BlochProblem &problem, const Control &u, const Control &phi) {
  const auto traj = forward_solve(problem, u);
  const auto adj = adjoint_solve(problem, u, traj);
  return hessian_apply(problem, u, traj, adj, phi);
}

void write_trajectory_csv(const std::filesystem::path &path,
                          const BlochProblem &problem, const Trajectory &traj) {
  CsvWriter csv({"t", "j", "Mx", "My", "Mz"});
  for (int m = 0; m <= traj.n_intervals; ++m)
    for (int j = 0; j < traj.isochromats; ++j) {
      const Vec3 &M = traj.at(m, j);
      csv.cell(m * problem.dt()).cell(j + 1).cell(M.x()).cell(M.y()).cell(M.z());
      csv.end_row();
    }
  csv.save(path);
}

} // namespace multibang
