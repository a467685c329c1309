#include "multibang/gmres.hpp"
#include "multibang/ssn.hpp"

#include <cmath>

namespace multibang {

double bloch_residual_norm(const Control &u, const Control &p, const Penalty &penalty,
                           double gamma, double dt) {
  double s = 0.0;
  for (std::size_t m = 0; m < u.size(); ++m) s += (u[m] - penalty.my(p[m], gamma)).squaredNorm();
  return std::sqrt(dt * s);
}

namespace {

struct BlochState {
  Control u;
  Trajectory traj;
  AdjointTrajectory adj;
  Control p;
  double residual = 0.0;
};

BlochState evaluate(const BlochProblem &problem, const Penalty &penalty, double gamma, Control u) {
  BlochState s;
  s.traj = forward_solve(problem, u);
  s.adj = adjoint_solve(problem, u, s.traj);
  s.p = reduced_gradient(problem, u, s.traj, s.adj);
  s.residual = bloch_residual_norm(u, s.p, penalty, gamma, problem.dt());
  s.u = std::move(u);
  return s;
}

} // namespace

BlochSolution ssn_solve_bloch(const BlochProblem &problem, const Penalty &penalty,
                              const ContinuationSchedule &schedule, const NewtonConfig &config,
                              Control u0, const LevelCallback &on_level) {
  problem.validate();
  config.validate();
  const auto N = static_cast<std::size_t>(problem.n_intervals);
  if (u0.empty()) u0.assign(N, Vec2::Zero());
  if (u0.size() != N) throw std::invalid_argument("initial control has the wrong length");

  BlochSolution sol;
  sol.report.nodes = problem.n_intervals;
  Control u = std::move(u0);

  for (const double gamma : schedule.levels()) {
    LevelRecord rec;
    rec.gamma = gamma;
    BlochState st = evaluate(problem, penalty, gamma, u);
    rec.initial_residual = st.residual;
    const double tol = std::max(config.tol_abs, config.tol_rel * st.residual);
    bool converged = st.residual <= tol;
    long krylov_total = 0;

    while (!converged && rec.newton_iters < config.max_iter) {
      std::vector<Mat2> D(N);
      Eigen::VectorXd rhs(2 * static_cast<Eigen::Index>(N));
      for (std::size_t m = 0; m < N; ++m) {
        const auto e = penalty.evaluate(st.p[m], gamma);
        D[m] = e.derivative;
        rhs.segment<2>(2 * static_cast<Eigen::Index>(m)) = e.value - st.u[m];
      }
      const LinearOperator op = [&](const Eigen::VectorXd &x) {
        const Control phi = unflatten(x);
        const Control hphi = hessian_apply(problem, st.u, st.traj, st.adj, phi);
        Eigen::VectorXd y = x;
        for (std::size_t m = 0; m < N; ++m)
          y.segment<2>(2 * static_cast<Eigen::Index>(m)) += D[m] * hphi[m];
        return y;
      };
      const GmresResult g = gmres(op, rhs, config.krylov_tol, config.krylov_max);
      ++rec.newton_iters;
      krylov_total += g.iterations;
      if (!g.x.allFinite()) break;
      const Control du = unflatten(g.x);

      BlochState trial;
      const auto ls = line_search(
          [&](double t) {
            Control v = st.u;
            for (std::size_t m = 0; m < N; ++m) v[m] += t * du[m];
            trial = evaluate(problem, penalty, gamma, std::move(v));
            return trial.residual;
          },
          st.residual, config.line_search);
      if (!ls.success) break;
      if (ls.halvings > 0) ++rec.line_search_count;
      // the last evaluation is the accepted step
      st = std::move(trial);
      converged = st.residual <= tol;
    }

    rec.avg_krylov_iters =
        rec.newton_iters > 0 ? static_cast<double>(krylov_total) / rec.newton_iters : 0.0;
    rec.final_residual = st.residual;
    rec.converged = converged;
    rec.nonmultibang_count = count_nonmultibang(st.p, penalty, gamma);
    sol.report.levels.push_back(rec);
    if (on_level) on_level(rec);
    if (!converged) break;
    u = st.u;
    sol.u = st.u;
    sol.p = st.p;
    sol.level_controls.push_back(st.u);
  }
  sol.report.completed = !sol.report.levels.empty() && sol.report.levels.back().converged &&
                         sol.report.levels.size() == schedule.levels().size();
  if (sol.u.empty()) {
    sol.u = u;
    sol.p = reduced_gradient(problem, u);
  }
  return sol;
}

} // namespace multibang
