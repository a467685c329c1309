#include "multibang/ssn.hpp"

#include <cmath>

namespace multibang {

namespace {

int count_all_nodes(const StructuredMesh &mesh, const NodalPenalty &hp, const Penalty &penalty,
                    double gamma) {
  int count = 0;
  for (auto mb : hp.multibang) count += mb ? 0 : 1;
  // clamped nodes carry p = 0
  if (!penalty.evaluate(Vec2::Zero(), gamma).multibang) count += mesh.num_nodes() - mesh.num_free();
  return count;
}

} // namespace

ElasticitySolution ssn_solve_elasticity(const ElasticityProblem &problem,
                                        const Penalty &penalty,
                                        const ContinuationSchedule &schedule,
                                        const NewtonConfig &config,
                                        const LevelCallback &on_level) {
  config.validate();
  const auto &mesh = problem.mesh;
  const AssembledSystem sys = assemble(mesh, problem.material, problem.target);
  SaddleNewtonSolver newton(sys, problem.coupling);
  const Eigen::Index n = sys.A.rows();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n), p = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y_ok = y, p_ok = p;
  double gamma_ok = schedule.levels().front();

  ElasticitySolution sol;
  sol.report.nodes = mesh.num_nodes();

  for (const double gamma : schedule.levels()) {
    LevelRecord rec;
    rec.gamma = gamma;
    NodalPenalty hp = evaluate_penalty(p, penalty, gamma);
    SaddleResidual r = residual(sys, y, p, hp, problem.coupling);
    double res = r.norm();
    rec.initial_residual = res;
    const double tol = std::max(config.tol_abs, config.tol_rel * res);
    bool converged = res <= tol;

    Eigen::VectorXd dy, dp;
    while (!converged && rec.newton_iters < config.max_iter) {
      if (!newton.step(hp, r, dy, dp)) break;
      ++rec.newton_iters;
      NodalPenalty hp_t;
      SaddleResidual r_t;
      const auto ls = line_search(
          [&](double t) {
            hp_t = evaluate_penalty(p + t * dp, penalty, gamma);
            r_t = residual(sys, y + t * dy, p + t * dp, hp_t, problem.coupling);
            return r_t.norm();
          },
          res, config.line_search);
      if (!ls.success) break;
      if (ls.halvings > 0) ++rec.line_search_count;
      y += ls.step * dy;
      p += ls.step * dp;
      const bool same_labels = hp_t.labels == hp.labels;
      hp = std::move(hp_t);
      r = std::move(r_t);
      res = ls.residual;
      converged = res <= tol || (same_labels && ls.halvings == 0);
    }

    rec.final_residual = res;
    rec.converged = converged;
    rec.nonmultibang_count = count_all_nodes(mesh, hp, penalty, gamma);
    sol.report.levels.push_back(rec);
    if (on_level) on_level(rec);
    if (!converged) break;
    y_ok = y;
    p_ok = p;
    gamma_ok = gamma;
  }

  sol.report.completed = !sol.report.levels.empty() && sol.report.levels.back().converged &&
                         sol.report.levels.size() == schedule.levels().size();
  sol.y = extend_field(mesh, y_ok);
  sol.p = extend_field(mesh, p_ok);
  sol.u.assign(static_cast<std::size_t>(mesh.num_nodes()), Vec2::Zero());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    sol.u[static_cast<std::size_t>(i)] = penalty.my(sol.p[static_cast<std::size_t>(i)], gamma_ok);
  return sol;
}

double elasticity_energy(const AssembledSystem &system, const StateSolver &solver,
                         const Eigen::VectorXd &u, const Penalty &penalty, double gamma) {
  const Eigen::VectorXd y = solver.solve_rhs(system.lumped.cwiseProduct(u));
  double e = 0.5 * y.dot(system.M * y) - y.dot(system.Z);
  for (Eigen::Index i = 0; i < u.size() / 2; ++i) {
    const Vec2 ui = u.segment<2>(2 * i);
    e += system.lumped(2 * i) * (penalty.value(ui) + 0.5 * gamma * ui.squaredNorm());
  }
  return e;
}

} // namespace multibang
