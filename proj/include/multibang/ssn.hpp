#pragma once

// Semismooth Newton solvers with continuation in the Moreau-Yosida
// parameter.

#include "multibang/bloch.hpp"
#include "multibang/elasticity.hpp"
#include "multibang/line_search.hpp"
#include "multibang/penalty.hpp"

#include <functional>
#include <string>
#include <vector>

namespace multibang {

struct ContinuationSchedule {
  double gamma0 = 1e2;
  double factor = 0.5;
  double gamma_min = 1e-10;

  void validate() const;
  /// gamma0 * factor^k for all k with the value >= gamma_min.
  std::vector<double> levels() const;
};

struct NewtonConfig {
  double tol_abs = 1e-7;
  double tol_rel = 1e-7;
  int max_iter = 500;
  double krylov_tol = 1e-10;
  int krylov_max = 1000;
  LineSearchConfig line_search;

  void validate() const;
  static NewtonConfig bloch() { return {}; }
  static NewtonConfig elasticity() {
    NewtonConfig c;
    c.max_iter = 50;
    return c;
  }
};

struct LevelRecord {
  double gamma = 0.0;
  int newton_iters = 0;
  double avg_krylov_iters = 0.0;
  int line_search_count = 0;
  int nonmultibang_count = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  bool converged = false;
};

struct SolveReport {
  std::vector<LevelRecord> levels;
  /// True when every scheduled level converged.
  bool completed = false;
  int nodes = 0;

  /// Last converged level, or nullptr.
  const LevelRecord *last_converged() const;
  std::string table() const;
};

/// Called after each level with the current iterate.
using LevelCallback = std::function<void(const LevelRecord &)>;

struct BlochSolution {
  Control u;
  Control p;
  SolveReport report;
  /// Control after each converged level.
  std::vector<Control> level_controls;
};

/// Discrete L2 norm sqrt(h sum |u_m - h_gamma(p_m)|^2) of the reduced
/// optimality residual.
double bloch_residual_norm(const Control &u, const Control &p, const Penalty &penalty,
                           double gamma, double dt);

BlochSolution ssn_solve_bloch(const BlochProblem &problem, const Penalty &penalty,
                              const ContinuationSchedule &schedule, const NewtonConfig &config,
                              Control u0 = {}, const LevelCallback &on_level = {});

struct ElasticityProblem {
  StructuredMesh mesh;
  ElasticMaterial material;
  NodalField target;
  ElasticityCoupling coupling;
};

struct ElasticitySolution {
  NodalField y;
  NodalField p;
  NodalField u;
  SolveReport report;
};

ElasticitySolution ssn_solve_elasticity(const ElasticityProblem &problem,
                                        const Penalty &penalty,
                                        const ContinuationSchedule &schedule,
                                        const NewtonConfig &config,
                                        const LevelCallback &on_level = {});

/// Discrete regularized energy 1/2 |y - z|_M^2 + sum_i w_i (g(u_i) + gamma/2 |u_i|^2)
/// up to a constant, with y = A^{-1} W u and lumped weights w_i. Its
/// optimality system is the lumped-coupling residual.
double elasticity_energy(const AssembledSystem &system, const StateSolver &solver,
                         const Eigen::VectorXd &u, const Penalty &penalty, double gamma);

} // namespace multibang
