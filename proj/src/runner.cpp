#include "multibang/runner.hpp"

#include "multibang/csv.hpp"
#include "multibang/verification.hpp"

#include <cstdio>

namespace multibang {

Penalty make_penalty(const ExperimentConfig &c) {
  if (c.penalty == "radial") return Penalty::radial(RadialSet(c.omega0, c.phases), c.alpha);
  return Penalty::concentric(c.alpha);
}

BlochProblem make_bloch_problem(const ExperimentConfig &c) {
  BlochProblem p;
  p.omegas = c.omegas;
  p.T = c.final_time;
  p.n_intervals = c.n_intervals;
  p.scaling = {c.gyro, c.field};
  const Vec3 excited(1.0, 0.0, 0.0), rest(0.0, 0.0, 1.0);
  for (std::size_t j = 0; j < c.omegas.size(); ++j) {
    const bool on = c.bloch_target == "saturate" || static_cast<int>(j) + 1 == c.target_index;
    p.targets.push_back(on ? excited : rest);
  }
  p.validate();
  return p;
}

ElasticityProblem make_elasticity_problem(const ExperimentConfig &c) {
  StructuredMesh mesh(c.nx, c.ny);
  ElasticMaterial material(c.youngs, c.poisson);
  NodalField z = c.elastic_target == "rotation"
                     ? make_rotation_target(mesh, c.rotation_angle)
                     : make_deadload_target(mesh, material, c.deadload_magnitude,
                                            c.deadload_noise, c.seed);
  return {std::move(mesh), material, std::move(z), {c.lumped_control_mass}};
}

ContinuationSchedule make_schedule(const ExperimentConfig &c) {
  ContinuationSchedule s{c.gamma0, c.gamma_factor, c.gamma_min};
  s.validate();
  return s;
}

NewtonConfig make_newton_config(const ExperimentConfig &c) {
  NewtonConfig n;
  n.tol_abs = c.tol_abs;
  n.tol_rel = c.tol_rel;
  n.max_iter = c.newton_max_iter();
  n.krylov_tol = c.krylov_tol;
  n.krylov_max = c.krylov_max;
  n.line_search = {c.ls_factor, c.ls_max_halvings};
  n.validate();
  return n;
}

void write_report_csv(const std::filesystem::path &path, const SolveReport &report) {
  CsvWriter csv({"gamma", "newton_iters", "avg_krylov_iters", "line_search_count",
                 "nonmultibang_count", "final_residual", "converged"});
  for (const auto &r : report.levels) {
    csv.cell(r.gamma).cell(r.newton_iters).cell(r.avg_krylov_iters).cell(r.line_search_count)
        .cell(r.nonmultibang_count).cell(r.final_residual).cell(r.converged ? 1 : 0);
    csv.end_row();
  }
  csv.save(path);
}

namespace {

void print_level(std::ostream &out, const LevelRecord &r) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "gamma=%.4e  ssn=%d  avg_krylov=%.2f  line_search=%d  not_mb=%d  residual=%.3e%s\n",
                r.gamma, r.newton_iters, r.avg_krylov_iters, r.line_search_count,
                r.nonmultibang_count, r.final_residual, r.converged ? "" : "  (not converged)");
  out << buf << std::flush;
}

int run_bloch(const ExperimentConfig &c, const std::filesystem::path &dir, std::ostream &out) {
  const BlochProblem problem = make_bloch_problem(c);
  const Penalty penalty = make_penalty(c);
  const auto sol = ssn_solve_bloch(problem, penalty, make_schedule(c), make_newton_config(c), {},
                                   [&](const LevelRecord &r) { print_level(out, r); });
  const Trajectory traj = forward_solve(problem, sol.u);

  CsvWriter control({"t", "u1", "u2"});
  for (int m = 0; m < problem.n_intervals; ++m) {
    const Vec2 &v = sol.u[static_cast<std::size_t>(m)];
    control.cell(m * problem.dt()).cell(v.x()).cell(v.y());
    control.end_row();
  }
  control.save(dir / "control.csv");
  write_trajectory_csv(dir / "state.csv", problem, traj);
  write_report_csv(dir / "report.csv", sol.report);

  out << sol.report.table();
  for (int j = 0; j < problem.isochromats(); ++j) {
    const Vec3 &M = traj.at(problem.n_intervals, j);
    char buf[160];
    std::snprintf(buf, sizeof buf, "isochromat %d: M(T) = (%.6f, %.6f, %.6f), |M(T) - Md| = %.3e\n",
                  j + 1, M.x(), M.y(), M.z(), (M - problem.targets[j]).norm());
    out << buf;
  }
  return sol.report.completed ? kExitOk : kExitEarlyStop;
}

int run_elasticity(const ExperimentConfig &c, const std::filesystem::path &dir,
                   std::ostream &out) {
  const ElasticityProblem problem = make_elasticity_problem(c);
  const Penalty penalty = make_penalty(c);
  const auto sol = ssn_solve_elasticity(problem, penalty, make_schedule(c), make_newton_config(c),
                                        [&](const LevelRecord &r) { print_level(out, r); });
  const auto *last = sol.report.last_converged();
  const double gamma = last ? last->gamma : c.gamma0;
  const auto set = penalty.admissible_set();

  CsvWriter control({"x", "y", "u1", "u2", "nearest_vertex", "multibang"});
  for (int i = 0; i < problem.mesh.num_nodes(); ++i) {
    const Vec2 x = problem.mesh.node(i);
    const Vec2 &u = sol.u[static_cast<std::size_t>(i)];
    const bool mb = penalty.evaluate(sol.p[static_cast<std::size_t>(i)], gamma).multibang;
    control.cell(x.x()).cell(x.y()).cell(u.x()).cell(u.y()).cell(penalty.nearest_vertex(u))
        .cell(mb ? 1 : 0);
    control.end_row();
  }
  control.save(dir / "control.csv");
  write_field_csv(dir / "state.csv", problem.mesh, {&sol.y, &sol.p, &problem.target},
                  {"y", "p", "z"});
  write_mesh_csv(dir / "mesh_vertices.csv", dir / "mesh_triangles.csv", problem.mesh);
  write_report_csv(dir / "report.csv", sol.report);

  out << sol.report.table();
  if (last) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "final gamma %.4e: %d of %d nodes not multibang (%.2f%%)\n",
                  last->gamma, last->nonmultibang_count, sol.report.nodes,
                  100.0 * last->nonmultibang_count / sol.report.nodes);
    out << buf;
  }
  return sol.report.completed ? kExitOk : kExitEarlyStop;
}

ExperimentConfig load_with_overrides(const std::string &path, const RunOptions &o) {
  ExperimentConfig c = load_config(path);
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.seed) c.seed = *o.seed;
  return c;
}

} // namespace

int run_experiment(const ExperimentConfig &c, std::ostream &out) {
  const std::filesystem::path dir = c.output_dir;
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "config.cfg", echo_config(c));
  return c.model == "bloch" ? run_bloch(c, dir, out) : run_elasticity(c, dir, out);
}

int verify_experiment(const ExperimentConfig &c, std::ostream &out) {
  std::vector<SuiteResult> results;
  auto add = [&](SuiteResult r) {
    out << format_suite(r) << '\n' << std::flush;
    results.push_back(std::move(r));
  };
  const Penalty penalty = make_penalty(c);
  for (const double gamma : {1e-1, 1e-5}) {
    add(verify_prox_sweep(penalty, gamma, 10000, 5.0, c.seed));
    add(verify_my_identity(penalty, gamma, 10000, 5.0, c.seed + 1));
    add(verify_newton_derivative(penalty, gamma, 1000, 5.0, c.seed + 2));
  }
  if (c.model == "bloch") {
    const BlochProblem problem = make_bloch_problem(c);
    add(verify_bloch_gradient(problem, 10, c.seed + 3));
    add(verify_bloch_discrete_adjoint(problem, c.seed + 4));
  } else {
    add(verify_assembly_oracle(ElasticMaterial(c.youngs, c.poisson)));
  }
  bool ok = true;
  for (const auto &r : results) ok = ok && r.passed;
  out << (ok ? "all suites passed\n" : "some suites FAILED\n");
  return ok ? kExitOk : kExitVerifyFailed;
}

int run_command(const std::string &path, const RunOptions &options, std::ostream &out,
                std::ostream &err) {
  ExperimentConfig c;
  try {
    c = load_with_overrides(path, options);
    // build everything that can reject the config before any file is written
    make_penalty(c);
    make_schedule(c);
    make_newton_config(c);
    if (c.model == "bloch") make_bloch_problem(c);
  } catch (const std::exception &e) {
    err << path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  return run_experiment(c, out);
}

int verify_command(const std::string &path, const RunOptions &options, std::ostream &out,
                   std::ostream &err) {
  ExperimentConfig c;
  try {
    c = load_with_overrides(path, options);
    make_penalty(c);
    if (c.model == "bloch") make_bloch_problem(c);
  } catch (const std::exception &e) {
    err << path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  return verify_experiment(c, out);
}

} // namespace multibang
