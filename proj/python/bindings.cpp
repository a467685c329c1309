#include "multibang/prox_kernel.hpp"
#include "multibang/runner.hpp"
#include "multibang/verification.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace multibang;

using Rows2 = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

namespace {

std::vector<Vec2> to_points(const Rows2 &a) {
  std::vector<Vec2> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = a.row(i).transpose();
  return out;
}

Rows2 from_points(const std::vector<Vec2> &v) {
  Rows2 out(static_cast<Eigen::Index>(v.size()), 2);
  for (std::size_t i = 0; i < v.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
  return out;
}

py::array_t<double> trajectory_array(const Trajectory &t) {
  py::array_t<double> out({t.n_intervals + 1, t.isochromats, 3});
  auto r = out.mutable_unchecked<3>();
  for (int m = 0; m <= t.n_intervals; ++m)
    for (int j = 0; j < t.isochromats; ++j)
      for (int k = 0; k < 3; ++k) r(m, j, k) = t.at(m, j)(k);
  return out;
}

py::dict report_dict(const SolveReport &rep) {
  py::list levels;
  for (const auto &r : rep.levels) {
    py::dict d;
    d["gamma"] = r.gamma;
    d["newton_iters"] = r.newton_iters;
    d["avg_krylov_iters"] = r.avg_krylov_iters;
    d["line_search_count"] = r.line_search_count;
    d["nonmultibang_count"] = r.nonmultibang_count;
    d["final_residual"] = r.final_residual;
    d["converged"] = r.converged;
    levels.append(d);
  }
  py::dict out;
  out["levels"] = levels;
  out["completed"] = rep.completed;
  out["nodes"] = rep.nodes;
  return out;
}

} // namespace

PYBIND11_MODULE(_multibang, m) {
  m.doc() = "Vector multibang penalties, Bloch and elasticity solvers";

  py::class_<Penalty>(m, "Penalty")
      .def_static(
          "radial",
          [](double omega0, std::vector<double> phases, double alpha) {
            return Penalty::radial(RadialSet(omega0, std::move(phases)), alpha);
          },
          py::arg("omega0"), py::arg("phases"), py::arg("alpha"))
      .def_static("concentric", &Penalty::concentric, py::arg("alpha"))
      .def_property_readonly("alpha", &Penalty::alpha)
      .def_property_readonly("name", &Penalty::name)
      .def("prox", &Penalty::prox, py::arg("q"), py::arg("gamma"))
      .def("my", &Penalty::my, py::arg("q"), py::arg("gamma"))
      .def(
          "newton_derivative",
          [](const Penalty &p, const Vec2 &q, double g) { return p.evaluate(q, g).derivative; },
          py::arg("q"), py::arg("gamma"))
      .def(
          "is_multibang",
          [](const Penalty &p, const Vec2 &q, double g) { return p.evaluate(q, g).multibang; },
          py::arg("q"), py::arg("gamma"))
      .def("value", &Penalty::value, py::arg("u"))
      .def("min_cost", &Penalty::min_cost)
      .def(
          "points", [](const Penalty &p) { return from_points(p.admissible_set().points()); })
      .def(
          "count_nonmultibang",
          [](const Penalty &p, const Rows2 &q, double g) {
            const auto pts = to_points(q);
            return count_nonmultibang(pts, p, g);
          },
          py::arg("duals"), py::arg("gamma"));

  m.def(
      "prox_oracle",
      [](const Vec2 &q, const Rows2 &points, double alpha, double gamma) {
        return prox_oracle(q, AdmissibleSet(to_points(points), alpha), PenaltyParams(alpha, gamma));
      },
      py::arg("q"), py::arg("points"), py::arg("alpha"), py::arg("gamma"));
  m.def(
      "conjugate_oracle",
      [](const Vec2 &q, const Rows2 &points, double alpha) {
        return conjugate_oracle(q, AdmissibleSet(to_points(points), alpha));
      },
      py::arg("q"), py::arg("points"), py::arg("alpha"));

  py::class_<BlochProblem>(m, "BlochProblem")
      .def(py::init([](std::vector<double> omegas, double T, int n) {
             BlochProblem p;
             p.omegas = std::move(omegas);
             p.T = T;
             p.n_intervals = n;
             p.targets.assign(p.omegas.size(), Vec3(1.0, 0.0, 0.0));
             return p;
           }),
           py::arg("omegas"), py::arg("T"), py::arg("n_intervals"))
      .def_readwrite("T", &BlochProblem::T)
      .def_readwrite("n_intervals", &BlochProblem::n_intervals)
      .def_readwrite("omegas", &BlochProblem::omegas)
      .def_readwrite("m0", &BlochProblem::m0)
      .def_readwrite("targets", &BlochProblem::targets)
      .def_property_readonly("dt", &BlochProblem::dt);

  m.def(
      "forward_solve",
      [](const BlochProblem &p, const Rows2 &u) { return trajectory_array(forward_solve(p, to_points(u))); },
      py::arg("problem"), py::arg("u"));
  m.def(
      "objective", [](const BlochProblem &p, const Rows2 &u) { return objective(p, to_points(u)); },
      py::arg("problem"), py::arg("u"));
  m.def(
      "reduced_gradient",
      [](const BlochProblem &p, const Rows2 &u) {
        return from_points(reduced_gradient(p, to_points(u)));
      },
      py::arg("problem"), py::arg("u"));
  m.def(
      "hessian_apply",
      [](const BlochProblem &p, const Rows2 &u, const Rows2 &phi) {
        return from_points(hessian_apply(p, to_points(u), to_points(phi)));
      },
      py::arg("problem"), py::arg("u"), py::arg("phi"));
  m.def(
      "solve_bloch",
      [](const BlochProblem &p, const Penalty &pen, double gamma0, double factor,
         double gamma_min) {
        const auto sol = ssn_solve_bloch(p, pen, {gamma0, factor, gamma_min}, NewtonConfig::bloch());
        py::dict out;
        out["u"] = from_points(sol.u);
        out["p"] = from_points(sol.p);
        out["report"] = report_dict(sol.report);
        return out;
      },
      py::arg("problem"), py::arg("penalty"), py::arg("gamma0") = 1e2, py::arg("factor") = 0.5,
      py::arg("gamma_min") = 1e-10);

  m.def(
      "assemble",
      [](int nx, int ny, double E, double nu) {
        const StructuredMesh mesh(nx, ny);
        const AssembledSystem s =
            assemble(mesh, ElasticMaterial(E, nu),
                     NodalField(static_cast<std::size_t>(mesh.num_nodes()), Vec2::Zero()));
        py::dict out;
        out["M"] = s.M;
        out["L"] = s.L;
        out["K"] = s.K;
        out["A"] = s.A;
        return out;
      },
      py::arg("nx"), py::arg("ny"), py::arg("E") = 20.0, py::arg("nu") = 0.3);
  m.def(
      "solve_elasticity",
      [](int nx, int ny, const Penalty &pen, const std::string &target, double gamma0,
         double factor, double gamma_min) {
        StructuredMesh mesh(nx, ny);
        ElasticMaterial mat;
        NodalField z = target == "rotation" ? make_rotation_target(mesh, 1.5707963267948966)
                                            : make_deadload_target(mesh, mat, 1.0);
        ElasticityProblem prob{std::move(mesh), mat, std::move(z), {}};
        const auto sol = ssn_solve_elasticity(prob, pen, {gamma0, factor, gamma_min},
                                              NewtonConfig::elasticity());
        py::dict out;
        out["u"] = from_points(sol.u);
        out["y"] = from_points(sol.y);
        out["p"] = from_points(sol.p);
        out["report"] = report_dict(sol.report);
        return out;
      },
      py::arg("nx"), py::arg("ny"), py::arg("penalty"), py::arg("target") = "rotation",
      py::arg("gamma0") = 1e2, py::arg("factor") = 0.5, py::arg("gamma_min") = 1e-6);

  m.def(
      "parse_config",
      [](const std::string &text) { return echo_config(parse_config(text)); },
      py::arg("text"), "Parse config text and return its canonical echo.");
  m.def(
      "run",
      [](const std::string &path, std::optional<std::string> output_dir) {
        std::ostringstream out, err;
        RunOptions o;
        o.output_dir = std::move(output_dir);
        const int code = run_command(path, o, out, err);
        return py::make_tuple(code, out.str() + err.str());
      },
      py::arg("config_path"), py::arg("output_dir") = py::none());
}
