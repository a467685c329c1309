#include "multibang/verification.hpp"

#include "multibang/prox_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace multibang {

namespace {

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

} // namespace

std::string format_suite(const SuiteResult &r) {
  return std::string(r.passed ? "PASS" : "FAIL") + "  " + r.name + "  metric=" +
         short_real(r.metric) + "  threshold=" + short_real(r.threshold) +
         (r.detail.empty() ? "" : "  " + r.detail);
}

namespace {

SuiteResult finish(std::string name, double metric, double tol, std::string detail = {}) {
  return {std::move(name), std::isfinite(metric) && metric <= tol, metric, tol, std::move(detail)};
}

std::string tag(const Penalty &penalty, double gamma) {
  return penalty.name() + " alpha=" + short_real(penalty.alpha()) + " gamma=" +
         short_real(gamma);
}

} // namespace

SuiteResult verify_prox_sweep(const Penalty &penalty, double gamma, int samples, double box,
                              std::uint64_t seed, double tol) {
  const auto set = penalty.admissible_set();
  const PenaltyParams params(penalty.alpha(), gamma);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec2 q(dist(rng), dist(rng));
    worst = std::max(worst, (penalty.prox(q, gamma) - prox_oracle(q, set, params)).norm());
  }
  return finish("prox-oracle-sweep", worst, tol,
                tag(penalty, gamma) + " samples=" + std::to_string(samples));
}

SuiteResult verify_my_identity(const Penalty &penalty, double gamma, int samples, double box,
                               std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec2 q(dist(rng), dist(rng));
    const Vec2 ref = (q - penalty.prox(q, gamma)) / gamma;
    worst = std::max(worst, (penalty.my(q, gamma) - ref).cwiseAbs().maxCoeff());
  }
  return finish("moreau-yosida-identity", worst, tol,
                tag(penalty, gamma) + " samples=" + std::to_string(samples));
}

SuiteResult verify_newton_derivative(const Penalty &penalty, double gamma, int samples,
                                     double box, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  const double h = 1e-7, guard = 1e-5;
  double worst = 0.0;
  int accepted = 0, drawn = 0;
  while (accepted < samples && drawn < 1000 * samples) {
    ++drawn;
    const Vec2 q(dist(rng), dist(rng));
    const auto e = penalty.evaluate(q, gamma);
    bool interior = true;
    for (int k = 0; k < 2 && interior; ++k)
      for (double sgn : {-1.0, 1.0}) {
        const auto f = penalty.evaluate(q + sgn * guard * Vec2::Unit(k), gamma);
        if (f.label != e.label) interior = false;
      }
    if (!interior) continue;
    ++accepted;
    Mat2 fd;
    for (int k = 0; k < 2; ++k)
      fd.col(k) = (penalty.my(q + h * Vec2::Unit(k), gamma) -
                   penalty.my(q - h * Vec2::Unit(k), gamma)) /
                  (2.0 * h);
    const double scale = std::max(1.0, e.derivative.cwiseAbs().maxCoeff());
    worst = std::max(worst, (fd - e.derivative).cwiseAbs().maxCoeff() / scale);
  }
  if (accepted < samples) worst = std::numeric_limits<double>::infinity();
  return finish("newton-derivative-fd", worst, tol,
                tag(penalty, gamma) + " interior samples=" + std::to_string(accepted));
}

namespace {

Control random_control(int n, std::mt19937_64 &rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Control u(static_cast<std::size_t>(n));
  for (auto &v : u) v = Vec2(dist(rng), dist(rng));
  return u;
}

Control axpy(const Control &u, double t, const Control &phi) {
  Control v = u;
  for (std::size_t m = 0; m < v.size(); ++m) v[m] += t * phi[m];
  return v;
}

} // namespace

SuiteResult verify_bloch_gradient(const BlochProblem &problem, int directions,
                                  std::uint64_t seed, double eps, double tol) {
  problem.validate();
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int d = 0; d < directions; ++d) {
    const Control u = random_control(problem.n_intervals, rng, 1.0);
    const Control phi = random_control(problem.n_intervals, rng, 1.0);
    const Control p = reduced_gradient(problem, u);
    const double analytic = -inner(p, phi, problem.dt());
    const double fd =
        (objective(problem, axpy(u, eps, phi)) - objective(problem, axpy(u, -eps, phi))) /
        (2.0 * eps);
    worst = std::max(worst, std::abs(analytic - fd) / std::max(1.0, std::abs(analytic)));
  }
  return finish("bloch-gradient-fd", worst, tol,
                "directions=" + std::to_string(directions) + " N=" +
                    std::to_string(problem.n_intervals));
}

SuiteResult verify_bloch_discrete_adjoint(BlochProblem problem, std::uint64_t seed, double tol) {
  problem.n_intervals = 3;
  problem.validate();
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int d = 0; d < 10; ++d) {
    const Control u = random_control(3, rng, 1.0);
    const Control phi = random_control(3, rng, 1.0);
    const double analytic = -inner(reduced_gradient(problem, u), phi, problem.dt());
    auto central = [&](double e) {
      return (objective(problem, axpy(u, e, phi)) - objective(problem, axpy(u, -e, phi))) /
             (2.0 * e);
    };
    // two Richardson levels remove the e^2 and e^4 terms
    const double e = 2e-3;
    const double d1 = central(e), d2 = central(e / 2), d3 = central(e / 4);
    const double r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
    const double extrapolated = (16.0 * r2 - r1) / 15.0;
    worst = std::max(worst,
                     std::abs(analytic - extrapolated) / std::max(1.0, std::abs(analytic)));
  }
  return finish("bloch-discrete-adjoint", worst, tol, "N=3");
}

DenseAssembly dense_assembly_oracle(const StructuredMesh &mesh) {
  const int nx = mesh.nx(), ny = mesh.ny(), nn = nx * ny;
  auto coord = [&](int ix, int iy) {
    return Vec2(mesh.width() * ix / (nx - 1), mesh.height() * iy / (ny - 1));
  };
  DenseAssembly out{Eigen::MatrixXd::Zero(2 * nn, 2 * nn), Eigen::MatrixXd::Zero(2 * nn, 2 * nn),
                    Eigen::MatrixXd::Zero(2 * nn, 2 * nn)};
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const int a = iy * nx + ix;
      const std::array<std::array<int, 3>, 2> cells = {
          std::array<int, 3>{a, a + 1, a + nx + 1}, std::array<int, 3>{a, a + nx + 1, a + nx}};
      for (const auto &tri : cells) {
        Eigen::Matrix3d V;
        std::array<Vec2, 3> x;
        for (int k = 0; k < 3; ++k) {
          x[static_cast<std::size_t>(k)] = coord(tri[k] % nx, tri[k] / nx);
          V.row(k) << 1.0, x[static_cast<std::size_t>(k)].x(), x[static_cast<std::size_t>(k)].y();
        }
        // columns: coefficients (c0, cx, cy) of each shape function
        const Eigen::Matrix3d C = V.inverse();
        const double area = 0.5 * std::abs(V.determinant());
        auto phi = [&](int k, const Vec2 &p) { return C(0, k) + C(1, k) * p.x() + C(2, k) * p.y(); };
        const std::array<Vec2, 3> mids = {0.5 * (x[0] + x[1]), 0.5 * (x[1] + x[2]),
                                          0.5 * (x[2] + x[0])};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            double mass = 0.0;
            for (const auto &m : mids) mass += area / 3.0 * phi(i, m) * phi(j, m);
            const Vec2 gi(C(1, i), C(2, i)), gj(C(1, j), C(2, j));
            for (int c = 0; c < 2; ++c)
              for (int d = 0; d < 2; ++d) {
                const int r = 2 * tri[i] + c, s = 2 * tri[j] + d;
                // strain of phi_i e_c paired with strain of phi_j e_d
                Mat2 ei = Mat2::Zero(), ej = Mat2::Zero();
                ei.row(c) += 0.5 * gi.transpose();
                ei.col(c) += 0.5 * gi;
                ej.row(d) += 0.5 * gj.transpose();
                ej.col(d) += 0.5 * gj;
                if (c == d) out.M(r, s) += mass;
                out.L(r, s) += area * (ei.array() * ej.array()).sum();
                out.K(r, s) += area * gi(c) * gj(d);
              }
          }
      }
    }
  return out;
}

SuiteResult verify_assembly_oracle(const ElasticMaterial &material, double tol) {
  const StructuredMesh mesh(3, 3);
  const NodalField zero(static_cast<std::size_t>(mesh.num_nodes()), Vec2::Zero());
  const AssembledSystem sys = assemble(mesh, material, zero);
  const DenseAssembly ref = dense_assembly_oracle(mesh);
  const int nf = 2 * mesh.num_free();
  auto block = [&](const Eigen::MatrixXd &m) { return m.bottomRightCorner(nf, nf); };
  const Eigen::MatrixXd Aref =
      2.0 * material.mu() * block(ref.L) + material.lambda() * block(ref.K);
  double worst = 0.0;
  worst = std::max(worst, (Eigen::MatrixXd(sys.M) - block(ref.M)).cwiseAbs().maxCoeff());
  worst = std::max(worst, (Eigen::MatrixXd(sys.L) - block(ref.L)).cwiseAbs().maxCoeff());
  worst = std::max(worst, (Eigen::MatrixXd(sys.K) - block(ref.K)).cwiseAbs().maxCoeff());
  worst = std::max(worst, (Eigen::MatrixXd(sys.A) - Aref).cwiseAbs().maxCoeff());
  return finish("assembly-dense-oracle", worst, tol, "mesh=2x2 cells");
}

} // namespace multibang
