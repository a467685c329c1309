#include "multibang/elasticity.hpp"
#include "multibang/verification.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace multibang;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64 &rng) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = d(rng);
  return v;
}

NodalField zero_field(const StructuredMesh &mesh) {
  return NodalField(static_cast<std::size_t>(mesh.num_nodes()), Vec2::Zero());
}

double max_abs(const SparseMatrix &a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

} // namespace

TEST_CASE("mesh layout") {
  const StructuredMesh mesh(3, 5);
  CHECK(mesh.num_nodes() == 15);
  CHECK(mesh.triangles().size() == 16);
  CHECK(mesh.num_free() == 12);
  CHECK(mesh.is_dirichlet(2));
  CHECK(!mesh.is_dirichlet(3));
  CHECK(mesh.free_index(3) == 0);
  CHECK((mesh.node(14) - Vec2(1.0, 2.0)).norm() == 0.0);
  CHECK_THROWS_AS(StructuredMesh(1, 4), std::invalid_argument);
}

TEST_CASE("assembly") {
  const ElasticMaterial mat;
  CHECK(verify_assembly_oracle(mat).passed);

  const StructuredMesh mesh(4, 6);
  const AssembledSystem sys = assemble(mesh, mat, zero_field(mesh));
  const SparseMatrix asym = SparseMatrix(sys.A - SparseMatrix(sys.A.transpose()));
  CHECK(max_abs(asym) == 0.0);

  // free-dof blocks of the dense oracle
  const DenseAssembly dense = dense_assembly_oracle(mesh);
  const Eigen::Index n = 2 * mesh.num_free();
  CHECK((Eigen::MatrixXd(sys.M) - dense.M.bottomRightCorner(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((Eigen::MatrixXd(sys.A) -
         (2 * mat.mu() * dense.L + mat.lambda() * dense.K).bottomRightCorner(n, n))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  // the free basis functions sum to 1 off the clamped strip and rise linearly across it
  const double hy = mesh.height() / (mesh.ny() - 1);
  const double expected = 2.0 * (mesh.width() * (mesh.height() - hy) + mesh.width() * hy / 3.0);
  CHECK(Eigen::MatrixXd(sys.M).sum() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(sys.lumped.sum() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("stiffness is positive definite on free nodes") {
  const StructuredMesh mesh(9, 9);
  const AssembledSystem sys = assemble(mesh, ElasticMaterial(), zero_field(mesh));
  std::mt19937_64 rng(1);
  double smallest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd v = random_vector(sys.A.rows(), rng);
    smallest = std::min(smallest, v.dot(sys.A * v) / v.squaredNorm());
  }
  CHECK(smallest > 0.0);
}

TEST_CASE("state solve") {
  const StructuredMesh mesh(9, 17);
  const AssembledSystem sys = assemble(mesh, ElasticMaterial(), zero_field(mesh));
  const StateSolver solver(sys);
  CHECK(solver.solve(Eigen::VectorXd::Zero(sys.A.rows())).norm() == 0.0);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd u = random_vector(sys.A.rows(), rng);
    const Eigen::VectorXd v = random_vector(sys.A.rows(), rng);
    const Eigen::VectorXd Su = solver.solve(u), Sv = solver.solve(v);
    const double a = Su.dot(sys.M * v), b = u.dot(sys.M * Sv);
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
    const Eigen::VectorXd galerkin = sys.M * u - sys.A * Su;
    CHECK(galerkin.cwiseAbs().maxCoeff() <= 1e-12 * (sys.M * u).cwiseAbs().maxCoeff());
  }
  CHECK((solve_state(sys, Eigen::VectorXd::Ones(sys.A.rows())) -
         solver.solve(Eigen::VectorXd::Ones(sys.A.rows())))
            .norm() <= 1e-14);
}

TEST_CASE("state converges under refinement") {
  auto load = [](const StructuredMesh &mesh) {
    NodalField f = zero_field(mesh);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      const Vec2 x = mesh.node(i);
      f[static_cast<std::size_t>(i)] = Vec2(std::sin(2 * x.y()), std::cos(3 * x.x()) * x.y());
    }
    return f;
  };
  std::vector<NodalField> sols;
  for (int n : {9, 17, 33}) {
    const StructuredMesh mesh(n, n);
    const AssembledSystem sys = assemble(mesh, ElasticMaterial(), zero_field(mesh));
    sols.push_back(extend_field(mesh, solve_state(sys, restrict_field(mesh, load(mesh)))));
  }
  // compare on the nodes of the coarsest mesh
  auto diff = [&](int level) {
    const int nf = 9 * (1 << level) - ((1 << level) - 1);
    const int stride = 1 << level;
    double e = 0.0;
    for (int iy = 0; iy < 9; ++iy)
      for (int ix = 0; ix < 9; ++ix) {
        const auto &a = sols[static_cast<std::size_t>(level - 1)]
                            [static_cast<std::size_t>((iy * stride / 2) * (nf / 2 + 1) +
                                                      ix * stride / 2)];
        const auto &b =
            sols[static_cast<std::size_t>(level)][static_cast<std::size_t>(iy * stride * nf + ix * stride)];
        e = std::max(e, (a - b).norm());
      }
    return e;
  };
  const double e1 = diff(1), e2 = diff(2);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("optimality residual") {
  const StructuredMesh mesh(5, 9);
  const NodalField z = make_rotation_target(mesh, std::numbers::pi / 2);
  const AssembledSystem sys = assemble(mesh, ElasticMaterial(), z);
  const auto radial = Penalty::radial(RadialSet(1.0, {-std::numbers::pi, -std::numbers::pi / 3,
                                                      std::numbers::pi / 3}),
                                      1e-3);
  const Eigen::Index n = sys.A.rows();

  const AssembledSystem sys0 = assemble(mesh, ElasticMaterial(), zero_field(mesh));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const SaddleResidual r0 = residual(sys0, zero, zero, evaluate_penalty(zero, radial, 1e-2));
  CHECK(r0.norm() == 0.0);

  std::mt19937_64 rng(3);
  const Eigen::VectorXd y = random_vector(n, rng), p = random_vector(n, rng);
  const NodalPenalty hp = evaluate_penalty(p, radial, 1e-2);
  const SaddleResidual a = residual(sys, y, p, hp), b = residual(sys, 2.0 * y, p, hp),
                       c = residual(sys, zero, p, hp);
  CHECK((b.r1 - 2.0 * a.r1 + c.r1).norm() <= 1e-12 * a.r1.norm());
  CHECK((b.r2 - 2.0 * a.r2 + c.r2).norm() <= 1e-12 * a.r2.norm());

  NodalPenalty identity = hp;
  for (int i = 0; i < mesh.num_free(); ++i)
    identity.values[static_cast<std::size_t>(i)] = p.segment<2>(2 * i);
  CHECK((residual(sys, y, p, identity).r2 - (sys.A * y - sys.M * p)).norm() == 0.0);
}

TEST_CASE("saddle newton step") {
  const StructuredMesh mesh(9, 17);
  const NodalField z = make_rotation_target(mesh, std::numbers::pi / 2);
  const AssembledSystem sys = assemble(mesh, ElasticMaterial(), z);
  const auto concentric = Penalty::concentric(1e-3);
  const Eigen::Index n = sys.A.rows();
  std::mt19937_64 rng(4);
  SaddleNewtonSolver solver(sys);
  Eigen::VectorXd dy, dp;

  SUBCASE("zero residual") {
    const NodalPenalty hp = evaluate_penalty(random_vector(n, rng), concentric, 1e-2);
    SaddleResidual r{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    REQUIRE(solver.step(hp, r, dy, dp));
    CHECK(dy.norm() == 0.0);
    CHECK(dp.norm() == 0.0);
  }

  SUBCASE("linearized residual vanishes") {
    const Eigen::VectorXd y = random_vector(n, rng), p = 1e-2 * random_vector(n, rng);
    const NodalPenalty hp = evaluate_penalty(p, concentric, 1e-2);
    const SaddleResidual r = residual(sys, y, p, hp);
    REQUIRE(solver.step(hp, r, dy, dp));
    Eigen::VectorXd x(2 * n), rhs(2 * n);
    x << dy, dp;
    rhs << r.r1, r.r2;
    CHECK((solver.matrix() * x + rhs).norm() <= 1e-8 * rhs.norm());
  }

  SUBCASE("pure regions reduce to the linear saddle problem") {
    // every node deep inside a vertex region, so the Newton derivative vanishes
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 10.0);
    const NodalPenalty hp = evaluate_penalty(p, concentric, 1e-2);
    for (const auto &d : hp.derivatives) REQUIRE(d.norm() == 0.0);
    const Eigen::VectorXd y = random_vector(n, rng);
    const SaddleResidual r = residual(sys, y, p, hp);
    REQUIRE(solver.step(hp, r, dy, dp));
    const Eigen::MatrixXd A(sys.A), M(sys.M);
    const Eigen::VectorXd ey = A.partialPivLu().solve(-r.r2);
    const Eigen::VectorXd ep = A.transpose().partialPivLu().solve(-r.r1 - M * ey);
    CHECK((dy - ey).norm() <= 1e-9 * std::max(1.0, ey.norm()));
    CHECK((dp - ep).norm() <= 1e-9 * std::max(1.0, ep.norm()));
  }
}

TEST_CASE("targets") {
  const StructuredMesh mesh(5, 9);
  for (const auto &v : make_rotation_target(mesh, 0.0)) CHECK(v.norm() == 0.0);
  const int center = 4 * 5 + 2;
  CHECK(make_rotation_target(mesh, 1.234)[center].norm() <= 1e-15);
  const NodalField flip = make_rotation_target(mesh, std::numbers::pi);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    CHECK((flip[static_cast<std::size_t>(i)] + 2.0 * (mesh.node(i) - Vec2(0.5, 1.0))).norm() <=
          1e-14);

  const ElasticMaterial mat;
  for (const auto &v : make_deadload_target(mesh, mat, 0.0)) CHECK(v.norm() == 0.0);
  const NodalField one = make_deadload_target(mesh, mat, 1.0);
  const NodalField two = make_deadload_target(mesh, mat, 2.0);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(two[i] == 2.0 * one[i]);
  CHECK(make_deadload_target(mesh, mat, 1.0, 0.0, 5) == make_deadload_target(mesh, mat, 1.0, 0.0, 9));
  CHECK(make_deadload_target(mesh, mat, 1.0, 0.05, 5) == make_deadload_target(mesh, mat, 1.0, 0.05, 5));
  CHECK(!(make_deadload_target(mesh, mat, 1.0, 0.05, 5) == one));
  // the clamped edge does not move
  for (int i = 0; i < mesh.nx(); ++i) CHECK(one[static_cast<std::size_t>(i)].norm() == 0.0);
}
