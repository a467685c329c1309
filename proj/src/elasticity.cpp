#include "multibang/elasticity.hpp"

#include "multibang/csv.hpp"

#include <Eigen/SparseLU>
#if MULTIBANG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace multibang {

using Triplet = Eigen::Triplet<double>;

ElasticMaterial::ElasticMaterial(double E_, double nu_) : E(E_), nu(nu_) {
  if (!(E > 0.0)) throw std::invalid_argument("elastic modulus must be positive");
  if (!(nu > 0.0 && nu < 0.5)) throw std::invalid_argument("Poisson ratio must be in (0, 0.5)");
}

StructuredMesh::StructuredMesh(int nx, int ny, double width, double height)
    : nx_(nx), ny_(ny), width_(width), height_(height) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("mesh needs at least 2x2 vertices");
  if (!(width > 0.0 && height > 0.0)) throw std::invalid_argument("degenerate domain");
  triangles_.reserve(static_cast<std::size_t>(2 * (nx - 1) * (ny - 1)));
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const int v00 = iy * nx + ix, v10 = v00 + 1, v01 = v00 + nx, v11 = v01 + 1;
      triangles_.push_back({v00, v10, v11});
      triangles_.push_back({v00, v11, v01});
    }
}

Vec2 StructuredMesh::node(int i) const {
  const int ix = i % nx_, iy = i / nx_;
  return {width_ * ix / (nx_ - 1), height_ * iy / (ny_ - 1)};
}

std::vector<int> StructuredMesh::dirichlet_nodes() const {
  std::vector<int> out(static_cast<std::size_t>(nx_));
  for (int i = 0; i < nx_; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

Eigen::VectorXd restrict_field(const StructuredMesh &mesh, const NodalField &f) {
  if (static_cast<int>(f.size()) != mesh.num_nodes())
    throw std::invalid_argument("field size does not match the mesh");
  Eigen::VectorXd v(2 * mesh.num_free());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (const int k = mesh.free_index(i); k >= 0) v.segment<2>(2 * k) = f[static_cast<std::size_t>(i)];
  return v;
}

NodalField extend_field(const StructuredMesh &mesh, const Eigen::VectorXd &v) {
  if (v.size() != 2 * mesh.num_free()) throw std::invalid_argument("vector size mismatch");
  NodalField f(static_cast<std::size_t>(mesh.num_nodes()), Vec2::Zero());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (const int k = mesh.free_index(i); k >= 0) f[static_cast<std::size_t>(i)] = v.segment<2>(2 * k);
  return f;
}

AssembledSystem assemble(const StructuredMesh &mesh, const ElasticMaterial &material,
                         const NodalField &z) {
  if (static_cast<int>(z.size()) != mesh.num_nodes())
    throw std::invalid_argument("target size does not match the mesh");
  const int ndof = 2 * mesh.num_nodes();
  std::vector<Triplet> tm, tl, tk;
  const std::size_t per = 36 * mesh.triangles().size();
  tm.reserve(per);
  tl.reserve(per);
  tk.reserve(per);

  for (const auto &tri : mesh.triangles()) {
    const Vec2 x0 = mesh.node(tri[0]), x1 = mesh.node(tri[1]), x2 = mesh.node(tri[2]);
    const double det = cross2(x1 - x0, x2 - x0);
    if (!(std::abs(det) > 0.0)) throw std::runtime_error("degenerate triangle in mesh");
    const double area = 0.5 * std::abs(det);
    const std::array<Vec2, 3> g = {Vec2(x1.y() - x2.y(), x2.x() - x1.x()) / det,
                                   Vec2(x2.y() - x0.y(), x0.x() - x2.x()) / det,
                                   Vec2(x0.y() - x1.y(), x1.x() - x0.x()) / det};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double mab = area / 12.0 * (a == b ? 2.0 : 1.0);
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            const int r = 2 * tri[a] + c, s = 2 * tri[b] + d;
            if (c == d) tm.emplace_back(r, s, mab);
            const double lv =
                area * 0.5 * ((c == d ? g[a].dot(g[b]) : 0.0) + g[a](d) * g[b](c));
            tl.emplace_back(r, s, lv);
            tk.emplace_back(r, s, area * (g[a](c) * g[b](d)));
          }
      }
  }

  SparseMatrix Mf(ndof, ndof), Lf(ndof, ndof), Kf(ndof, ndof);
  Mf.setFromTriplets(tm.begin(), tm.end());
  Lf.setFromTriplets(tl.begin(), tl.end());
  Kf.setFromTriplets(tk.begin(), tk.end());

  Eigen::VectorXd zf(ndof);
  for (int i = 0; i < mesh.num_nodes(); ++i) zf.segment<2>(2 * i) = z[static_cast<std::size_t>(i)];

  // Dirichlet nodes are the first nx, so the free block is trailing.
  const int nf = 2 * mesh.num_free();
  AssembledSystem sys;
  sys.num_free_nodes = mesh.num_free();
  sys.M = Mf.bottomRightCorner(nf, nf);
  sys.L = Lf.bottomRightCorner(nf, nf);
  sys.K = Kf.bottomRightCorner(nf, nf);
  sys.A = 2.0 * material.mu() * sys.L + material.lambda() * sys.K;
  sys.M.makeCompressed();
  sys.L.makeCompressed();
  sys.K.makeCompressed();
  sys.A.makeCompressed();
  sys.Z = (Mf * zf).tail(nf);
  sys.lumped = sys.M * Eigen::VectorXd::Ones(nf);
  return sys;
}

StateSolver::StateSolver(const AssembledSystem &system) : system_(system) {
  ldlt_.compute(system.A);
  if (ldlt_.info() != Eigen::Success) throw std::runtime_error("stiffness factorization failed");
}

Eigen::VectorXd StateSolver::solve_rhs(const Eigen::VectorXd &rhs) const {
  Eigen::VectorXd y = ldlt_.solve(rhs);
  const double scale = std::max(rhs.norm(), 1e-300);
  const double rel = (system_.A * y - rhs).norm() / scale;
  if (rhs.norm() > 0.0 && !(rel <= 1e-12)) {
    // one step of iterative refinement
    y += ldlt_.solve(rhs - system_.A * y);
    const double rel2 = (system_.A * y - rhs).norm() / scale;
    if (!(rel2 <= 1e-10))
      throw std::runtime_error("state solve residual " + format_real(rel2) + " above 1e-10");
  }
  return y;
}

Eigen::VectorXd StateSolver::solve(const Eigen::VectorXd &load) const {
  return solve_rhs(system_.M * load);
}

Eigen::VectorXd solve_state(const AssembledSystem &system, const Eigen::VectorXd &load) {
  return StateSolver(system).solve(load);
}

double SaddleResidual::norm() const { return std::sqrt(r1.squaredNorm() + r2.squaredNorm()); }

NodalPenalty evaluate_penalty(const Eigen::VectorXd &p, const Penalty &penalty, double gamma) {
  const auto n = static_cast<std::size_t>(p.size() / 2);
  NodalPenalty hp;
  hp.values.resize(n);
  hp.derivatives.resize(n);
  hp.labels.resize(n);
  hp.multibang.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = penalty.evaluate(p.segment<2>(2 * static_cast<Eigen::Index>(i)), gamma);
    hp.values[i] = e.value;
    hp.derivatives[i] = e.derivative;
    hp.labels[i] = e.label;
    hp.multibang[i] = e.multibang ? 1 : 0;
  }
  return hp;
}

namespace {

Eigen::VectorXd stack(const std::vector<Vec2> &v) {
  Eigen::VectorXd out(2 * static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out.segment<2>(2 * static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

} // namespace

SaddleResidual residual(const AssembledSystem &system, const Eigen::VectorXd &y,
                        const Eigen::VectorXd &p, const NodalPenalty &hp,
                        const ElasticityCoupling &coupling) {
  const Eigen::VectorXd u = stack(hp.values);
  SaddleResidual r;
  r.r1 = system.A.transpose() * p + system.M * y - system.Z;
  r.r2 = system.A * y -
         (coupling.lumped_control_mass ? Eigen::VectorXd(system.lumped.cwiseProduct(u))
                                       : Eigen::VectorXd(system.M * u));
  return r;
}

struct SaddleNewtonSolver::Impl {
#if MULTIBANG_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  bool analyzed = false;
};

SaddleNewtonSolver::SaddleNewtonSolver(const AssembledSystem &system, ElasticityCoupling coupling)
    : system_(system), coupling_(coupling), impl_(new Impl) {
  const Eigen::Index n = system.A.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * system.A.nonZeros() + 3 * system.M.nonZeros()));
  for (Eigen::Index c = 0; c < system.M.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(system.M, c); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Eigen::Index c = 0; c < system.A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(system.A, c); it; ++it) {
      t.emplace_back(it.col(), n + it.row(), it.value());
      t.emplace_back(n + it.row(), it.col(), it.value());
    }
  // Full 2x2 node blocks in the lower-right, following the node pattern of M.
  for (Eigen::Index c = 0; c < system.M.outerSize(); c += 2)
    for (SparseMatrix::InnerIterator it(system.M, c); it; ++it) {
      if (it.row() % 2 != 0) continue;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t.emplace_back(n + it.row() + a, n + c + b, 0.0);
    }
  jac_.resize(2 * n, 2 * n);
  jac_.setFromTriplets(t.begin(), t.end());
  jac_.makeCompressed();

  auto slot = [&](Eigen::Index r, Eigen::Index c) {
    const auto *inner = jac_.innerIndexPtr();
    const auto begin = jac_.outerIndexPtr()[c], end = jac_.outerIndexPtr()[c + 1];
    const auto *pos = std::lower_bound(inner + begin, inner + end, static_cast<int>(r));
    return static_cast<Eigen::Index>(pos - inner);
  };
  for (Eigen::Index c = 0; c < system.M.outerSize(); c += 2)
    for (SparseMatrix::InnerIterator it(system.M, c); it; ++it) {
      if (it.row() % 2 != 0) continue;
      const Eigen::Index r = n + it.row(), cc = n + c;
      const double m = coupling_.lumped_control_mass
                           ? (it.row() == c ? system.lumped(it.row()) : 0.0)
                           : it.value();
      slots_.push_back({{slot(r, cc), slot(r + 1, cc), slot(r, cc + 1), slot(r + 1, cc + 1)},
                        static_cast<int>(c / 2), m});
    }
}

SaddleNewtonSolver::~SaddleNewtonSolver() { delete impl_; }

const char *SaddleNewtonSolver::backend() const {
#if MULTIBANG_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

void SaddleNewtonSolver::fill(const NodalPenalty &hp) {
  double *v = jac_.valuePtr();
  for (const auto &s : slots_) {
    const Mat2 &D = hp.derivatives[static_cast<std::size_t>(s.node)];
    v[s.k[0]] = -s.m * D(0, 0);
    v[s.k[1]] = -s.m * D(1, 0);
    v[s.k[2]] = -s.m * D(0, 1);
    v[s.k[3]] = -s.m * D(1, 1);
  }
}

bool SaddleNewtonSolver::step(const NodalPenalty &hp, const SaddleResidual &res,
                              Eigen::VectorXd &dy, Eigen::VectorXd &dp) {
  fill(hp);
  if (!impl_->analyzed) {
    impl_->lu.analyzePattern(jac_);
    impl_->analyzed = true;
  }
  impl_->lu.factorize(jac_);
  if (impl_->lu.info() != Eigen::Success) return false;
  const Eigen::Index n = system_.A.rows();
  Eigen::VectorXd rhs(2 * n);
  rhs << -res.r1, -res.r2;
  Eigen::VectorXd sol = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success || !sol.allFinite()) return false;
  const double scale = std::max(rhs.norm(), 1e-300);
  double rel = (jac_ * sol - rhs).norm() / scale;
  for (int k = 0; k < 3 && rel > 1e-10; ++k) {
    const Eigen::VectorXd defect = rhs - jac_ * sol;
    const Eigen::VectorXd trial = sol + impl_->lu.solve(defect);
    const double trial_rel = (jac_ * trial - rhs).norm() / scale;
    if (!(trial_rel < rel)) break;
    sol = trial;
    rel = trial_rel;
  }
  last_relative_residual_ = rel;
  if (!(rel <= 1e-6)) return false;
  dy = sol.head(n);
  dp = sol.tail(n);
  return true;
}

NodalField make_rotation_target(const StructuredMesh &mesh, double angle) {
  const Vec2 c(0.5 * mesh.width(), 0.5 * mesh.height());
  Mat2 R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  NodalField z(static_cast<std::size_t>(mesh.num_nodes()));
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 x = mesh.node(i);
    z[static_cast<std::size_t>(i)] = R * (x - c) + c - x;
  }
  return z;
}

NodalField make_deadload_target(const StructuredMesh &mesh, const ElasticMaterial &material,
                                double magnitude, double noise, std::uint64_t seed) {
  const NodalField zero(static_cast<std::size_t>(mesh.num_nodes()), Vec2::Zero());
  const AssembledSystem sys = assemble(mesh, material, zero);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(sys.A.rows());
  const double hx = mesh.width() / (mesh.nx() - 1);
  const int top = (mesh.ny() - 1) * mesh.nx();
  for (int ix = 0; ix + 1 < mesh.nx(); ++ix)
    for (int e : {top + ix, top + ix + 1}) f(2 * mesh.free_index(e)) += -magnitude * 0.5 * hx;
  NodalField z = extend_field(mesh, StateSolver(sys).solve_rhs(f));
  if (noise > 0.0) {
    double zmax = 0.0;
    for (const auto &v : z) zmax = std::max(zmax, v.norm());
    const double delta = noise * zmax;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-delta, delta);
    for (auto &v : z) {
      v.x() += dist(rng);
      v.y() += dist(rng);
    }
  }
  return z;
}

void write_field_csv(const std::filesystem::path &path, const StructuredMesh &mesh,
                     const std::vector<const NodalField *> &fields,
                     const std::vector<std::string> &names) {
  std::vector<std::string> header{"x", "y"};
  for (const auto &n : names) {
    header.push_back(n + "_1");
    header.push_back(n + "_2");
  }
  CsvWriter csv(header);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 x = mesh.node(i);
    csv.cell(x.x()).cell(x.y());
    for (const auto *f : fields) {
      const Vec2 &v = (*f)[static_cast<std::size_t>(i)];
      csv.cell(v.x()).cell(v.y());
    }
    csv.end_row();
  }
  csv.save(path);
}

void write_mesh_csv(const std::filesystem::path &vertices, const std::filesystem::path &triangles,
                    const StructuredMesh &mesh) {
  CsvWriter v({"index", "x", "y", "dirichlet"});
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 x = mesh.node(i);
    v.cell(i).cell(x.x()).cell(x.y()).cell(mesh.is_dirichlet(i) ? 1 : 0);
    v.end_row();
  }
  v.save(vertices);
  CsvWriter t({"a", "b", "c"});
  for (const auto &tri : mesh.triangles()) {
    t.cell(tri[0]).cell(tri[1]).cell(tri[2]);
    t.end_row();
  }
  t.save(triangles);
}

} // namespace multibang
