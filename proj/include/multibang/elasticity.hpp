#pragma once

// P1 vector finite elements for linearized elasticity on the clamped
// rectangle [0, width] x [0, height], fixed at y = 0.

#include "multibang/penalty.hpp"
#include "multibang/types.hpp"

#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace multibang {

struct ElasticMaterial {
  double E = 20.0;
  double nu = 0.3;

  ElasticMaterial() = default;
  ElasticMaterial(double E_, double nu_);
  double mu() const { return E / (2.0 * (1.0 + nu)); }
  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
};

/// Uniform grid of nx x ny vertices. Node (ix, iy) has index iy * nx + ix;
/// each cell is cut along its bottom-left to top-right diagonal.
class StructuredMesh {
public:
  StructuredMesh(int nx, int ny, double width = 1.0, double height = 2.0);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_nodes() const { return nx_ * ny_; }
  double width() const { return width_; }
  double height() const { return height_; }
  Vec2 node(int i) const;
  const std::vector<std::array<int, 3>> &triangles() const { return triangles_; }
  bool is_dirichlet(int i) const { return i < nx_; }
  /// Position among the free nodes, or -1 on the clamped edge.
  int free_index(int i) const { return is_dirichlet(i) ? -1 : i - nx_; }
  int num_free() const { return num_nodes() - nx_; }
  std::vector<int> dirichlet_nodes() const;

private:
  int nx_, ny_;
  double width_, height_;
  std::vector<std::array<int, 3>> triangles_;
};

/// One 2-vector per mesh node. Fields that live in the constrained space
/// (y, p) are zero on the clamped edge.
using NodalField = std::vector<Vec2>;

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Matrices over the free degrees of freedom, interleaved as
/// 2 * free_index + component.
struct AssembledSystem {
  SparseMatrix M;
  SparseMatrix L;
  SparseMatrix K;
  SparseMatrix A;
  Eigen::VectorXd Z;
  /// Row sums of M, used when the control coupling is lumped.
  Eigen::VectorXd lumped;
  int num_free_nodes = 0;
};

AssembledSystem assemble(const StructuredMesh &mesh, const ElasticMaterial &material,
                         const NodalField &z);

/// Free-dof vector <-> nodal field.
Eigen::VectorXd restrict_field(const StructuredMesh &mesh, const NodalField &f);
NodalField extend_field(const StructuredMesh &mesh, const Eigen::VectorXd &v);

/// Cached factorization of A for repeated state solves.
class StateSolver {
public:
  explicit StateSolver(const AssembledSystem &system);
  /// Solves A y = rhs.
  Eigen::VectorXd solve_rhs(const Eigen::VectorXd &rhs) const;
  /// Solves A y = M load (load given on free dofs).
  Eigen::VectorXd solve(const Eigen::VectorXd &load) const;

private:
  const AssembledSystem &system_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

Eigen::VectorXd solve_state(const AssembledSystem &system, const Eigen::VectorXd &load);

/// Options of the discrete optimality system.
struct ElasticityCoupling {
  /// Use diag(row sums of M) instead of M in the control term of the
  /// second block. The system is then exactly the optimality system of a
  /// discrete energy.
  bool lumped_control_mass = false;
};

struct SaddleResidual {
  Eigen::VectorXd r1;
  Eigen::VectorXd r2;
  double norm() const;
};

/// Nodewise evaluation of the penalty at the free nodes of p.
struct NodalPenalty {
  std::vector<Vec2> values;
  std::vector<Mat2> derivatives;
  std::vector<int> labels;
  std::vector<std::uint8_t> multibang;
};

NodalPenalty evaluate_penalty(const Eigen::VectorXd &p, const Penalty &penalty, double gamma);

SaddleResidual residual(const AssembledSystem &system, const Eigen::VectorXd &y,
                        const Eigen::VectorXd &p, const NodalPenalty &hp,
                        const ElasticityCoupling &coupling = {});

/// Sparse LU of the Newton matrix [[M, A^T], [A, -M D]] with the symbolic
/// analysis reused between calls.
class SaddleNewtonSolver {
public:
  SaddleNewtonSolver(const AssembledSystem &system, ElasticityCoupling coupling = {});
  ~SaddleNewtonSolver();
  SaddleNewtonSolver(const SaddleNewtonSolver &) = delete;
  SaddleNewtonSolver &operator=(const SaddleNewtonSolver &) = delete;

  /// Returns false when the factorization fails or the relative residual
  /// of the solve stays above 1e-6 after up to three refinement steps.
  /// On success dy, dp solve J (dy, dp) = -(r1, r2).
  bool step(const NodalPenalty &hp, const SaddleResidual &res, Eigen::VectorXd &dy,
            Eigen::VectorXd &dp);
  /// Newton matrix of the last step().
  const SparseMatrix &matrix() const { return jac_; }
  const char *backend() const;
  double last_relative_residual() const { return last_relative_residual_; }

private:
  void fill(const NodalPenalty &hp);

  const AssembledSystem &system_;
  ElasticityCoupling coupling_;
  SparseMatrix jac_;
  double last_relative_residual_ = 0.0;
  // Lower-right block entries -m_ij D_j, one record per node pair (i, j).
  struct Slot {
    std::array<Eigen::Index, 4> k;
    int node;
    double m;
  };
  std::vector<Slot> slots_;
  struct Impl;
  Impl *impl_;
};

/// Rotation about the center c = (width/2, height/2): z = R(x - c) + c - x.
NodalField make_rotation_target(const StructuredMesh &mesh, double angle);
/// Displacement under the traction (-magnitude, 0) on the top edge, plus
/// uniform nodal noise in [-delta, delta] with delta = noise * max |z|.
NodalField make_deadload_target(const StructuredMesh &mesh, const ElasticMaterial &material,
                                double magnitude, double noise = 0.0,
                                std::uint64_t seed = 0);

/// Columns x, y, and one column per name.
void write_field_csv(const std::filesystem::path &path, const StructuredMesh &mesh,
                     const std::vector<const NodalField *> &fields,
                     const std::vector<std::string> &names);
void write_mesh_csv(const std::filesystem::path &vertices,
                    const std::filesystem::path &triangles, const StructuredMesh &mesh);

} // namespace multibang
