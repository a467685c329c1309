#pragma once

// Oracle and property suites shared by the `verify` command and the tests.

#include "multibang/bloch.hpp"
#include "multibang/elasticity.hpp"
#include "multibang/penalty.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace multibang {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double threshold = 0.0;
  std::string detail;
};

std::string format_suite(const SuiteResult &r);

/// Max deviation of the closed-form prox from prox_oracle at uniform samples
/// in [-box, box]^2.
SuiteResult verify_prox_sweep(const Penalty &penalty, double gamma, int samples, double box,
                              std::uint64_t seed, double tol = 1e-6);

/// Max deviation of h_gamma from (q - prox(q)) / gamma.
SuiteResult verify_my_identity(const Penalty &penalty, double gamma, int samples, double box,
                               std::uint64_t seed, double tol = 1e-10);

/// Central differences (step 1e-7) of h_gamma against the Newton derivative
/// at `samples` points whose label is constant on a 1e-5 neighbourhood.
SuiteResult verify_newton_derivative(const Penalty &penalty, double gamma, int samples,
                                     double box, std::uint64_t seed, double tol = 1e-5);

/// Relative directional-derivative error of the reduced gradient against
/// central differences with step eps, over random (u, phi).
SuiteResult verify_bloch_gradient(const BlochProblem &problem, int directions,
                                  std::uint64_t seed, double eps = 1e-5, double tol = 1e-6);

/// Same problem on N = 3 intervals: the gradient is compared against a
/// Richardson-extrapolated difference quotient, so agreement to roundoff
/// certifies that it is the exact derivative of the discrete objective.
SuiteResult verify_bloch_discrete_adjoint(BlochProblem problem, std::uint64_t seed,
                                          double tol = 1e-10);

/// Dense reference for M, L, K on a structured mesh, from explicit shape
/// functions and an edge-midpoint quadrature, over all nodes.
struct DenseAssembly {
  Eigen::MatrixXd M, L, K;
};
DenseAssembly dense_assembly_oracle(const StructuredMesh &mesh);

/// Compares assemble() with the dense oracle on the 2x2-cell mesh.
SuiteResult verify_assembly_oracle(const ElasticMaterial &material, double tol = 1e-12);

} // namespace multibang
