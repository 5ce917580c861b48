// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_PROBLEMS_HPP
#define RBOCP_PROBLEMS_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbocp/assembly.hpp"
#include "rbocp/mesh.hpp"
#include "rbocp/sparse.hpp"

namespace rbocp {

// Parameter point; 1 or 2 components depending on the problem.
using Mu = std::vector<double>;

using Theta = std::function<double(const Mu&)>;

// Parameter-separable operator: sum_q theta_q(mu) * component_q.
struct AffineOperator {
  std::vector<SparseOperator> components;
  std::vector<Theta> thetas;

  SparseOperator at(const Mu& mu) const;
  bool all_symmetric() const;
  std::size_t size() const { return components.size(); }
};

struct AffineVector {
  std::vector<Eigen::VectorXd> components;
  std::vector<Theta> thetas;
  Eigen::Index dim = 0;

  Eigen::VectorXd at(const Mu& mu) const;
};

// Lower control bound u_a(x) = a0 + a1 x1 + a2 x2; no upper bound.
struct AdmissibleSet {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double lower_at(const Eigen::Vector2d& x) const { return a0 + a1 * x.x() + a2 * x.y(); }
};

// Bounds documented for reference; no computation consumes them.
struct DocumentedBounds {
  double beta0 = 0.0, gamma0 = 0.0, kappa0 = 0.0, sigma0 = 0.0;
};

struct OutOfParameterBox : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Affine-parametric optimal control problem on a fixed mesh. Immutable after
// construction; shared freely across threads.
struct ParametricOCP {
  std::string name;
  Mesh mesh;
  DofMap dofs;

  int param_dim = 1;
  std::vector<std::pair<double, double>> box;

  AffineOperator a;       // state form, free x free
  AffineOperator b;       // control pairing, free x full
  AffineVector f;         // load, free
  AffineOperator obs;     // observation mass M0, free x free
  AffineVector z_load;    // v -> (z, v)_{L2(Omega0)}, lifting shift included
  AffineOperator u_gram;  // M_U, full x full
  std::shared_ptr<GramMatrix> y_gram;

  double alpha = 1e-2;
  AdmissibleSet bound;
  double rho1 = 1.0, rho2 = 1.0;
  std::function<double(const Mu&)> beta_surrogate;
  std::function<double(const Mu&)> kappa_surrogate;

  // Per-subdomain densities of the b-form and the U-inner product at mu.
  std::function<double(const Mu&, int)> b_weight;
  std::function<double(const Mu&, int)> u_weight;

  DocumentedBounds documented;
  std::vector<int> dirichlet_dofs;

  int n_free() const { return dofs.n_free(); }
  int n_full() const { return dofs.n_full(); }
  bool in_box(const Mu& mu) const;
  void require_in_box(const Mu& mu) const;
  StabilityConstants surrogate_constants(const Mu& mu) const;
  Eigen::VectorXd lift(const Eigen::VectorXd& free) const { return dofs.lift(free); }

  // M_U(mu) restricted to free dofs (used for adjoint-increment norms).
  SparseOperator u_gram_free(const Mu& mu) const;
};

struct EvaluatedForms {
  SparseOperator a;    // A(mu)
  SparseOperator b;    // B(mu)
  Eigen::VectorXd f;   // f(mu)
  SparseOperator m_u;  // M_U(mu)
};

EvaluatedForms evaluate_forms(const ParametricOCP& ocp, const Mu& mu);

// Benchmark: two-material diffusion on the unit square, distributed control,
// parameter = conductivity of the left half. nx must be even so the material
// interface x1 = 0.5 is a grid line.
ParametricOCP thermal_block(int nx, int ny, double alpha = 1e-2);

// Benchmark: convection-diffusion in a channel on the reference domain
// (0,2.5)x(0,1) with an affine geometry map (interface at x1 = 1), Dirichlet
// inlet/walls, Neumann outflow. The grid must resolve
// x1 in {0.2, 0.8, 1, 1.2} and x2 in {0.3, 0.7}.
ParametricOCP graetz_flow(int nx, int ny, double alpha = 1e-2);

// Training/test parameter grids for the two benchmarks.
std::vector<Mu> thermal_train_grid(int n = 100);
std::vector<Mu> thermal_test_grid(int n = 125);
std::vector<Mu> graetz_train_grid(int n1 = 30, int n2 = 30);
std::vector<Mu> graetz_test_grid(int n1 = 10, int n2 = 5);

}  // namespace rbocp

#endif  // RBOCP_PROBLEMS_HPP
