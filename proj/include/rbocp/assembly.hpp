// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_ASSEMBLY_HPP
#define RBOCP_ASSEMBLY_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rbocp/mesh.hpp"
#include "rbocp/sparse.hpp"

namespace rbocp {

enum class ComponentKind { Diffusion, Convection, Mass };

// Descriptor of a parameter-independent form component. All integrals are
// exact for P1 trial/test pairs; the velocity field is integrated with a
// quadrature rule exact for (velocity_degree + 1).
struct ComponentSpec {
  ComponentKind kind = ComponentKind::Mass;
  std::vector<int> tags;  // empty = whole mesh
  Eigen::Matrix2d diffusion = Eigen::Matrix2d::Identity();
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> velocity;
  int velocity_degree = 2;

  static ComponentSpec mass(std::vector<int> tags = {});
  static ComponentSpec diffusion_full(std::vector<int> tags = {});
  static ComponentSpec diffusion_matrix(const Eigen::Matrix2d& d, std::vector<int> tags = {});
  static ComponentSpec convection(std::function<Eigen::Vector2d(const Eigen::Vector2d&)> beta,
                                  int degree, std::vector<int> tags = {});
};

// Assembles one component on the full vertex space; boundary conditions are
// applied separately.
SparseOperator assemble_component(const Mesh& mesh, const ComponentSpec& spec);

// P1 gradient coefficients on a triangle: grad(lambda_i) rows.
Eigen::Matrix<double, 3, 2> p1_gradients(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                         const Eigen::Vector2d& c);

// Symmetric triangle quadrature, exact for polynomials up to `degree`
// (supported degrees: 2 and 4). Points in barycentric coordinates, weights
// sum to one.
struct TriQuadRule {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
};
const TriQuadRule& tri_quadrature(int degree);

}  // namespace rbocp

#endif  // RBOCP_ASSEMBLY_HPP
