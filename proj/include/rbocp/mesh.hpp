// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_MESH_HPP
#define RBOCP_MESH_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace rbocp {

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
};

struct Triangle {
  std::array<int, 3> v;
  int tag = 0;
};

struct BoundaryEdge {
  int a = 0, b = 0;
  int tag = 0;
};

// Uniform criss-cross triangulation of an axis-aligned rectangle union.
// Subdomain interfaces always coincide with element edges (grid lines).
struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<Triangle> tris;
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(tris.size()); }

  double signed_area(int t) const {
    const auto& tr = tris[t];
    const Eigen::Vector2d e1 = vertices[tr.v[1]] - vertices[tr.v[0]];
    const Eigen::Vector2d e2 = vertices[tr.v[2]] - vertices[tr.v[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }
  double area(int t) const { return std::abs(signed_area(t)); }
  Eigen::Vector2d centroid(int t) const {
    const auto& tr = tris[t];
    return (vertices[tr.v[0]] + vertices[tr.v[1]] + vertices[tr.v[2]]) / 3.0;
  }
  double total_area() const;
  bool has_tag(int tag) const;
  std::vector<int> subdomain_tags() const;
};

// Split lines must coincide with grid lines of the nx-by-ny lattice; a line
// that is not representable is rejected with a diagnostic.
struct SplitLines {
  std::vector<double> xs;
  std::vector<double> ys;
};

using SubdomainRule = std::function<int(const Eigen::Vector2d&)>;  // centroid -> tag
using BoundaryRule = std::function<int(const Eigen::Vector2d&)>;   // edge midpoint -> tag

Mesh build_rect_mesh(const Rect& rect, int nx, int ny, const SplitLines& splits,
                     const SubdomainRule& subdomain_rule, const BoundaryRule& boundary_rule);

// Index translation between the full vertex set and the free (unconstrained)
// degrees of freedom after Dirichlet elimination.
struct DofMap {
  std::vector<int> full_to_free;  // -1 where constrained
  std::vector<int> free_to_full;

  int n_full() const { return static_cast<int>(full_to_free.size()); }
  int n_free() const { return static_cast<int>(free_to_full.size()); }

  Eigen::VectorXd lift(const Eigen::VectorXd& free) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n_full());
    for (int i = 0; i < n_free(); ++i) full[free_to_full[i]] = free[i];
    return full;
  }
  Eigen::VectorXd restrict_vec(const Eigen::VectorXd& full) const {
    Eigen::VectorXd free(n_free());
    for (int i = 0; i < n_free(); ++i) free[i] = full[free_to_full[i]];
    return free;
  }
};

DofMap make_dof_map(int n_full, const std::vector<int>& constrained);

// Vertices lying on any boundary edge whose tag is in `dirichlet_tags`.
std::vector<int> dirichlet_vertices(const Mesh& mesh, const std::vector<int>& dirichlet_tags);

}  // namespace rbocp

#endif  // RBOCP_MESH_HPP
