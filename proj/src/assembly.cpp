// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/assembly.hpp"

#include <algorithm>
#include <stdexcept>

namespace rbocp {

ComponentSpec ComponentSpec::mass(std::vector<int> tags) {
  ComponentSpec s;
  s.kind = ComponentKind::Mass;
  s.tags = std::move(tags);
  return s;
}

ComponentSpec ComponentSpec::diffusion_full(std::vector<int> tags) {
  ComponentSpec s;
  s.kind = ComponentKind::Diffusion;
  s.tags = std::move(tags);
  return s;
}

ComponentSpec ComponentSpec::diffusion_matrix(const Eigen::Matrix2d& d, std::vector<int> tags) {
  ComponentSpec s;
  s.kind = ComponentKind::Diffusion;
  s.diffusion = d;
  s.tags = std::move(tags);
  return s;
}

ComponentSpec ComponentSpec::convection(std::function<Eigen::Vector2d(const Eigen::Vector2d&)> beta,
                                        int degree, std::vector<int> tags) {
  ComponentSpec s;
  s.kind = ComponentKind::Convection;
  s.velocity = std::move(beta);
  s.velocity_degree = degree;
  s.tags = std::move(tags);
  return s;
}

Eigen::Matrix<double, 3, 2> p1_gradients(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                         const Eigen::Vector2d& c) {
  const double det = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  Eigen::Matrix<double, 3, 2> g;
  g.row(0) << b.y() - c.y(), c.x() - b.x();
  g.row(1) << c.y() - a.y(), a.x() - c.x();
  g.row(2) << a.y() - b.y(), b.x() - a.x();
  return g / det;
}

const TriQuadRule& tri_quadrature(int degree) {
  // Midpoint rule (exact for quadratics).
  static const TriQuadRule deg2 = [] {
    TriQuadRule r;
    r.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
    r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return r;
  }();
  // Six-point rule, exact for quartics; positive weights.
  static const TriQuadRule deg4 = [] {
    TriQuadRule r;
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    r.points = {{1 - 2 * a1, a1, a1}, {a1, 1 - 2 * a1, a1}, {a1, a1, 1 - 2 * a1},
                {1 - 2 * a2, a2, a2}, {a2, 1 - 2 * a2, a2}, {a2, a2, 1 - 2 * a2}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }();
  if (degree <= 2) return deg2;
  if (degree <= 4) return deg4;
  throw std::invalid_argument("tri_quadrature: degree > 4 not tabulated");
}

namespace {

bool tag_selected(const std::vector<int>& tags, int tag) {
  return tags.empty() || std::find(tags.begin(), tags.end(), tag) != tags.end();
}

}  // namespace

SparseOperator assemble_component(const Mesh& mesh, const ComponentSpec& spec) {
  for (int tag : spec.tags) {
    if (!mesh.has_tag(tag))
      throw std::invalid_argument("assemble_component: tag " + std::to_string(tag) +
                                  " absent from mesh");
  }
  if (spec.kind == ComponentKind::Convection && !spec.velocity)
    throw std::invalid_argument("assemble_component: convection requires a velocity field");

  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(9 * mesh.n_triangles()));

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.tris[t];
    if (!tag_selected(spec.tags, tri.tag)) continue;
    const Eigen::Vector2d& va = mesh.vertices[tri.v[0]];
    const Eigen::Vector2d& vb = mesh.vertices[tri.v[1]];
    const Eigen::Vector2d& vc = mesh.vertices[tri.v[2]];
    const double area = mesh.area(t);

    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    switch (spec.kind) {
      case ComponentKind::Mass:
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) local(i, j) = area / 12.0 * (i == j ? 2.0 : 1.0);
        break;
      case ComponentKind::Diffusion: {
        const Eigen::Matrix<double, 3, 2> g = p1_gradients(va, vb, vc);
        local = area * g * spec.diffusion * g.transpose();
        break;
      }
      case ComponentKind::Convection: {
        // Integrand (beta . grad phi_j) phi_i has degree velocity_degree + 1.
        const TriQuadRule& rule = tri_quadrature(spec.velocity_degree + 1);
        const Eigen::Matrix<double, 3, 2> g = p1_gradients(va, vb, vc);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
          const Eigen::Vector3d& l = rule.points[q];
          const Eigen::Vector2d x = l[0] * va + l[1] * vb + l[2] * vc;
          const Eigen::Vector2d beta = spec.velocity(x);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              local(i, j) += area * rule.weights[q] * (beta.dot(g.row(j))) * l[i];
        }
        break;
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trips.emplace_back(tri.v[i], tri.v[j], local(i, j));
  }
  const bool symmetric = spec.kind != ComponentKind::Convection;
  return SparseOperator::from_triplets(n, n, trips, symmetric);
}

}  // namespace rbocp
