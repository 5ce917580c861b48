// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rbocp {

double Mesh::total_area() const {
  double sum = 0.0;
  for (int t = 0; t < n_triangles(); ++t) sum += area(t);
  return sum;
}

bool Mesh::has_tag(int tag) const {
  return std::any_of(tris.begin(), tris.end(), [tag](const Triangle& t) { return t.tag == tag; });
}

std::vector<int> Mesh::subdomain_tags() const {
  std::set<int> tags;
  for (const auto& t : tris) tags.insert(t.tag);
  return {tags.begin(), tags.end()};
}

namespace {

void check_split_lines(const std::vector<double>& lines, double lo, double hi, int n,
                       const char* axis) {
  const double step = (hi - lo) / n;
  for (double s : lines) {
    if (s <= lo || s >= hi) {
      std::ostringstream msg;
      msg << "split line " << axis << " = " << s << " lies outside (" << lo << ", " << hi << ")";
      throw std::invalid_argument(msg.str());
    }
    const double k = (s - lo) / step;
    if (std::abs(k - std::round(k)) > 1e-9) {
      std::ostringstream msg;
      msg << "split line " << axis << " = " << s << " does not coincide with a grid line (step "
          << step << "); choose a divisor grid";
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

Mesh build_rect_mesh(const Rect& rect, int nx, int ny, const SplitLines& splits,
                     const SubdomainRule& subdomain_rule, const BoundaryRule& boundary_rule) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: nx, ny must be >= 1");
  check_split_lines(splits.xs, rect.x0, rect.x1, nx, "x");
  check_split_lines(splits.ys, rect.y0, rect.y1, ny, "y");

  Mesh mesh;
  const double dx = rect.width() / nx;
  const double dy = rect.height() / ny;
  mesh.h = std::max(dx, dy);

  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(rect.x0 + i * dx, rect.y0 + j * dy);

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

  mesh.tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.tris.push_back({{v00, v10, v11}, 0});
      mesh.tris.push_back({{v00, v11, v01}, 0});
    }
  }
  for (auto& t : mesh.tris) {
    const Eigen::Vector2d c =
        (mesh.vertices[t.v[0]] + mesh.vertices[t.v[1]] + mesh.vertices[t.v[2]]) / 3.0;
    t.tag = subdomain_rule ? subdomain_rule(c) : 1;
  }

  auto add_edge = [&](int a, int b) {
    const Eigen::Vector2d mid = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    mesh.boundary_edges.push_back({a, b, boundary_rule ? boundary_rule(mid) : 1});
  };
  for (int i = 0; i < nx; ++i) {
    add_edge(vid(i, 0), vid(i + 1, 0));
    add_edge(vid(i, ny), vid(i + 1, ny));
  }
  for (int j = 0; j < ny; ++j) {
    add_edge(vid(0, j), vid(0, j + 1));
    add_edge(vid(nx, j), vid(nx, j + 1));
  }
  return mesh;
}

DofMap make_dof_map(int n_full, const std::vector<int>& constrained) {
  DofMap map;
  map.full_to_free.assign(static_cast<std::size_t>(n_full), 0);
  for (int d : constrained) {
    if (d < 0 || d >= n_full) throw std::out_of_range("make_dof_map: dof index out of range");
    map.full_to_free[static_cast<std::size_t>(d)] = -1;
  }
  for (int i = 0; i < n_full; ++i) {
    if (map.full_to_free[static_cast<std::size_t>(i)] == 0) {
      map.full_to_free[static_cast<std::size_t>(i)] = static_cast<int>(map.free_to_full.size());
      map.free_to_full.push_back(i);
    }
  }
  return map;
}

std::vector<int> dirichlet_vertices(const Mesh& mesh, const std::vector<int>& dirichlet_tags) {
  std::set<int> verts;
  for (const auto& e : mesh.boundary_edges) {
    if (std::find(dirichlet_tags.begin(), dirichlet_tags.end(), e.tag) != dirichlet_tags.end()) {
      verts.insert(e.a);
      verts.insert(e.b);
    }
  }
  return {verts.begin(), verts.end()};
}

}  // namespace rbocp
