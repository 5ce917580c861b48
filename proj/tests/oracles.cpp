// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace rbocp::testing {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr double kGx5[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                            0.9061798459386640};
constexpr double kGw5[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                            0.4786286704993665, 0.2369268850561891};

double eval_affine(const Eigen::Vector3d& c, const Eigen::Vector2d& x) {
  return c[0] + c[1] * x.x() + c[2] * x.y();
}

}  // namespace

Eigen::Vector3d affine_from_vertex_values(const std::array<Eigen::Vector2d, 3>& tri,
                                          const std::array<double, 3>& vals) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) m.row(i) << 1.0, tri[static_cast<std::size_t>(i)].x(),
      tri[static_cast<std::size_t>(i)].y();
  return m.fullPivLu().solve(Eigen::Vector3d(vals[0], vals[1], vals[2]));
}

Eigen::Vector3d bary_of(const std::array<Eigen::Vector2d, 3>& tri, const Eigen::Vector2d& x) {
  Eigen::Matrix2d m;
  m.col(0) = tri[0] - tri[2];
  m.col(1) = tri[1] - tri[2];
  const Eigen::Vector2d l12 = m.fullPivLu().solve(x - tri[2]);
  return Eigen::Vector3d(l12[0], l12[1], 1.0 - l12[0] - l12[1]);
}

double slicing_integrate(const std::array<Eigen::Vector2d, 3>& tri, const PointFn& f,
                         const std::vector<Eigen::Vector3d>& kinks) {
  Eigen::Vector2d e(1.0, 0.0);
  for (const Eigen::Vector3d& k : kinks) {
    const Eigen::Vector2d g(k[1], k[2]);
    if (g.norm() > 1e-14) {
      e = g.normalized();
      break;
    }
  }
  const Eigen::Vector2d en(-e.y(), e.x());
  const double diam = std::max({(tri[0] - tri[1]).norm(), (tri[1] - tri[2]).norm(),
                                (tri[2] - tri[0]).norm()});

  std::vector<double> breaks;
  for (const auto& v : tri) breaks.push_back(e.dot(v));
  for (const Eigen::Vector3d& k : kinks) {
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d& a = tri[static_cast<std::size_t>(i)];
      const Eigen::Vector2d& b = tri[static_cast<std::size_t>((i + 1) % 3)];
      const double da = eval_affine(k, a), db = eval_affine(k, b);
      if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
        const double t = da / (da - db);
        breaks.push_back(e.dot(a + t * (b - a)));
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());

  double total = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double xa = breaks[s], xb = breaks[s + 1];
    if (xb - xa < 1e-14 * diam) continue;
    const double mid = 0.5 * (xa + xb), half = 0.5 * (xb - xa);
    for (int gx = 0; gx < 5; ++gx) {
      const double xi = mid + half * kGx5[gx];
      const double wx = half * kGw5[gx];

      // Cross-section of the triangle along xi.
      std::vector<double> etas;
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d& a = tri[static_cast<std::size_t>(i)];
        const Eigen::Vector2d& b = tri[static_cast<std::size_t>((i + 1) % 3)];
        const double fa = e.dot(a) - xi, fb = e.dot(b) - xi;
        if ((fa > 0 && fb < 0) || (fa < 0 && fb > 0)) {
          const double t = fa / (fa - fb);
          etas.push_back(en.dot(a + t * (b - a)));
        }
      }
      if (etas.size() < 2) continue;
      const double lo = *std::min_element(etas.begin(), etas.end());
      const double hi = *std::max_element(etas.begin(), etas.end());
      if (hi - lo < 1e-15 * diam) continue;

      std::vector<double> cuts{lo, hi};
      for (const Eigen::Vector3d& k : kinks) {
        const Eigen::Vector2d g(k[1], k[2]);
        const double b_eta = g.dot(en);
        if (std::abs(b_eta) < 1e-14) continue;  // kink parallel to the slices
        const double a_xi = k[0] + g.dot(e) * xi;
        const double root = -a_xi / b_eta;
        if (root > lo && root < hi) cuts.push_back(root);
      }
      std::sort(cuts.begin(), cuts.end());

      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double m2 = 0.5 * (cuts[c] + cuts[c + 1]);
        const double h2 = 0.5 * (cuts[c + 1] - cuts[c]);
        if (h2 <= 0.0) continue;
        for (int ge = 0; ge < 5; ++ge) {
          const double eta = m2 + h2 * kGx5[ge];
          const Eigen::Vector2d x = e * xi + en * eta;
          total += wx * h2 * kGw5[ge] * f(x);
        }
      }
    }
  }
  return total;
}

Eigen::MatrixXd direct_state_form(const ParametricOCP& ocp, const Mu& mu) {
  const Mesh& mesh = ocp.mesh;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(mesh.n_vertices(), mesh.n_vertices());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.tris[static_cast<std::size_t>(t)];
    const Eigen::Vector2d& va = mesh.vertices[tri.v[0]];
    const Eigen::Vector2d& vb = mesh.vertices[tri.v[1]];
    const Eigen::Vector2d& vc = mesh.vertices[tri.v[2]];
    const double area = mesh.area(t);
    const Eigen::Matrix<double, 3, 2> g = p1_gradients(va, vb, vc);

    Eigen::Matrix2d diff;
    double conv_weight = 0.0;
    if (ocp.name == "thermal-block") {
      diff = (tri.tag == 1 ? mu[0] : 1.0) * Eigen::Matrix2d::Identity();
    } else {
      diff = Eigen::Matrix2d::Zero();
      if (tri.tag <= 2) {
        diff(0, 0) = 1.0 / (mu[0] * mu[1]);
        diff(1, 1) = mu[1] / mu[0];
      } else {
        diff = (1.0 / mu[0]) * Eigen::Matrix2d::Identity();
      }
      conv_weight = 1.0;
    }
    Eigen::Matrix3d local = area * g * diff * g.transpose();
    if (conv_weight != 0.0) {
      const TriQuadRule& rule = tri_quadrature(4);
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Eigen::Vector3d& l = rule.points[q];
        const Eigen::Vector2d x = l[0] * va + l[1] * vb + l[2] * vc;
        const Eigen::Vector2d beta(x.y() * (1.0 - x.y()), 0.0);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            local(i, j) += conv_weight * area * rule.weights[q] * beta.dot(g.row(j)) * l[i];
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        a(tri.v[static_cast<std::size_t>(i)], tri.v[static_cast<std::size_t>(j)]) += local(i, j);
  }
  const int nf = ocp.n_free();
  Eigen::MatrixXd af(nf, nf);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j)
      af(i, j) = a(ocp.dofs.free_to_full[static_cast<std::size_t>(i)],
                   ocp.dofs.free_to_full[static_cast<std::size_t>(j)]);
  return af;
}

double duffy_integrate(const std::array<Eigen::Vector2d, 3>& tri, const PointFn& f) {
  // Map the unit square onto the triangle via (u, v) -> (u, v (1 - u)) in
  // barycentric coordinates; 8x8 Gauss per axis.
  constexpr int kN = 8;
  constexpr double kGx8[kN] = {-0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975362};
  constexpr double kGw8[kN] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const double area2 = std::abs((tri[1] - tri[0]).x() * (tri[2] - tri[0]).y() -
                                (tri[1] - tri[0]).y() * (tri[2] - tri[0]).x());
  double total = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double u = 0.5 * (kGx8[i] + 1.0);
    for (int j = 0; j < kN; ++j) {
      const double v = 0.5 * (kGx8[j] + 1.0);
      const double l1 = u, l2 = v * (1.0 - u);
      const Eigen::Vector2d x = l1 * tri[0] + l2 * tri[1] + (1.0 - l1 - l2) * tri[2];
      total += 0.25 * kGw8[i] * kGw8[j] * (1.0 - u) * area2 * f(x);
    }
  }
  return total;
}

}  // namespace rbocp::testing
