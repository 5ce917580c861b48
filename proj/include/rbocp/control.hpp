// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_CONTROL_HPP
#define RBOCP_CONTROL_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "rbocp/problems.hpp"

namespace rbocp {

// Affine function on a triangle given by its three vertex values.
struct TriAffine {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  double at(double l1, double l2) const { return v[0] * l1 + v[1] * l2 + v[2] * (1.0 - l1 - l2); }
};

struct BaryPoint {
  double l1 = 0.0, l2 = 0.0;
};

// Convex polygon in barycentric coordinates of its parent triangle.
struct ClipPoly {
  int n = 0;
  std::array<BaryPoint, 8> pts;

  void push(const BaryPoint& p) { pts[static_cast<std::size_t>(n++)] = p; }
  // Area in (l1,l2) coordinates; physical area = 2 * tri_area * this.
  double bary_area() const;
};

// Halfplane clip: keeps {d >= 0} for sign=+1, {d <= 0} for sign=-1.
ClipPoly clip_halfplane(const ClipPoly& poly, const TriAffine& d, int sign);
ClipPoly full_triangle_poly();

// Quadrature over a clip polygon, exact for quadratics in barycentric
// coordinates. f is evaluated at (l1, l2). Sub-triangles with physical area
// below 1e-14 * tri_area are treated as empty.
template <class F>
double integrate_poly(double tri_area, const ClipPoly& poly, F&& f) {
  double sum = 0.0;
  for (int k = 1; k + 1 < poly.n; ++k) {
    const BaryPoint& p0 = poly.pts[0];
    const BaryPoint& p1 = poly.pts[static_cast<std::size_t>(k)];
    const BaryPoint& p2 = poly.pts[static_cast<std::size_t>(k + 1)];
    const double cross = (p1.l1 - p0.l1) * (p2.l2 - p0.l2) - (p1.l2 - p0.l2) * (p2.l1 - p0.l1);
    const double phys_area = tri_area * std::abs(cross);
    if (phys_area < 1e-14 * tri_area) continue;
    const BaryPoint m01{0.5 * (p0.l1 + p1.l1), 0.5 * (p0.l2 + p1.l2)};
    const BaryPoint m12{0.5 * (p1.l1 + p2.l1), 0.5 * (p1.l2 + p2.l2)};
    const BaryPoint m20{0.5 * (p2.l1 + p0.l1), 0.5 * (p2.l2 + p0.l2)};
    sum += phys_area / 3.0 * (f(m01.l1, m01.l2) + f(m12.l1, m12.l2) + f(m20.l1, m20.l2));
  }
  return sum;
}

enum class TriState { Active, Inactive, Split };

// Per-triangle description of the projected control max(u_a, candidate) with
// candidate = -(b_weight/u_weight)/alpha * p. On split triangles the kink
// segment is resolved exactly by clipping.
struct ControlTriangle {
  TriState state = TriState::Inactive;
  TriAffine candidate;
  TriAffine bound;
  ClipPoly inactive_poly;  // candidate >= bound
  ClipPoly active_poly;    // candidate <= bound

  double value(double l1, double l2) const {
    return std::max(bound.at(l1, l2), candidate.at(l1, l2));
  }
};

struct ControlFunction {
  const Mesh* mesh = nullptr;
  std::vector<ControlTriangle> tris;

  double value(int t, double l1, double l2) const { return tris[t].value(l1, l2); }
  double active_measure() const;
};

// Pointwise projection of the scaled adjoint onto the admissible set.
// p_full holds vertex values of the adjoint on the full vertex set.
ControlFunction control_from_adjoint(const ParametricOCP& ocp, const Mu& mu,
                                     const Eigen::VectorXd& p_full);

// Load vector v |-> b(u, v; mu) on free dofs by exact kink-splitting
// quadrature.
Eigen::VectorXd integrate_control(const ParametricOCP& ocp, const Mu& mu,
                                  const ControlFunction& u);

double control_norm(const ParametricOCP& ocp, const Mu& mu, const ControlFunction& u);
double control_error(const ParametricOCP& ocp, const Mu& mu, const ControlFunction& u1,
                     const ControlFunction& u2);

// Inactive-region coupling matrix and active-region load used by the
// primal-dual active set iteration:
//   b_inactive_ij = sum_T (b_weight^2/u_weight) int_{I cap T} phi_j phi_i,
//   g_active_i    = sum_T b_weight int_{A cap T} u_a phi_i.
struct PdasTerms {
  SpMatC b_inactive;        // free x free
  Eigen::VectorXd g_active; // free
};
PdasTerms assemble_pdas_terms(const ParametricOCP& ocp, const Mu& mu, const ControlFunction& u);

}  // namespace rbocp

#endif  // RBOCP_CONTROL_HPP
