// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_TESTS_ORACLES_HPP
#define RBOCP_TESTS_ORACLES_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rbocp/problems.hpp"

namespace rbocp::testing {

using PointFn = std::function<double(const Eigen::Vector2d&)>;

// Exact integration over a triangle of an integrand that is polynomial
// (degree <= 5) away from the zero lines of the given affine kinks
// (coefficients c0 + c1 x + c2 y). Slices the triangle in coordinates
// rotated to the first kink and applies Gauss rules per smooth cell, so the
// route is independent of the clipping-based production quadrature.
double slicing_integrate(const std::array<Eigen::Vector2d, 3>& tri, const PointFn& f,
                         const std::vector<Eigen::Vector3d>& kinks);

// Affine coefficients (c0, c1, c2) of the plane through the vertex values.
Eigen::Vector3d affine_from_vertex_values(const std::array<Eigen::Vector2d, 3>& tri,
                                          const std::array<double, 3>& vals);

// Barycentric coordinates of x with respect to tri.
Eigen::Vector3d bary_of(const std::array<Eigen::Vector2d, 3>& tri, const Eigen::Vector2d& x);

// Duffy-mapped tensor Gauss quadrature (exact through degree ~11); used as a
// dense assembly oracle for smooth integrands.
double duffy_integrate(const std::array<Eigen::Vector2d, 3>& tri, const PointFn& f);

// One-shot dense assembly of the parameter-dependent state form on the free
// dofs; reconstruction oracle independent of the affine bookkeeping.
Eigen::MatrixXd direct_state_form(const ParametricOCP& ocp, const Mu& mu);

}  // namespace rbocp::testing

#endif  // RBOCP_TESTS_ORACLES_HPP
