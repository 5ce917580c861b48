// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_SOLVER_HPP
#define RBOCP_SOLVER_HPP

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "rbocp/control.hpp"
#include "rbocp/problems.hpp"

namespace rbocp {

struct SolverOptions {
  double newton_tol = 1e-11;  // on (1/alpha) ||p_k - p_{k+1}||_U
  int max_newton_iters = 50;
  double oracle_step = -1.0;  // <= 0 selects 1/alpha
  double oracle_tol = 1e-11;
  int oracle_max_iters = 2000;
  int oracle_subdiv = 96;  // per-triangle control sub-sampling, oracle only
};

struct SolverError : std::runtime_error {
  Mu mu;
  SolverError(const std::string& msg, Mu m) : std::runtime_error(msg), mu(std::move(m)) {}
};

struct OCPSolution {
  Eigen::VectorXd y, p;  // free dofs
  ControlFunction u;
  int iterations = 0;
  double active_measure = 0.0;
  bool converged = false;
  bool final_states_stable = false;  // last two active-set label vectors equal
};

struct ReducedSolution {
  Eigen::VectorXd y_coef, p_coef;
  Eigen::VectorXd y_lift, p_lift;  // free-dof representations
  ControlFunction u;
  int iterations = 0;
  bool converged = false;
};

// Primal-dual active set (semismooth Newton) iteration for the coupled
// optimality system. The kink geometry is frozen per outer iteration;
// stopping rule (1/alpha)||p_k - p_{k+1}||_{U(mu)} <= newton_tol.
OCPSolution solve_full(const ParametricOCP& ocp, const Mu& mu, const SolverOptions& opts = {},
                       const Eigen::VectorXd* p0 = nullptr);

// Same outer loop with state/adjoint sought as coefficients in span(phi);
// the control term is integrated against full FE test functions and then
// projected. phi columns must be Y-orthonormal.
ReducedSolution solve_reduced(const ParametricOCP& ocp, const Eigen::Ref<const Eigen::MatrixXd>& phi,
                              const Mu& mu, const SolverOptions& opts = {},
                              const Eigen::VectorXd* p0_full = nullptr);

// Independent verification oracle: projected gradient on the control-reduced
// functional, control sampled piecewise-affine on a per-triangle subgrid.
// Desk-scale meshes only.
OCPSolution projected_gradient_oracle(const ParametricOCP& ocp, const Mu& mu, double step,
                                      int max_iters, double tol, int subdiv = 32);

}  // namespace rbocp

#endif  // RBOCP_SOLVER_HPP
