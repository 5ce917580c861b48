// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_ESTIMATOR_HPP
#define RBOCP_ESTIMATOR_HPP

#include <optional>

#include "rbocp/problems.hpp"
#include "rbocp/solver.hpp"

namespace rbocp {

// Dual norms of the state and adjoint residuals of a reduced solution,
// together with the dual norms of the corresponding right-hand sides (the
// natural scales for reproduction checks).
struct Residuals {
  double r_y_norm = 0.0;
  double r_p_norm = 0.0;
  double rhs_y_norm = 0.0;
  double rhs_p_norm = 0.0;
};

Residuals compute_residuals(const ParametricOCP& ocp, const Mu& mu, const ReducedSolution& sol);

struct EstimatorReport {
  Residuals residuals;
  StabilityConstants constants;
  double c1 = 0.0, c2 = 0.0;
  std::optional<double> c3, c4;
  double delta_u = 0.0;
  double delta_uyp = 0.0;
  std::optional<double> delta_lower;  // exact-constants mode only
  double relative_bound = 0.0;        // 2 delta_u / ||u_N||_U
  bool relative_valid = false;        // ||u_N|| > 0
  bool proviso_ok = false;            // relative_bound <= 1
};

// Error estimators from the residual dual norms:
//   delta_u   = ||r_y||/(rho1 sqrt(alpha) beta) + kappa ||r_p||/(alpha beta)
//   delta_uyp = c1 ||r_y|| + c2 ||r_p||,  delta_lower = c3 ||r_y|| + c4 ||r_p||.
// The lower bound needs gamma and is only produced with exact constants.
EstimatorReport estimate_core(const Residuals& res, double norm_u_n,
                              const StabilityConstants& constants, double rho1, double alpha);

EstimatorReport estimate(const ParametricOCP& ocp, const Mu& mu, const Residuals& res,
                         double norm_u_n, const StabilityConstants& constants);

}  // namespace rbocp

#endif  // RBOCP_ESTIMATOR_HPP
