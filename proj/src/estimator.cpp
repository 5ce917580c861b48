// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/estimator.hpp"

#include <cmath>

#include "rbocp/control.hpp"

namespace rbocp {

Residuals compute_residuals(const ParametricOCP& ocp, const Mu& mu, const ReducedSolution& sol) {
  const SparseOperator a = ocp.a.at(mu);
  const Eigen::VectorXd rhs_y = integrate_control(ocp, mu, sol.u) + ocp.f.at(mu);
  const Eigen::VectorXd r_y = rhs_y - a.mat * sol.y_lift;
  const Eigen::VectorXd rhs_p = ocp.obs.at(mu).mat * sol.y_lift - ocp.z_load.at(mu);
  const Eigen::VectorXd r_p = rhs_p - a.mat.transpose() * sol.p_lift;

  Residuals res;
  res.r_y_norm = riesz_dual_norm(*ocp.y_gram, r_y).norm;
  res.r_p_norm = riesz_dual_norm(*ocp.y_gram, r_p).norm;
  res.rhs_y_norm = riesz_dual_norm(*ocp.y_gram, rhs_y).norm;
  res.rhs_p_norm = riesz_dual_norm(*ocp.y_gram, rhs_p).norm;
  return res;
}

EstimatorReport estimate_core(const Residuals& res, double norm_u_n,
                              const StabilityConstants& constants, double rho1, double alpha) {
  if (constants.beta <= 0.0 || constants.kappa <= 0.0)
    throw std::invalid_argument("estimate: constants must be positive");
  const double beta = constants.beta;
  const double kappa = constants.kappa;
  const double sqrt_alpha = std::sqrt(alpha);

  EstimatorReport rep;
  rep.residuals = res;
  rep.constants = constants;

  rep.delta_u = res.r_y_norm / (rho1 * sqrt_alpha * beta) + kappa * res.r_p_norm / (alpha * beta);

  rep.c1 = (1.0 / beta) * (1.0 / (rho1 * sqrt_alpha) +
                           (1.0 + 1.0 / (rho1 * rho1 * beta)) *
                               (kappa / (beta * rho1 * sqrt_alpha) + 1.0));
  rep.c2 = (1.0 / beta) * (kappa / alpha + kappa * kappa / (beta * alpha) +
                           kappa * kappa / (rho1 * rho1 * beta * beta * alpha) + 1.0);
  rep.delta_uyp = rep.c1 * res.r_y_norm + rep.c2 * res.r_p_norm;

  if (constants.provenance == ConstantsProvenance::ExactEigen && std::isfinite(constants.gamma)) {
    const double gamma = constants.gamma;
    rep.c3 = 1.0 / (2.0 * gamma * std::max(kappa / beta, 1.0));
    rep.c4 = 1.0 / (2.0 * gamma * std::max(1.0 / (rho1 * rho1 * beta), 1.0));
    rep.delta_lower = *rep.c3 * res.r_y_norm + *rep.c4 * res.r_p_norm;
  }

  rep.relative_valid = norm_u_n > 0.0;
  if (rep.relative_valid) {
    rep.relative_bound = 2.0 * rep.delta_u / norm_u_n;
    rep.proviso_ok = rep.relative_bound <= 1.0;
  } else {
    rep.relative_bound = std::numeric_limits<double>::infinity();
    rep.proviso_ok = false;
  }
  return rep;
}

EstimatorReport estimate(const ParametricOCP& ocp, const Mu& mu, const Residuals& res,
                         double norm_u_n, const StabilityConstants& constants) {
  ocp.require_in_box(mu);
  return estimate_core(res, norm_u_n, constants, ocp.rho1, ocp.alpha);
}

}  // namespace rbocp
