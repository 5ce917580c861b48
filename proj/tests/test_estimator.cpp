// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rbocp/estimator.hpp"
#include "rbocp/rb.hpp"

using namespace rbocp;

namespace {

RBSpace snapshot_space(const ParametricOCP& ocp, const std::vector<Mu>& mus,
                       const SolverOptions& opts = {}) {
  RBSpace rb;
  for (const Mu& mu : mus) {
    const OCPSolution sol = solve_full(ocp, mu, opts);
    extend_orthonormal(rb, *ocp.y_gram, {sol.y, sol.p});
    rb.sampled.push_back(mu);
    rb.col_offsets.push_back(rb.cols());
  }
  return rb;
}

StabilityConstants exact_at(const ParametricOCP& ocp, const Mu& mu) {
  const EvaluatedForms forms = evaluate_forms(ocp, mu);
  return exact_constants(forms.a, *ocp.y_gram, forms.b, forms.m_u);
}

}  // namespace

TEST_CASE("zero residuals produce zero estimators") {
  StabilityConstants c;
  c.beta = 0.8;
  c.kappa = 0.3;
  c.gamma = 2.0;
  c.provenance = ConstantsProvenance::ExactEigen;
  const EstimatorReport rep = estimate_core(Residuals{0, 0, 1, 1}, 1.0, c, 0.9, 1e-2);
  CHECK(rep.delta_u == 0.0);
  CHECK(rep.delta_uyp == 0.0);
  CHECK(rep.delta_lower.has_value());
  CHECK(*rep.delta_lower == 0.0);
  CHECK(rep.proviso_ok);
}

TEST_CASE("hand-evaluated constants at rho1 = alpha = beta = kappa = gamma = 1") {
  StabilityConstants c;
  c.beta = 1.0;
  c.kappa = 1.0;
  c.gamma = 1.0;
  c.provenance = ConstantsProvenance::ExactEigen;
  const EstimatorReport rep = estimate_core(Residuals{1.0, 1.0, 1, 1}, 1.0, c, 1.0, 1.0);
  CHECK(rep.c1 == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(rep.c2 == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(*rep.c3 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(*rep.c4 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.delta_u == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rep.delta_uyp == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(*rep.delta_lower == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("thermal-block coefficients: second evaluation path") {
  const ParametricOCP ocp = thermal_block(4, 4);
  const Mu mu{0.5};
  const StabilityConstants c = ocp.surrogate_constants(mu);
  const double ry = 0.37, rp = 0.11;
  const EstimatorReport rep = estimate(ocp, mu, Residuals{ry, rp, 1, 1}, 2.0, c);

  const double c_p = 1.0 / (std::sqrt(2.0) * std::numbers::pi);
  const double rho1 = 1.0 / std::sqrt(c_p * c_p + 1.0);
  const double beta = 0.5;
  const double expected = ry / (rho1 * std::sqrt(1e-2) * beta) + c_p * rp / (1e-2 * beta);
  CHECK(rep.delta_u == doctest::Approx(expected).epsilon(1e-14));
  CHECK(rep.relative_bound == doctest::Approx(2.0 * expected / 2.0).epsilon(1e-14));
  // Surrogate mode carries no gamma, so no lower bound.
  CHECK(!rep.delta_lower.has_value());
}

TEST_CASE("estimate rejects nonpositive constants and flags zero control norms") {
  StabilityConstants bad;
  bad.beta = 0.0;
  bad.kappa = 1.0;
  CHECK_THROWS_AS(estimate_core(Residuals{1, 1, 1, 1}, 1.0, bad, 1.0, 1.0),
                  std::invalid_argument);

  StabilityConstants c;
  c.beta = 1.0;
  c.kappa = 1.0;
  const EstimatorReport rep = estimate_core(Residuals{1, 1, 1, 1}, 0.0, c, 1.0, 1.0);
  CHECK(!rep.relative_valid);
  CHECK(!rep.proviso_ok);
  CHECK(std::isinf(rep.relative_bound));
  CHECK(rep.delta_uyp > 0.0);  // absolute estimators still returned
}

TEST_CASE("residuals vanish at the sampled parameter (Galerkin reproduction)") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const Mu mu{0.8};
  const RBSpace rb = snapshot_space(ocp, {mu});
  const ReducedSolution red = solve_reduced(ocp, rb.phi, mu);
  const Residuals res = compute_residuals(ocp, mu, red);
  CHECK(res.r_y_norm <= 1e-9 * res.rhs_y_norm);
  CHECK(res.r_p_norm <= 1e-9 * res.rhs_p_norm);
  const double rel =
      control_error(ocp, mu, solve_full(ocp, mu).u, red.u) / control_norm(ocp, mu, red.u);
  CHECK(rel <= 1e-9);
}

TEST_CASE("full-space basis drives the residuals to solver tolerance") {
  const ParametricOCP ocp = thermal_block(6, 6);
  RBSpace rb;
  std::vector<Eigen::VectorXd> cols;
  for (int i = 0; i < ocp.n_free(); ++i) cols.push_back(Eigen::VectorXd::Unit(ocp.n_free(), i));
  extend_orthonormal(rb, *ocp.y_gram, cols);
  const Mu mu{1.4};
  const ReducedSolution red = solve_reduced(ocp, rb.phi, mu);
  const Residuals res = compute_residuals(ocp, mu, red);
  CHECK(res.r_y_norm <= 1e-8 * res.rhs_y_norm);
  CHECK(res.r_p_norm <= 1e-8 * std::max(res.rhs_p_norm, res.rhs_y_norm));
}

TEST_CASE("cross-parameter residuals are positive and match a dense recomputation") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const RBSpace rb = snapshot_space(ocp, {{0.5}});
  const Mu mu{3.0};
  const ReducedSolution red = solve_reduced(ocp, rb.phi, mu);
  const Residuals res = compute_residuals(ocp, mu, red);
  CHECK(res.r_y_norm > 1e-6);
  CHECK(res.r_p_norm > 1e-8);

  // Dense path: assemble the residual vectors and invert the gram directly.
  const Eigen::MatrixXd a = Eigen::MatrixXd(ocp.a.at(mu).mat);
  const Eigen::MatrixXd k = Eigen::MatrixXd(ocp.y_gram->op.mat);
  const Eigen::VectorXd r_y =
      integrate_control(ocp, mu, red.u) + ocp.f.at(mu) - a * red.y_lift;
  const Eigen::VectorXd r_p =
      Eigen::MatrixXd(ocp.obs.at(mu).mat) * red.y_lift - ocp.z_load.at(mu) -
      a.transpose() * red.p_lift;
  const double ry_dense = std::sqrt(r_y.dot(k.fullPivLu().solve(r_y)));
  const double rp_dense = std::sqrt(r_p.dot(k.fullPivLu().solve(r_p)));
  CHECK(res.r_y_norm == doctest::Approx(ry_dense).epsilon(1e-10));
  CHECK(res.r_p_norm == doctest::Approx(rp_dense).epsilon(1e-10));
}

TEST_CASE("lower coefficients never exceed the upper ones with shared constants") {
  const ParametricOCP ocp = thermal_block(4, 4);
  for (double m : {0.5, 1.0, 2.0, 3.0}) {
    const StabilityConstants c = exact_at(ocp, {m});
    const EstimatorReport rep = estimate(ocp, {m}, Residuals{0.2, 0.4, 1, 1}, 1.0, c);
    REQUIRE(rep.c3.has_value());
    CHECK(*rep.c3 <= rep.c1);
    CHECK(*rep.c4 <= rep.c2);
    CHECK(*rep.delta_lower <= rep.delta_uyp);
  }
}

TEST_CASE("surrogate constants dominate the exact-constant control bound") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const Residuals res{0.05, 0.02, 1, 1};
  for (double m : {0.5, 1.1, 2.4, 3.0}) {
    const EstimatorReport sur = estimate(ocp, {m}, res, 1.0, ocp.surrogate_constants({m}));
    const EstimatorReport exa = estimate(ocp, {m}, res, 1.0, exact_at(ocp, {m}));
    CHECK(sur.delta_u >= exa.delta_u * (1.0 - 1e-12));
  }
}
