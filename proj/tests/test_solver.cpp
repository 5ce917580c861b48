// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "rbocp/rb.hpp"
#include "rbocp/solver.hpp"

using namespace rbocp;

namespace {

// integral of u * w over the mesh with the U(mu) weight, w piecewise linear
// (full vertex values); exact via the kink polygons.
double integrate_u_times_p1(const ParametricOCP& ocp, const Mu& mu, const ControlFunction& u,
                            const Eigen::VectorXd& w_full) {
  double total = 0.0;
  for (int t = 0; t < ocp.mesh.n_triangles(); ++t) {
    const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
    const ControlTriangle& ct = u.tris[static_cast<std::size_t>(t)];
    const double weight = ocp.u_weight(mu, tri.tag);
    const double area = ocp.mesh.area(t);
    TriAffine w;
    for (int i = 0; i < 3; ++i)
      w.v[static_cast<std::size_t>(i)] = w_full[tri.v[static_cast<std::size_t>(i)]];
    auto integrand = [&](double l1, double l2) { return ct.value(l1, l2) * w.at(l1, l2); };
    if (ct.state == TriState::Split) {
      total += weight * integrate_poly(area, ct.inactive_poly, integrand);
      total += weight * integrate_poly(area, ct.active_poly, integrand);
    } else {
      total += weight * integrate_poly(area, full_triangle_poly(), integrand);
    }
  }
  return total;
}

RBSpace single_snapshot_space(const ParametricOCP& ocp, const OCPSolution& sol, const Mu& mu) {
  RBSpace rb;
  extend_orthonormal(rb, *ocp.y_gram, {sol.y, sol.p});
  rb.sampled.push_back(mu);
  rb.col_offsets.push_back(rb.cols());
  return rb;
}

}  // namespace

TEST_CASE("unconstrained solve matches the dense saddle-point oracle") {
  ParametricOCP ocp = thermal_block(8, 8);
  ocp.bound = AdmissibleSet{-1e9, 0.0, 0.0};
  const Mu mu{1.0};
  const OCPSolution sol = solve_full(ocp, mu);
  CHECK(sol.converged);
  CHECK(sol.active_measure == 0.0);

  const int n = ocp.n_free();
  const Eigen::MatrixXd a = Eigen::MatrixXd(ocp.a.at(mu).mat);
  const SparseOperator mass_free = ocp.u_gram_free(mu);
  const Eigen::MatrixXd m = Eigen::MatrixXd(mass_free.mat);
  const Eigen::MatrixXd m0 = Eigen::MatrixXd(ocp.obs.at(mu).mat);
  Eigen::MatrixXd block(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.topRightCorner(n, n) = m / ocp.alpha;
  block.bottomLeftCorner(n, n) = -m0;
  block.bottomRightCorner(n, n) = a.transpose();
  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = ocp.f.at(mu);
  rhs.tail(n) = -ocp.z_load.at(mu);
  const Eigen::VectorXd dense = block.fullPivLu().solve(rhs);

  CHECK((sol.y - dense.head(n)).norm() <= 1e-9 * (1.0 + dense.head(n).norm()));
  CHECK((sol.p - dense.tail(n)).norm() <= 1e-9 * (1.0 + dense.tail(n).norm()));
}

TEST_CASE("constrained thermal block: nonempty active set and clean convergence") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const OCPSolution sol = solve_full(ocp, {0.5});
  CHECK(sol.converged);
  CHECK(sol.iterations <= 50);
  CHECK(sol.active_measure > 0.0);
  CHECK(sol.final_states_stable);
}

TEST_CASE("uniqueness: different initial guesses give the same solution") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const Mu mu{0.7};
  const OCPSolution a = solve_full(ocp, mu);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> dist(0.0, 0.05);
  Eigen::VectorXd p0(ocp.n_free());
  for (auto& v : p0) v = dist(rng);
  const OCPSolution b = solve_full(ocp, mu, {}, &p0);
  CHECK((a.p - b.p).norm() <= 1e-10 * (1.0 + a.p.norm()));
  CHECK(a.active_measure == doctest::Approx(b.active_measure).epsilon(1e-9));
}

TEST_CASE("variational inequality holds for random admissible directions") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const Mu mu{0.9};
  const OCPSolution sol = solve_full(ocp, mu);
  const Eigen::VectorXd p_full = ocp.lift(sol.p);
  const SparseOperator mass = assemble_component(ocp.mesh, ComponentSpec::mass());

  const double norm_u = control_norm(ocp, mu, sol.u);
  const double norm_u_sq = norm_u * norm_u;

  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd w(ocp.n_full());
    for (auto& v : w) v = unit(rng);  // nonnegative perturbation

    // v = u + w stays admissible.
    const double value_add =
        w.dot(mass.mat * p_full) + ocp.alpha * integrate_u_times_p1(ocp, mu, sol.u, w);
    const double scale_add = ocp.alpha * norm_u * std::sqrt(w.dot(mass.mat * w)) + 1.0;
    CHECK(value_add >= -1e-9 * scale_add);

    // v = interpolated bound + w is admissible as well.
    Eigen::VectorXd ua(ocp.n_full());
    for (int i = 0; i < ocp.n_full(); ++i)
      ua[i] = ocp.bound.lower_at(ocp.mesh.vertices[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd vw = ua + w;
    // b(v - u, p) + alpha (u, v - u)_U assembled exactly.
    const double b_u_p = integrate_u_times_p1(ocp, mu, sol.u, p_full);
    const double value_bound = (vw.dot(mass.mat * p_full) - b_u_p) +
                               ocp.alpha * (integrate_u_times_p1(ocp, mu, sol.u, vw) - norm_u_sq);
    const double scale_bound = ocp.alpha * (norm_u + 1.0) * (vw.norm() + norm_u + 1.0);
    CHECK(value_bound >= -1e-9 * scale_bound);
  }
}

TEST_CASE("state equation residual is small at convergence") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const Mu mu{1.5};
  const OCPSolution sol = solve_full(ocp, mu);
  const Eigen::VectorXd rhs = integrate_control(ocp, mu, sol.u) + ocp.f.at(mu);
  const Eigen::VectorXd r = rhs - ocp.a.at(mu).mat * sol.y;
  const double scale = riesz_dual_norm(*ocp.y_gram, rhs).norm;
  CHECK(riesz_dual_norm(*ocp.y_gram, r).norm <= 1e-9 * scale);
}

TEST_CASE("control norm stabilizes under mesh refinement") {
  const Mu mu{0.8};
  double norms[3];
  int idx = 0;
  for (int n : {8, 16, 32}) {
    const ParametricOCP ocp = thermal_block(n, n);
    const OCPSolution sol = solve_full(ocp, mu);
    norms[idx++] = control_norm(ocp, mu, sol.u);
  }
  const double d1 = std::abs(norms[1] - norms[0]);
  const double d2 = std::abs(norms[2] - norms[1]);
  CHECK(d2 < d1);
  CHECK(d1 < 0.05 * norms[2]);
}

TEST_CASE("projected gradient oracle") {
  SUBCASE("agrees with the PDAS solve on the constrained problem") {
    const ParametricOCP ocp = thermal_block(8, 8);
    for (double m : {0.5, 1.7, 3.0}) {
      const Mu mu{m};
      const OCPSolution pdas = solve_full(ocp, mu);
      const OCPSolution pg = projected_gradient_oracle(ocp, mu, -1.0, 2000, 1e-11, 96);
      CHECK(pg.converged);
      const double rel =
          control_error(ocp, mu, pdas.u, pg.u) / control_norm(ocp, mu, pdas.u);
      CHECK(rel <= 1e-6);
    }
  }
  SUBCASE("unconstrained case matches the PDAS solve") {
    ParametricOCP ocp = thermal_block(8, 8);
    ocp.bound = AdmissibleSet{-1e9, 0.0, 0.0};
    const Mu mu{1.0};
    const OCPSolution pdas = solve_full(ocp, mu);
    const OCPSolution pg = projected_gradient_oracle(ocp, mu, -1.0, 2000, 1e-11, 16);
    const double rel = control_error(ocp, mu, pdas.u, pg.u) / control_norm(ocp, mu, pdas.u);
    CHECK(rel <= 1e-6);
  }
  SUBCASE("dominant penalization pushes the control to max(u_a, 0)") {
    const ParametricOCP ocp = thermal_block(8, 8, 1e3);
    const Mu mu{1.0};
    const OCPSolution sol = solve_full(ocp, mu);
    // max(u_a, 0) = u_a here, so compare against the all-active control.
    const ControlFunction ua_fn =
        control_from_adjoint(ocp, mu, Eigen::VectorXd::Zero(ocp.n_full()));
    const double rel = control_error(ocp, mu, sol.u, ua_fn) / control_norm(ocp, mu, ua_fn);
    CHECK(rel <= 1e-3);
  }
}

TEST_CASE("reduced solve reproduces the snapshot parameter") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const Mu mu{0.5};
  const OCPSolution full = solve_full(ocp, mu);
  const RBSpace rb = single_snapshot_space(ocp, full, mu);
  CHECK(rb.cols() == 2);

  const ReducedSolution red = solve_reduced(ocp, rb.phi, mu);
  CHECK(red.converged);
  const double rel = control_error(ocp, mu, full.u, red.u) / control_norm(ocp, mu, full.u);
  CHECK(rel <= 1e-9);
}

TEST_CASE("reduced solve with the full space equals the full solve") {
  const ParametricOCP ocp = thermal_block(6, 6);
  const int n = ocp.n_free();
  RBSpace rb;
  std::vector<Eigen::VectorXd> columns;
  for (int i = 0; i < n; ++i) columns.push_back(Eigen::VectorXd::Unit(n, i));
  extend_orthonormal(rb, *ocp.y_gram, columns);
  REQUIRE(rb.cols() == n);

  const Mu mu{2.2};
  const OCPSolution full = solve_full(ocp, mu);
  const ReducedSolution red = solve_reduced(ocp, rb.phi, mu);
  const double rel = control_error(ocp, mu, full.u, red.u) / control_norm(ocp, mu, full.u);
  CHECK(rel <= 1e-8);
}

TEST_CASE("single-snapshot basis across the parameter range: large but finite error") {
  const ParametricOCP ocp = thermal_block(8, 8);
  const Mu mu_train{0.5};
  const OCPSolution full_train = solve_full(ocp, mu_train);
  const RBSpace rb = single_snapshot_space(ocp, full_train, mu_train);

  const Mu mu_test{3.0};
  const OCPSolution full = solve_full(ocp, mu_test);
  const ReducedSolution red = solve_reduced(ocp, rb.phi, mu_test);
  const double rel =
      control_error(ocp, mu_test, full.u, red.u) / control_norm(ocp, mu_test, full.u);
  CHECK(rel > 1e-3);
  CHECK(rel < 1.0);
}

TEST_CASE("graetz flow: full solve converges and splits the control") {
  const ParametricOCP ocp = graetz_flow(25, 10);
  const OCPSolution sol = solve_full(ocp, {5.0, 0.8});
  CHECK(sol.converged);
  CHECK(sol.active_measure > 0.0);
  CHECK(sol.active_measure < ocp.mesh.total_area());
}
