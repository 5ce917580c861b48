// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace rbocp {

SparseOperator AffineOperator::at(const Mu& mu) const {
  if (components.empty()) throw std::logic_error("AffineOperator::at: no components");
  SpMatR sum = thetas[0](mu) * components[0].mat;
  for (std::size_t q = 1; q < components.size(); ++q) sum += thetas[q](mu) * components[q].mat;
  return SparseOperator(std::move(sum), all_symmetric());
}

bool AffineOperator::all_symmetric() const {
  for (const auto& c : components)
    if (!c.symmetric) return false;
  return true;
}

Eigen::VectorXd AffineVector::at(const Mu& mu) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  for (std::size_t q = 0; q < components.size(); ++q) sum += thetas[q](mu) * components[q];
  return sum;
}

bool ParametricOCP::in_box(const Mu& mu) const {
  if (static_cast<int>(mu.size()) != param_dim) return false;
  for (int i = 0; i < param_dim; ++i) {
    const auto& [lo, hi] = box[static_cast<std::size_t>(i)];
    const double tol = 1e-12 * (hi - lo);
    if (mu[static_cast<std::size_t>(i)] < lo - tol || mu[static_cast<std::size_t>(i)] > hi + tol)
      return false;
  }
  return true;
}

void ParametricOCP::require_in_box(const Mu& mu) const {
  if (!in_box(mu)) {
    std::ostringstream msg;
    msg << name << ": parameter (";
    for (std::size_t i = 0; i < mu.size(); ++i) msg << (i ? ", " : "") << mu[i];
    msg << ") outside the parameter box";
    throw OutOfParameterBox(msg.str());
  }
}

StabilityConstants ParametricOCP::surrogate_constants(const Mu& mu) const {
  StabilityConstants c;
  c.beta = beta_surrogate(mu);
  c.kappa = kappa_surrogate(mu);
  c.gamma = std::numeric_limits<double>::quiet_NaN();
  c.provenance = ConstantsProvenance::Surrogate;
  return c;
}

SparseOperator ParametricOCP::u_gram_free(const Mu& mu) const {
  return restrict_both(u_gram.at(mu), dofs);
}

EvaluatedForms evaluate_forms(const ParametricOCP& ocp, const Mu& mu) {
  ocp.require_in_box(mu);
  EvaluatedForms out;
  out.a = ocp.a.at(mu);
  out.b = ocp.b.at(mu);
  out.f = ocp.f.at(mu);
  out.m_u = ocp.u_gram.at(mu);
  return out;
}

namespace {

Theta constant_theta(double v) {
  return [v](const Mu&) { return v; };
}

Eigen::VectorXd ones(Eigen::Index n) { return Eigen::VectorXd::Ones(n); }

}  // namespace

ParametricOCP thermal_block(int nx, int ny, double alpha) {
  if (nx % 2 != 0) throw std::invalid_argument("thermal_block: nx must be even (interface x1=0.5)");
  if (alpha <= 0) throw std::invalid_argument("thermal_block: alpha must be positive");

  ParametricOCP ocp;
  ocp.name = "thermal-block";
  ocp.param_dim = 1;
  ocp.box = {{0.5, 3.0}};
  ocp.alpha = alpha;

  const Rect rect{0.0, 0.0, 1.0, 1.0};
  SplitLines splits;
  splits.xs = {0.5};
  ocp.mesh = build_rect_mesh(
      rect, nx, ny, splits, [](const Eigen::Vector2d& c) { return c.x() < 0.5 ? 1 : 2; },
      [](const Eigen::Vector2d&) { return 1; });

  ocp.dirichlet_dofs = dirichlet_vertices(ocp.mesh, {1});
  ocp.dofs = make_dof_map(ocp.mesh.n_vertices(), ocp.dirichlet_dofs);

  const SparseOperator k1 = assemble_component(ocp.mesh, ComponentSpec::diffusion_full({1}));
  const SparseOperator k2 = assemble_component(ocp.mesh, ComponentSpec::diffusion_full({2}));
  const SparseOperator mass = assemble_component(ocp.mesh, ComponentSpec::mass());

  ocp.a.components = {restrict_both(k1, ocp.dofs), restrict_both(k2, ocp.dofs)};
  ocp.a.thetas = {[](const Mu& mu) { return mu[0]; }, constant_theta(1.0)};

  ocp.y_gram = std::make_shared<GramMatrix>(restrict_both(k1 + k2, ocp.dofs));

  ocp.b.components = {restrict_rows(mass, ocp.dofs)};
  ocp.b.thetas = {constant_theta(1.0)};

  ocp.f.dim = ocp.dofs.n_free();  // f = 0

  ocp.obs.components = {restrict_both(mass, ocp.dofs)};
  ocp.obs.thetas = {constant_theta(1.0)};

  // z = 1 on the whole observation domain.
  ocp.z_load.dim = ocp.dofs.n_free();
  ocp.z_load.components = {restrict_rows(mass, ocp.dofs).mat * ones(ocp.mesh.n_vertices())};
  ocp.z_load.thetas = {constant_theta(1.0)};

  ocp.u_gram.components = {mass};
  ocp.u_gram.thetas = {constant_theta(1.0)};

  ocp.bound = AdmissibleSet{1.0, 2.0, 0.0};  // 2 + 2 (x1 - 0.5)

  const double c_p = 1.0 / (std::sqrt(2.0) * std::numbers::pi);
  ocp.rho1 = 1.0 / std::sqrt(c_p * c_p + 1.0);
  ocp.rho2 = 1.0;
  ocp.beta_surrogate = [](const Mu& mu) { return std::min(mu[0], 1.0); };
  ocp.kappa_surrogate = [c_p](const Mu&) { return c_p; };

  ocp.b_weight = [](const Mu&, int) { return 1.0; };
  ocp.u_weight = [](const Mu&, int) { return 1.0; };

  ocp.documented = DocumentedBounds{0.5, 3.0, c_p, 0.0};
  return ocp;
}

ParametricOCP graetz_flow(int nx, int ny, double alpha) {
  if (alpha <= 0) throw std::invalid_argument("graetz_flow: alpha must be positive");

  ParametricOCP ocp;
  ocp.name = "graetz";
  ocp.param_dim = 2;
  ocp.box = {{5.0, 18.0}, {0.8, 1.2}};
  ocp.alpha = alpha;

  const Rect rect{0.0, 0.0, 2.5, 1.0};
  SplitLines splits;
  splits.xs = {0.2, 0.8, 1.0, 1.2};
  splits.ys = {0.3, 0.7};
  const Rect obs1{0.2, 0.3, 0.8, 0.7};
  const Rect obs2{1.2, 0.3, 2.5, 0.7};
  ocp.mesh = build_rect_mesh(
      rect, nx, ny, splits,
      [&](const Eigen::Vector2d& c) {
        if (c.x() < 1.0) return obs1.contains(c) ? 2 : 1;
        return obs2.contains(c) ? 4 : 3;
      },
      [&](const Eigen::Vector2d& m) {
        // Dirichlet: inlet and channel walls; Neumann: outflow.
        return m.x() > rect.x1 - 1e-12 ? 2 : 1;
      });

  ocp.dirichlet_dofs = dirichlet_vertices(ocp.mesh, {1});
  ocp.dofs = make_dof_map(ocp.mesh.n_vertices(), ocp.dirichlet_dofs);

  const std::vector<int> left_tags{1, 2};
  const std::vector<int> right_tags{3, 4};
  Eigen::Matrix2d dxx = Eigen::Matrix2d::Zero(), dyy = Eigen::Matrix2d::Zero();
  dxx(0, 0) = 1.0;
  dyy(1, 1) = 1.0;
  const SparseOperator kx_left =
      assemble_component(ocp.mesh, ComponentSpec::diffusion_matrix(dxx, left_tags));
  const SparseOperator ky_left =
      assemble_component(ocp.mesh, ComponentSpec::diffusion_matrix(dyy, left_tags));
  const SparseOperator k_right =
      assemble_component(ocp.mesh, ComponentSpec::diffusion_full(right_tags));
  const SparseOperator conv = assemble_component(
      ocp.mesh, ComponentSpec::convection(
                    [](const Eigen::Vector2d& x) {
                      return Eigen::Vector2d(x.y() * (1.0 - x.y()), 0.0);
                    },
                    2));
  const SparseOperator mass_left = assemble_component(ocp.mesh, ComponentSpec::mass(left_tags));
  const SparseOperator mass_right = assemble_component(ocp.mesh, ComponentSpec::mass(right_tags));
  const SparseOperator mass_obs1 = assemble_component(ocp.mesh, ComponentSpec::mass({2}));
  const SparseOperator mass_obs2 = assemble_component(ocp.mesh, ComponentSpec::mass({4}));

  ocp.a.components = {restrict_both(kx_left, ocp.dofs), restrict_both(ky_left, ocp.dofs),
                      restrict_both(k_right, ocp.dofs), restrict_both(conv, ocp.dofs)};
  ocp.a.thetas = {[](const Mu& mu) { return 1.0 / (mu[0] * mu[1]); },
                  [](const Mu& mu) { return mu[1] / mu[0]; },
                  [](const Mu& mu) { return 1.0 / mu[0]; }, constant_theta(1.0)};

  // Y-inner product: reference diffusion plus symmetrized convection.
  const double mu1_ref = 5.0;
  SpMatR k_y = (1.0 / mu1_ref) * (kx_left.mat + ky_left.mat + k_right.mat) +
               0.5 * (conv.mat + SpMatR(conv.mat.transpose()));
  ocp.y_gram = std::make_shared<GramMatrix>(
      restrict_both(SparseOperator(std::move(k_y), true), ocp.dofs));

  ocp.b.components = {restrict_rows(mass_left, ocp.dofs), restrict_rows(mass_right, ocp.dofs)};
  ocp.b.thetas = {[](const Mu& mu) { return mu[1]; }, constant_theta(1.0)};

  // Lifting by 1 annihilates both diffusion and convection, so f stays zero.
  ocp.f.dim = ocp.dofs.n_free();

  ocp.obs.components = {restrict_both(mass_obs1, ocp.dofs), restrict_both(mass_obs2, ocp.dofs)};
  ocp.obs.thetas = {[](const Mu& mu) { return mu[1]; }, constant_theta(1.0)};

  // Desired state 0.5 / 2 on the two observation windows, shifted by the
  // lifting: z - 1 = -0.5 and 1.
  const Eigen::VectorXd all = ones(ocp.mesh.n_vertices());
  ocp.z_load.dim = ocp.dofs.n_free();
  ocp.z_load.components = {restrict_rows(mass_obs1, ocp.dofs).mat * (-0.5 * all),
                           restrict_rows(mass_obs2, ocp.dofs).mat * (1.0 * all)};
  ocp.z_load.thetas = {[](const Mu& mu) { return mu[1]; }, constant_theta(1.0)};

  ocp.u_gram.components = {mass_left, mass_right};
  ocp.u_gram.thetas = {[](const Mu& mu) { return mu[1]; }, constant_theta(1.0)};

  ocp.bound = AdmissibleSet{-0.5, 0.0, 0.0};

  // Poincare constant (squared form) for functions vanishing on the walls.
  const double c_p = 1.0 / (std::numbers::pi * std::numbers::pi);
  ocp.rho1 = std::pow(std::max(mu1_ref * (1.0 + c_p), 1.0), -2.0);
  ocp.rho2 = std::sqrt(0.325);
  ocp.beta_surrogate = [mu1_ref](const Mu& mu) {
    const double m = std::min({1.0 / (mu[0] * mu[1]), mu[1] / mu[0], 1.0 / mu[0]});
    return std::min(mu1_ref * m, 1.0);
  };
  const double rho1 = ocp.rho1;
  ocp.kappa_surrogate = [rho1](const Mu& mu) { return (std::sqrt(mu[1]) + 1.0) / rho1; };

  auto left_weight = [](const Mu& mu, int tag) { return tag <= 2 ? mu[1] : 1.0; };
  ocp.b_weight = left_weight;
  ocp.u_weight = left_weight;

  ocp.documented = DocumentedBounds{2.0 / 9.0, 5.0, (std::sqrt(1.2) + 1.0) / rho1, 0.0};
  return ocp;
}

namespace {

std::vector<Mu> geometric_grid_1d(double a, double ratio, int n, int divisor) {
  std::vector<Mu> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j)
    out.push_back({a * std::pow(ratio, static_cast<double>(j - 1) / divisor)});
  return out;
}

}  // namespace

std::vector<Mu> thermal_train_grid(int n) {
  if (n == 1) return {{0.5}};
  return geometric_grid_1d(0.5, 3.0 / 0.5, n, n - 1);
}

std::vector<Mu> thermal_test_grid(int n) { return geometric_grid_1d(0.503, 2.99 / 0.503, n, n); }

std::vector<Mu> graetz_train_grid(int n1, int n2) {
  std::vector<Mu> out;
  out.reserve(static_cast<std::size_t>(n1 * n2));
  for (int j = 1; j <= n1; ++j) {
    const double s1 = 5.0 * std::pow(18.0 / 5.0, static_cast<double>(j - 1) / (n1 - 1));
    for (int k = 1; k <= n2; ++k) {
      const double s2 = 0.8 + 0.4 * static_cast<double>(k - 1) / (n2 - 1);
      out.push_back({s1, s2});
    }
  }
  return out;
}

std::vector<Mu> graetz_test_grid(int n1, int n2) {
  std::vector<Mu> out;
  out.reserve(static_cast<std::size_t>(n1 * n2));
  for (int j = 1; j <= n1; ++j) {
    const double s1 = 5.2 * std::pow(17.5 / 5.2, static_cast<double>(j - 1) / (n1 - 1));
    for (int k = 1; k <= n2; ++k) {
      const double s2 = 0.82 + 0.35 * static_cast<double>(k - 1) / (n2 - 1);
      out.push_back({s1, s2});
    }
  }
  return out;
}

}  // namespace rbocp
