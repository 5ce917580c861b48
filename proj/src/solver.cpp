// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/solver.hpp"

#include <cmath>
#include <vector>

#include <Eigen/LU>

namespace rbocp {

namespace {

double u_norm_of(const SparseOperator& m_u_free, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(m_u_free.mat * v)));
}

std::vector<TriState> states_of(const ControlFunction& u) {
  std::vector<TriState> s;
  s.reserve(u.tris.size());
  for (const auto& t : u.tris) s.push_back(t.state);
  return s;
}

}  // namespace

OCPSolution solve_full(const ParametricOCP& ocp, const Mu& mu, const SolverOptions& opts,
                       const Eigen::VectorXd* p0) {
  ocp.require_in_box(mu);
  const int n = ocp.n_free();
  const SparseOperator a = ocp.a.at(mu);
  const SparseOperator m0 = ocp.obs.at(mu);
  const Eigen::VectorXd f = ocp.f.at(mu);
  const Eigen::VectorXd zl = ocp.z_load.at(mu);
  const SparseOperator m_u_free = ocp.u_gram_free(mu);

  // Base blocks of the coupled system are parameter-fixed; only the
  // inactive-region coupling block changes per iteration.
  std::vector<Eigen::Triplet<double>> base;
  base.reserve(static_cast<std::size_t>(2 * a.mat.nonZeros() + m0.mat.nonZeros()));
  for (int k = 0; k < a.mat.outerSize(); ++k)
    for (SpMatR::InnerIterator it(a.mat, k); it; ++it) {
      base.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      base.emplace_back(n + static_cast<int>(it.col()), n + static_cast<int>(it.row()), it.value());
    }
  for (int k = 0; k < m0.mat.outerSize(); ++k)
    for (SpMatR::InnerIterator it(m0.mat, k); it; ++it)
      base.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()), -it.value());

  Eigen::VectorXd p = p0 ? *p0 : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  if (p0 && p0->size() != n) throw std::invalid_argument("solve_full: bad warm-start dimension");

  OCPSolution out;
  Eigen::SparseLU<SpMatC> lu;
  bool analyzed = false;
  std::vector<TriState> prev_states;
  const double inv_alpha = 1.0 / ocp.alpha;

  for (int iter = 1; iter <= opts.max_newton_iters; ++iter) {
    const ControlFunction u = control_from_adjoint(ocp, mu, ocp.lift(p));
    const PdasTerms terms = assemble_pdas_terms(ocp, mu, u);

    std::vector<Eigen::Triplet<double>> trips = base;
    for (int k = 0; k < terms.b_inactive.outerSize(); ++k)
      for (SpMatC::InnerIterator it(terms.b_inactive, k); it; ++it)
        trips.emplace_back(static_cast<int>(it.row()), n + static_cast<int>(it.col()),
                           inv_alpha * it.value());
    SpMatC block(2 * n, 2 * n);
    block.setFromTriplets(trips.begin(), trips.end());

    if (!analyzed) {
      lu.analyzePattern(block);
      analyzed = true;
    }
    lu.factorize(block);
    if (lu.info() != Eigen::Success)
      throw SolverError("solve_full: coupled system factorization failed", mu);

    Eigen::VectorXd rhs(2 * n);
    rhs.head(n) = f + terms.g_active;
    rhs.tail(n) = -zl;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) throw SolverError("solve_full: non-finite solution", mu);

    y = sol.head(n);
    const Eigen::VectorXd p_new = sol.tail(n);
    const double err = inv_alpha * u_norm_of(m_u_free, p_new - p);
    p = p_new;
    out.iterations = iter;

    const std::vector<TriState> states = states_of(u);
    out.final_states_stable = !prev_states.empty() && states == prev_states;
    prev_states = states;

    if (err <= opts.newton_tol) {
      out.converged = true;
      break;
    }
  }

  out.y = y;
  out.p = p;
  out.u = control_from_adjoint(ocp, mu, ocp.lift(p));
  out.final_states_stable =
      out.final_states_stable || (!prev_states.empty() && states_of(out.u) == prev_states);
  out.active_measure = out.u.active_measure();
  return out;
}

ReducedSolution solve_reduced(const ParametricOCP& ocp,
                              const Eigen::Ref<const Eigen::MatrixXd>& phi, const Mu& mu,
                              const SolverOptions& opts, const Eigen::VectorXd* p0_full) {
  ocp.require_in_box(mu);
  const int n = ocp.n_free();
  const int m = static_cast<int>(phi.cols());
  if (m == 0) throw std::invalid_argument("solve_reduced: empty reduced space");
  if (phi.rows() != n) throw std::invalid_argument("solve_reduced: basis dimension mismatch");

  const SparseOperator a = ocp.a.at(mu);
  const SparseOperator m0 = ocp.obs.at(mu);
  const Eigen::VectorXd f = ocp.f.at(mu);
  const Eigen::VectorXd zl = ocp.z_load.at(mu);
  const SparseOperator m_u_free = ocp.u_gram_free(mu);

  const Eigen::MatrixXd a_r = phi.transpose() * (a.mat * phi);
  const Eigen::MatrixXd m0_r = phi.transpose() * (m0.mat * phi);
  const Eigen::MatrixXd mu_r = phi.transpose() * (m_u_free.mat * phi);
  const Eigen::VectorXd f_r = phi.transpose() * f;
  const Eigen::VectorXd z_r = phi.transpose() * zl;

  Eigen::VectorXd p_c = Eigen::VectorXd::Zero(m);
  if (p0_full) {
    // K-orthonormal columns: best-approximation coefficients.
    p_c = phi.transpose() * (ocp.y_gram->op.mat * *p0_full);
  }
  Eigen::VectorXd y_c = Eigen::VectorXd::Zero(m);

  ReducedSolution out;
  const double inv_alpha = 1.0 / ocp.alpha;
  Eigen::MatrixXd block(2 * m, 2 * m);
  Eigen::VectorXd rhs(2 * m);

  for (int iter = 1; iter <= opts.max_newton_iters; ++iter) {
    const Eigen::VectorXd p_lift = phi * p_c;
    const ControlFunction u = control_from_adjoint(ocp, mu, ocp.lift(p_lift));
    const PdasTerms terms = assemble_pdas_terms(ocp, mu, u);
    const Eigen::MatrixXd b_r = phi.transpose() * (terms.b_inactive * phi);
    const Eigen::VectorXd g_r = phi.transpose() * terms.g_active;

    block.topLeftCorner(m, m) = a_r;
    block.topRightCorner(m, m) = inv_alpha * b_r;
    block.bottomLeftCorner(m, m) = -m0_r;
    block.bottomRightCorner(m, m) = a_r.transpose();
    rhs.head(m) = f_r + g_r;
    rhs.tail(m) = -z_r;

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(block);
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) throw SolverError("solve_reduced: non-finite solution", mu);

    y_c = sol.head(m);
    const Eigen::VectorXd p_new = sol.tail(m);
    const Eigen::VectorXd dp = phi * (p_new - p_c);
    const double err = inv_alpha * u_norm_of(m_u_free, dp);
    p_c = p_new;
    out.iterations = iter;
    if (err <= opts.newton_tol) {
      out.converged = true;
      break;
    }
  }

  out.y_coef = y_c;
  out.p_coef = p_c;
  out.y_lift = phi * y_c;
  out.p_lift = phi * p_c;
  out.u = control_from_adjoint(ocp, mu, ocp.lift(out.p_lift));
  return out;
}

namespace {

struct SubGrid {
  int k = 0;
  // Vertex (i, j) with i + j <= k at barycentric (i/k, j/k).
  int index(int i, int j) const { return j * (k + 1) - j * (j - 1) / 2 + i; }
  int n_vertices() const { return (k + 1) * (k + 2) / 2; }
};

}  // namespace

OCPSolution projected_gradient_oracle(const ParametricOCP& ocp, const Mu& mu, double step,
                                      int max_iters, double tol, int subdiv) {
  ocp.require_in_box(mu);
  if (ocp.n_free() > 4000)
    throw std::invalid_argument("projected_gradient_oracle: desk-scale meshes only");
  const int n = ocp.n_free();
  const SparseOperator a = ocp.a.at(mu);
  const SparseOperator m0 = ocp.obs.at(mu);
  const Eigen::VectorXd f = ocp.f.at(mu);
  const Eigen::VectorXd zl = ocp.z_load.at(mu);
  const Factorization a_fact(a);
  const Factorization at_fact(a.transpose());
  if (step <= 0.0) step = 1.0 / ocp.alpha;

  const SubGrid grid{subdiv};
  const int nv = grid.n_vertices();
  const int nt = ocp.mesh.n_triangles();
  std::vector<Eigen::VectorXd> u(static_cast<std::size_t>(nt));
  std::vector<Eigen::VectorXd> bound_vals(static_cast<std::size_t>(nt));

  // Barycentric lattice shared by all triangles.
  std::vector<Eigen::Vector3d> lattice(static_cast<std::size_t>(nv));
  for (int j = 0; j <= grid.k; ++j)
    for (int i = 0; i + j <= grid.k; ++i)
      lattice[static_cast<std::size_t>(grid.index(i, j))] =
          Eigen::Vector3d(double(i) / grid.k, double(j) / grid.k,
                          1.0 - double(i) / grid.k - double(j) / grid.k);

  for (int t = 0; t < nt; ++t) {
    const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
    Eigen::VectorXd b(nv);
    for (int v = 0; v < nv; ++v) {
      const Eigen::Vector3d& l = lattice[static_cast<std::size_t>(v)];
      const Eigen::Vector2d x = l[0] * ocp.mesh.vertices[tri.v[0]] +
                                l[1] * ocp.mesh.vertices[tri.v[1]] +
                                l[2] * ocp.mesh.vertices[tri.v[2]];
      b[v] = ocp.bound.lower_at(x);
    }
    bound_vals[static_cast<std::size_t>(t)] = b;
    u[static_cast<std::size_t>(t)] = b.cwiseMax(0.0);  // feasible start
  }

  // Subcell list as index triples into the lattice.
  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(grid.k * grid.k));
  for (int j = 0; j < grid.k; ++j) {
    for (int i = 0; i + j < grid.k; ++i) {
      cells.push_back({grid.index(i, j), grid.index(i + 1, j), grid.index(i, j + 1)});
      if (i + j + 1 < grid.k)
        cells.push_back({grid.index(i + 1, j), grid.index(i + 1, j + 1), grid.index(i, j + 1)});
    }
  }

  auto assemble_load = [&]() {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < nt; ++t) {
      const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
      const double w = ocp.b_weight(mu, tri.tag);
      const double cell_area = ocp.mesh.area(t) / (grid.k * grid.k);
      const Eigen::VectorXd& uv = u[static_cast<std::size_t>(t)];
      double local[3] = {0.0, 0.0, 0.0};
      for (const auto& c : cells) {
        for (int e = 0; e < 3; ++e) {
          const int q0 = c[static_cast<std::size_t>(e)];
          const int q1 = c[static_cast<std::size_t>((e + 1) % 3)];
          const double um = 0.5 * (uv[q0] + uv[q1]);
          const Eigen::Vector3d lm =
              0.5 * (lattice[static_cast<std::size_t>(q0)] + lattice[static_cast<std::size_t>(q1)]);
          for (int i = 0; i < 3; ++i) local[i] += cell_area / 3.0 * um * lm[i];
        }
      }
      for (int i = 0; i < 3; ++i) {
        const int fi = ocp.dofs.full_to_free[static_cast<std::size_t>(tri.v[static_cast<std::size_t>(i)])];
        if (fi >= 0) load[fi] += w * local[i];
      }
    }
    return load;
  };

  auto subgrid_norm_sq = [&](const std::vector<Eigen::VectorXd>& a_vals,
                             const std::vector<Eigen::VectorXd>& b_vals) {
    double sq = 0.0;
    for (int t = 0; t < nt; ++t) {
      const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
      const double w = ocp.u_weight(mu, tri.tag);
      const double cell_area = ocp.mesh.area(t) / (grid.k * grid.k);
      const Eigen::VectorXd diff = a_vals[static_cast<std::size_t>(t)] -
                                   (b_vals.empty() ? Eigen::VectorXd::Zero(nv)
                                                   : b_vals[static_cast<std::size_t>(t)]);
      for (const auto& c : cells) {
        for (int e = 0; e < 3; ++e) {
          const double dm = 0.5 * (diff[c[static_cast<std::size_t>(e)]] +
                                   diff[c[static_cast<std::size_t>((e + 1) % 3)]]);
          sq += w * cell_area / 3.0 * dm * dm;
        }
      }
    }
    return sq;
  };

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n), p = Eigen::VectorXd::Zero(n);
  bool converged = false;
  int iterations = 0;
  std::vector<Eigen::VectorXd> u_new = u;

  for (int iter = 1; iter <= max_iters; ++iter) {
    y = a_fact.solve(f + assemble_load());
    p = at_fact.solve(Eigen::VectorXd(m0.mat * y - zl));
    const Eigen::VectorXd p_full = ocp.lift(p);

    for (int t = 0; t < nt; ++t) {
      const Triangle& tri = ocp.mesh.tris[static_cast<std::size_t>(t)];
      const double ratio = ocp.b_weight(mu, tri.tag) / ocp.u_weight(mu, tri.tag);
      const Eigen::VectorXd& uv = u[static_cast<std::size_t>(t)];
      Eigen::VectorXd& un = u_new[static_cast<std::size_t>(t)];
      for (int v = 0; v < nv; ++v) {
        const Eigen::Vector3d& l = lattice[static_cast<std::size_t>(v)];
        const double pv = l[0] * p_full[tri.v[0]] + l[1] * p_full[tri.v[1]] +
                          l[2] * p_full[tri.v[2]];
        const double grad = ocp.alpha * uv[v] + ratio * pv;
        un[v] = std::max(bound_vals[static_cast<std::size_t>(t)][v], uv[v] - step * grad);
      }
    }
    const double delta = std::sqrt(subgrid_norm_sq(u_new, u));
    const double scale = std::max(1.0, std::sqrt(subgrid_norm_sq(u, {})));
    std::swap(u, u_new);
    iterations = iter;
    if (delta <= tol * scale) {
      converged = true;
      break;
    }
  }

  // Consistent state/adjoint for the final control iterate; at the fixed
  // point the control coincides with the projection of the adjoint.
  y = a_fact.solve(f + assemble_load());
  p = at_fact.solve(Eigen::VectorXd(m0.mat * y - zl));

  OCPSolution out;
  out.y = y;
  out.p = p;
  out.u = control_from_adjoint(ocp, mu, ocp.lift(p));
  out.iterations = iterations;
  out.converged = converged;
  out.active_measure = out.u.active_measure();
  out.final_states_stable = converged;
  return out;
}

}  // namespace rbocp
