// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/sparse.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace rbocp {

SparseOperator SparseOperator::from_triplets(Eigen::Index rows, Eigen::Index cols,
                                             const std::vector<Eigen::Triplet<double>>& trips,
                                             bool symmetric) {
  SpMatR m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return SparseOperator(std::move(m), symmetric);
}

SparseOperator SparseOperator::identity(Eigen::Index n) {
  SpMatR m(n, n);
  m.setIdentity();
  return SparseOperator(std::move(m), true);
}

SparseOperator SparseOperator::transpose() const {
  return SparseOperator(SpMatR(mat.transpose()), symmetric);
}

double SparseOperator::symmetry_defect() const {
  if (rows() != cols()) return std::numeric_limits<double>::infinity();
  SpMatR diff = mat - SpMatR(mat.transpose());
  double defect = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMatR::InnerIterator it(diff, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
  return defect;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  return SparseOperator(SpMatR(a.mat + b.mat), a.symmetric && b.symmetric);
}

SparseOperator operator*(double s, const SparseOperator& a) {
  return SparseOperator(SpMatR(s * a.mat), a.symmetric);
}

Factorization::Factorization(const SparseOperator& op) : n_(op.rows()), spd_(op.symmetric) {
  if (op.rows() != op.cols()) throw std::invalid_argument("Factorization: operator must be square");
  SpMatC col(op.mat);
  if (spd_) {
    llt_ = std::make_unique<Eigen::SimplicialLLT<SpMatC>>();
    llt_->compute(col);
    if (llt_->info() != Eigen::Success)
      throw SingularMatrixError("Cholesky factorization failed: matrix not SPD");
  } else {
    lu_ = std::make_unique<Eigen::SparseLU<SpMatC>>();
    lu_->analyzePattern(col);
    lu_->factorize(col);
    if (lu_->info() != Eigen::Success)
      throw SingularMatrixError("sparse LU factorization failed: matrix singular");
  }
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("Factorization::solve: dimension mismatch");
  return spd_ ? Eigen::VectorXd(llt_->solve(rhs)) : Eigen::VectorXd(lu_->solve(rhs));
}

Eigen::MatrixXd Factorization::solve_multi(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != n_) throw std::invalid_argument("Factorization::solve: dimension mismatch");
  return spd_ ? Eigen::MatrixXd(llt_->solve(rhs)) : Eigen::MatrixXd(lu_->solve(rhs));
}

Factorization factorize(const SparseOperator& op) { return Factorization(op); }

DirichletSystem apply_dirichlet(const SparseOperator& op, const Eigen::VectorXd& rhs,
                                const std::vector<int>& dofs) {
  if (op.rows() != op.cols() || rhs.size() != op.rows())
    throw std::invalid_argument("apply_dirichlet: dimension mismatch");
  DirichletSystem out;
  out.map = make_dof_map(static_cast<int>(op.rows()), dofs);
  out.op = restrict_both(op, out.map);
  out.rhs = out.map.restrict_vec(rhs);
  return out;
}

SparseOperator restrict_rows(const SparseOperator& op, const DofMap& map) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(op.mat.nonZeros()));
  for (int k = 0; k < op.mat.outerSize(); ++k) {
    for (SpMatR::InnerIterator it(op.mat, k); it; ++it) {
      const int r = map.full_to_free[static_cast<std::size_t>(it.row())];
      if (r >= 0) trips.emplace_back(r, static_cast<int>(it.col()), it.value());
    }
  }
  return SparseOperator::from_triplets(map.n_free(), op.cols(), trips, false);
}

SparseOperator restrict_both(const SparseOperator& op, const DofMap& map) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(op.mat.nonZeros()));
  for (int k = 0; k < op.mat.outerSize(); ++k) {
    for (SpMatR::InnerIterator it(op.mat, k); it; ++it) {
      const int r = map.full_to_free[static_cast<std::size_t>(it.row())];
      const int c = map.full_to_free[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  }
  return SparseOperator::from_triplets(map.n_free(), map.n_free(), trips, op.symmetric);
}

RieszResult riesz_dual_norm(const GramMatrix& gram, const Eigen::VectorXd& r) {
  RieszResult out;
  out.representative = gram.fact->solve(r);
  out.norm = std::sqrt(std::max(0.0, r.dot(out.representative)));
  return out;
}

StabilityConstants exact_constants(const SparseOperator& a_mu, const GramMatrix& gram,
                                   const SparseOperator& b_mu, const SparseOperator& m_u,
                                   Eigen::Index max_dim) {
  const Eigen::Index n = a_mu.rows();
  if (n > max_dim || b_mu.cols() > max_dim)
    throw std::invalid_argument("exact_constants: dimension exceeds the dense-oracle limit");
  if (gram.dimension() != n || b_mu.rows() != n || m_u.rows() != b_mu.cols())
    throw std::invalid_argument("exact_constants: dimension mismatch");

  const Eigen::MatrixXd a = Eigen::MatrixXd(a_mu.mat);
  const Eigen::MatrixXd k = Eigen::MatrixXd(gram.op.mat);
  const Eigen::MatrixXd b = Eigen::MatrixXd(b_mu.mat);
  const Eigen::MatrixXd mu = Eigen::MatrixXd(m_u.mat);

  StabilityConstants out;
  out.provenance = ConstantsProvenance::ExactEigen;

  const Eigen::MatrixXd a_sym = 0.5 * (a + a.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> beta_solver(a_sym, k);
  out.beta = beta_solver.eigenvalues().minCoeff();

  const Eigen::LLT<Eigen::MatrixXd> k_llt(k);
  const Eigen::MatrixXd kinv_a = k_llt.solve(a);
  Eigen::MatrixXd gamma_mat = a.transpose() * kinv_a;
  gamma_mat = 0.5 * (gamma_mat + gamma_mat.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gamma_solver(gamma_mat, k);
  out.gamma = std::sqrt(std::max(0.0, gamma_solver.eigenvalues().maxCoeff()));

  const Eigen::MatrixXd kinv_b = k_llt.solve(b);
  Eigen::MatrixXd kappa_mat = b.transpose() * kinv_b;
  kappa_mat = 0.5 * (kappa_mat + kappa_mat.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> kappa_solver(kappa_mat, mu);
  out.kappa = std::sqrt(std::max(0.0, kappa_solver.eigenvalues().maxCoeff()));
  return out;
}

}  // namespace rbocp
