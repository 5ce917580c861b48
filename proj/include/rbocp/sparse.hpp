// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_SPARSE_HPP
#define RBOCP_SPARSE_HPP

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rbocp/mesh.hpp"

namespace rbocp {

using SpMatR = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SpMatC = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Row-compressed operator with an explicit symmetry flag. The flag drives the
// factorization choice (Cholesky vs LU) and must only be set when the entries
// are symmetric.
struct SparseOperator {
  SpMatR mat;
  bool symmetric = false;

  SparseOperator() = default;
  SparseOperator(SpMatR m, bool sym) : mat(std::move(m)), symmetric(sym) { mat.makeCompressed(); }

  Eigen::Index rows() const { return mat.rows(); }
  Eigen::Index cols() const { return mat.cols(); }
  Eigen::Index dimension() const { return mat.rows(); }

  static SparseOperator from_triplets(Eigen::Index rows, Eigen::Index cols,
                                      const std::vector<Eigen::Triplet<double>>& trips,
                                      bool symmetric);
  static SparseOperator identity(Eigen::Index n);

  SparseOperator transpose() const;
  // Largest deviation |a_ij - a_ji|; zero for structurally symmetric data.
  double symmetry_defect() const;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(double s, const SparseOperator& a);

// Direct factorization: Cholesky for symmetric-flagged operators, sparse LU
// otherwise. Throws SingularMatrixError instead of returning garbage.
class Factorization {
 public:
  explicit Factorization(const SparseOperator& op);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve_multi(const Eigen::MatrixXd& rhs) const;
  Eigen::Index dimension() const { return n_; }

 private:
  Eigen::Index n_ = 0;
  bool spd_ = false;
  std::unique_ptr<Eigen::SimplicialLLT<SpMatC>> llt_;
  std::unique_ptr<Eigen::SparseLU<SpMatC>> lu_;
};

Factorization factorize(const SparseOperator& op);

struct DirichletSystem {
  SparseOperator op;
  Eigen::VectorXd rhs;
  DofMap map;
};

// Symmetric elimination of homogeneous Dirichlet dofs: constrained rows and
// columns are removed and the index mapping retained.
DirichletSystem apply_dirichlet(const SparseOperator& op, const Eigen::VectorXd& rhs,
                                const std::vector<int>& dofs);

// Restriction helpers used when the dof map is shared across many operators.
SparseOperator restrict_rows(const SparseOperator& op, const DofMap& map);
SparseOperator restrict_both(const SparseOperator& op, const DofMap& map);

// Gram matrix of the Y-inner product, kept factorized for repeated Riesz
// solves. Must be SPD.
struct GramMatrix {
  SparseOperator op;
  std::shared_ptr<const Factorization> fact;

  explicit GramMatrix(SparseOperator k)
      : op(std::move(k)), fact(std::make_shared<Factorization>(op)) {}

  Eigen::Index dimension() const { return op.dimension(); }
  double norm(const Eigen::VectorXd& v) const {
    return std::sqrt(std::max(0.0, v.dot(op.mat * v)));
  }
};

struct RieszResult {
  Eigen::VectorXd representative;
  double norm = 0.0;
};

// Solves K v = r; the returned norm sqrt(r^T v) is the Y*-dual norm of r.
RieszResult riesz_dual_norm(const GramMatrix& gram, const Eigen::VectorXd& r);

enum class ConstantsProvenance { Surrogate, ExactEigen };

struct StabilityConstants {
  double beta = 0.0;
  double gamma = 0.0;  // NaN in surrogate mode (no computable surrogate)
  double kappa = 0.0;
  ConstantsProvenance provenance = ConstantsProvenance::Surrogate;
};

// Dense generalized-eigenvalue oracle for the exact constants:
//   beta  = min eig of sym(A) w.r.t. K,
//   gamma = largest singular value of A in K geometry,
//   kappa = largest singular value of B between (U, M_U) and (Y, K).
// Desk-scale only; refuses dimensions above `max_dim`.
StabilityConstants exact_constants(const SparseOperator& a_mu, const GramMatrix& gram,
                                   const SparseOperator& b_mu, const SparseOperator& m_u,
                                   Eigen::Index max_dim = 2500);

}  // namespace rbocp

#endif  // RBOCP_SPARSE_HPP
