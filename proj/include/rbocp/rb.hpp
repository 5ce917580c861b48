// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_RB_HPP
#define RBOCP_RB_HPP

#include <vector>

#include <Eigen/Dense>

#include "rbocp/problems.hpp"
#include "rbocp/sparse.hpp"

namespace rbocp {

// Y-orthonormal snapshot basis. Columns arrive in state/adjoint pairs per
// sampled parameter, except where a snapshot was rejected as linearly
// dependent; col_offsets[i] is the column count after sample i.
struct RBSpace {
  Eigen::MatrixXd phi;   // n_free x m
  Eigen::MatrixXd kphi;  // K * phi, cached for Gram-Schmidt
  std::vector<Mu> sampled;
  std::vector<int> col_offsets;

  int cols() const { return static_cast<int>(phi.cols()); }
  int samples() const { return static_cast<int>(sampled.size()); }
  // Columns spanned by the first n_samples snapshots.
  Eigen::Ref<const Eigen::MatrixXd> prefix(int n_samples) const {
    return phi.leftCols(col_offsets.at(static_cast<std::size_t>(n_samples) - 1));
  }
  double orthonormality_defect(const GramMatrix& gram) const;
};

// Modified Gram-Schmidt in the K-inner product with one reorthogonalization
// pass. A snapshot is rejected when its post-projection norm falls below
// threshold times its pre-projection norm. Returns the number accepted.
int extend_orthonormal(RBSpace& rb, const GramMatrix& gram,
                       const std::vector<Eigen::VectorXd>& snapshots, double threshold = 1e-10);

// Relative distance of a snapshot to the current span in the K-norm
// (post-projection norm over pre-projection norm); 1 for an empty basis.
double snapshot_novelty(const RBSpace& rb, const GramMatrix& gram, const Eigen::VectorXd& snap);

}  // namespace rbocp

#endif  // RBOCP_RB_HPP
