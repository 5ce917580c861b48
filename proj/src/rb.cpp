// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/rb.hpp"

#include <cmath>

namespace rbocp {

double RBSpace::orthonormality_defect(const GramMatrix& gram) const {
  if (cols() == 0) return 0.0;
  const Eigen::MatrixXd g = phi.transpose() * (gram.op.mat * phi);
  return (g - Eigen::MatrixXd::Identity(cols(), cols())).cwiseAbs().maxCoeff();
}

double snapshot_novelty(const RBSpace& rb, const GramMatrix& gram, const Eigen::VectorXd& snap) {
  Eigen::VectorXd w = snap;
  Eigen::VectorXd kw = gram.op.mat * w;
  const double norm0 = std::sqrt(std::max(0.0, w.dot(kw)));
  if (norm0 == 0.0) return 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < rb.cols(); ++j) {
      const double h = rb.kphi.col(j).dot(w);
      w -= h * rb.phi.col(j);
      kw -= h * rb.kphi.col(j);
    }
  }
  return std::sqrt(std::max(0.0, w.dot(kw))) / norm0;
}

int extend_orthonormal(RBSpace& rb, const GramMatrix& gram,
                       const std::vector<Eigen::VectorXd>& snapshots, double threshold) {
  const Eigen::Index n = gram.dimension();
  if (rb.phi.size() == 0) {
    rb.phi.resize(n, 0);
    rb.kphi.resize(n, 0);
  }
  int accepted = 0;
  for (const Eigen::VectorXd& snap : snapshots) {
    if (snap.size() != n)
      throw std::invalid_argument("extend_orthonormal: snapshot dimension mismatch");
    Eigen::VectorXd w = snap;
    Eigen::VectorXd kw = gram.op.mat * w;
    const double norm0 = std::sqrt(std::max(0.0, w.dot(kw)));
    if (norm0 == 0.0) continue;  // zero snapshot: rejected, not an error
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < rb.cols(); ++j) {
        const double h = rb.kphi.col(j).dot(w);
        w -= h * rb.phi.col(j);
        kw -= h * rb.kphi.col(j);
      }
    }
    const double norm1 = std::sqrt(std::max(0.0, w.dot(kw)));
    if (norm1 <= threshold * norm0) continue;
    rb.phi.conservativeResize(Eigen::NoChange, rb.cols() + 1);
    rb.kphi.conservativeResize(Eigen::NoChange, rb.cols());
    rb.phi.col(rb.cols() - 1) = w / norm1;
    rb.kphi.col(rb.cols() - 1) = kw / norm1;
    ++accepted;
  }
  return accepted;
}

}  // namespace rbocp
