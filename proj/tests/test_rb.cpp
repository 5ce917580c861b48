// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "rbocp/rb.hpp"

using namespace rbocp;

namespace {

SparseOperator random_spd_operator(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = dist(rng);
  const Eigen::MatrixXd k = a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) trips.emplace_back(static_cast<int>(i), static_cast<int>(j), k(i, j));
  return SparseOperator::from_triplets(n, n, trips, true);
}

}  // namespace

TEST_CASE("extending the empty space with one snapshot yields a unit K-norm column") {
  GramMatrix gram(random_spd_operator(10, 321));
  RBSpace rb;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(10);
  for (auto& x : v) x = dist(rng);
  CHECK(extend_orthonormal(rb, gram, {v}) == 1);
  CHECK(rb.cols() == 1);
  CHECK(gram.norm(rb.phi.col(0)) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("an exact copy of an existing column is rejected") {
  GramMatrix gram(random_spd_operator(10, 321));
  RBSpace rb;
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(10, 1.0, 2.0);
  CHECK(extend_orthonormal(rb, gram, {v}) == 1);
  CHECK(extend_orthonormal(rb, gram, {v}) == 0);
  CHECK(extend_orthonormal(rb, gram, {2.5 * v}) == 0);  // scaled copy too
  CHECK(rb.cols() == 1);
}

TEST_CASE("a zero snapshot is rejected without error") {
  GramMatrix gram(random_spd_operator(6, 11));
  RBSpace rb;
  CHECK(extend_orthonormal(rb, gram, {Eigen::VectorXd::Zero(6)}) == 0);
}

TEST_CASE("random snapshots against the dense K-QR oracle") {
  const int n = 50;
  const SparseOperator k_op = random_spd_operator(n, 777);
  GramMatrix gram(k_op);
  const Eigen::MatrixXd k = Eigen::MatrixXd(k_op.mat);

  std::mt19937_64 rng(888);
  std::normal_distribution<double> dist;
  std::vector<Eigen::VectorXd> snaps;
  Eigen::MatrixXd s(n, 5);
  for (int c = 0; c < 5; ++c) {
    Eigen::VectorXd v(n);
    for (auto& x : v) x = dist(rng);
    snaps.push_back(v);
    s.col(c) = v;
  }
  RBSpace rb;
  CHECK(extend_orthonormal(rb, gram, snaps) == 5);

  // Orthonormality in the K-inner product.
  CHECK(rb.orthonormality_defect(gram) <= 1e-12);

  // Same span as the dense oracle: K-orthonormalize via Cholesky + QR and
  // compare the K-orthogonal projectors.
  const Eigen::LLT<Eigen::MatrixXd> llt(k);
  const Eigen::MatrixXd l_t = llt.matrixU();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(l_t * s);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 5);
  const Eigen::MatrixXd basis_oracle = l_t.triangularView<Eigen::Upper>().solve(q);
  const Eigen::MatrixXd proj_impl = rb.phi * rb.phi.transpose() * k;
  const Eigen::MatrixXd proj_oracle = basis_oracle * basis_oracle.transpose() * k;
  CHECK((proj_impl - proj_oracle).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("a vector inside the span is rejected, a fresh direction accepted") {
  GramMatrix gram(random_spd_operator(8, 99));
  RBSpace rb;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> dist;
  Eigen::VectorXd a(8), b(8);
  for (auto& x : a) x = dist(rng);
  for (auto& x : b) x = dist(rng);
  CHECK(extend_orthonormal(rb, gram, {a, b}) == 2);
  CHECK(extend_orthonormal(rb, gram, {0.3 * a - 1.7 * b}) == 0);
  Eigen::VectorXd c(8);
  for (auto& x : c) x = dist(rng);
  CHECK(extend_orthonormal(rb, gram, {c}) == 1);
  CHECK(rb.orthonormality_defect(gram) <= 1e-12);
}

TEST_CASE("prefix views select the sampled snapshot pairs") {
  GramMatrix gram(random_spd_operator(12, 4));
  RBSpace rb;
  std::mt19937_64 rng(44);
  std::normal_distribution<double> dist;
  for (int s = 0; s < 3; ++s) {
    Eigen::VectorXd y(12), p(12);
    for (auto& x : y) x = dist(rng);
    for (auto& x : p) x = dist(rng);
    extend_orthonormal(rb, gram, {y, p});
    rb.sampled.push_back({0.5 + s});
    rb.col_offsets.push_back(rb.cols());
  }
  CHECK(rb.cols() == 6);
  CHECK(rb.prefix(1).cols() == 2);
  CHECK(rb.prefix(2).cols() == 4);
  CHECK(rb.prefix(3).cols() == 6);
}
