// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_GREEDY_HPP
#define RBOCP_GREEDY_HPP

#include <optional>
#include <utility>
#include <vector>

#include "rbocp/estimator.hpp"
#include "rbocp/rb.hpp"
#include "rbocp/solver.hpp"

namespace rbocp {

class FullSolveCache;

enum class EstimatorKind { RelativeControl, AbsoluteUyp };
enum class GreedyTermination { Tolerance, MaxIterations, LinearDependence };

const char* to_string(GreedyTermination t);

struct GreedyConfig {
  std::vector<Mu> train;
  double eps_tol = 1e-8;
  int n_max = 30;
  EstimatorKind estimator = EstimatorKind::RelativeControl;
  // Per-snapshot Gram-Schmidt rejection (guards orthonormality and exact
  // reproduction at sampled parameters).
  double dependence_threshold = 1e-10;
  // Dimension-stall test: the loop ends when both winner snapshots fall
  // below this relative novelty, before any column is added.
  double stall_threshold = 1e-6;
  int jobs = 0;  // 0 = hardware concurrency
  bool warm_start = true;
};

struct GreedyIterRecord {
  int n = 0;  // samples in the basis during this sweep
  Mu selected;
  double max_estimator = 0.0;
  int dim = 0;
  double seconds = 0.0;
  // Populated when the winner's full-order solve ran (tolerance not yet met).
  std::optional<double> winner_rel_error;
  std::optional<double> winner_rel_bound;
};

struct GreedyHistory {
  std::vector<GreedyIterRecord> iters;
  GreedyTermination termination = GreedyTermination::Tolerance;
};

// Greedy basis construction: initialize with the full-order snapshot pair at
// train[0], then repeatedly extend at the training-set argmax of the
// configured estimator (surrogate constants). Terminates on eps_tol, n_max,
// or when both winner snapshots are rejected as linearly dependent. Ties in
// the argmax break to the first occurrence in training order.
std::pair<RBSpace, GreedyHistory> greedy(const ParametricOCP& ocp, const GreedyConfig& cfg,
                                         const SolverOptions& solver_opts,
                                         FullSolveCache* cache = nullptr);

struct ResultRow {
  int n = 0;
  Mu mu;
  double rel_error = 0.0;
  double rel_bound = 0.0;
  bool relative_valid = false;
  double delta_uyp = 0.0;
  std::optional<double> delta_lower;
  double r_y_norm = 0.0;
  double r_p_norm = 0.0;
  bool proviso_ok = false;
};

struct SummaryRow {
  int n = 0;
  double max_rel_error = 0.0;
  double max_rel_bound = 0.0;
};

struct EvalOptions {
  int jobs = 0;
  bool exact_constants = false;  // also fills delta_lower
  bool warm_start = true;
};

struct EvalTable {
  std::vector<ResultRow> rows;  // sorted by (n, mu)
  std::vector<SummaryRow> summary;
};

// True-vs-estimated errors for every basis prefix N = 1..samples over a test
// set; full-order solutions are cached across N.
EvalTable evaluate_on_test_set(const ParametricOCP& ocp, const RBSpace& rb,
                               const std::vector<Mu>& test_set, const SolverOptions& solver_opts,
                               const EvalOptions& eval_opts, FullSolveCache* cache = nullptr);

struct EffectivityRow {
  int n = 0;
  Mu mu;
  double err_u = 0.0, err_y = 0.0, err_p = 0.0, err_sum = 0.0;
  double delta_uyp = 0.0, delta_lower = 0.0;
  bool sandwich_ok = false;
  // Auxiliary-solution chain: each inequality as (lhs, rhs, ok).
  double y_yaux_lhs = 0.0, y_yaux_rhs = 0.0;
  double p_paux_lhs = 0.0, p_paux_rhs = 0.0;
  double yaux_lo = 0.0, yaux_mid = 0.0, yaux_hi = 0.0;
  double paux_lo = 0.0, paux_mid = 0.0, paux_hi = 0.0;
  bool lemma_ok = false;
};

// Exact-constants effectivity study on desk-scale meshes: verifies the
// two-sided estimator sandwich and the auxiliary-solution inequalities for
// the given (prefix size, parameter) pairs.
std::vector<EffectivityRow> effectivity_study(const ParametricOCP& ocp, const RBSpace& rb,
                                              const std::vector<std::pair<int, Mu>>& pairs,
                                              const SolverOptions& solver_opts,
                                              FullSolveCache* cache = nullptr);

// Fill distance max_{mu in box} min_{mu' in samples} |mu - mu'|; exact in 1D,
// dense-grid approximation in 2D (diagnostic use).
double fill_distance(const std::vector<std::pair<double, double>>& box,
                     const std::vector<Mu>& samples);

}  // namespace rbocp

#endif  // RBOCP_GREEDY_HPP
