// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rbocp/control.hpp"
#include "rbocp/io.hpp"
#include "rbocp/parallel.hpp"

namespace rbocp {

const char* to_string(GreedyTermination t) {
  switch (t) {
    case GreedyTermination::Tolerance: return "tolerance";
    case GreedyTermination::MaxIterations: return "n_max";
    case GreedyTermination::LinearDependence: return "linear_dependence";
  }
  return "unknown";
}

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

OCPSolution checked_full_solve(const ParametricOCP& ocp, const Mu& mu, const SolverOptions& opts,
                               FullSolveCache* cache) {
  OCPSolution sol = cache ? cache->get_or_solve(ocp, mu) : solve_full(ocp, mu, opts);
  if (!sol.converged)
    throw SolverError("full-order solve did not reach the Newton tolerance", mu);
  return sol;
}

StabilityConstants constants_at(const ParametricOCP& ocp, const Mu& mu, bool exact) {
  if (!exact) return ocp.surrogate_constants(mu);
  const EvaluatedForms forms = evaluate_forms(ocp, mu);
  return exact_constants(forms.a, *ocp.y_gram, forms.b, forms.m_u);
}

bool mu_less(const Mu& a, const Mu& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::pair<RBSpace, GreedyHistory> greedy(const ParametricOCP& ocp, const GreedyConfig& cfg,
                                         const SolverOptions& solver_opts, FullSolveCache* cache) {
  if (cfg.train.empty()) throw std::invalid_argument("greedy: empty training set");
  if (cfg.eps_tol <= 0.0 || cfg.n_max < 1) throw std::invalid_argument("greedy: bad configuration");
  for (const Mu& mu : cfg.train) ocp.require_in_box(mu);

  RBSpace rb;
  GreedyHistory hist;
  const int n_train = static_cast<int>(cfg.train.size());
  std::vector<Eigen::VectorXd> warm(static_cast<std::size_t>(n_train));

  const Mu& mu1 = cfg.train[0];
  {
    const OCPSolution first = checked_full_solve(ocp, mu1, solver_opts, cache);
    const int accepted =
        extend_orthonormal(rb, *ocp.y_gram, {first.y, first.p}, cfg.dependence_threshold);
    if (accepted == 0) throw SolverError("greedy: initial snapshots are degenerate", mu1);
    rb.sampled.push_back(mu1);
    rb.col_offsets.push_back(rb.cols());
  }

  for (;;) {
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<double> values(static_cast<std::size_t>(n_train));
    parallel_for(n_train, cfg.jobs, [&](int i) {
      const Mu& mu = cfg.train[static_cast<std::size_t>(i)];
      const Eigen::VectorXd* p0 =
          cfg.warm_start && warm[static_cast<std::size_t>(i)].size() > 0
              ? &warm[static_cast<std::size_t>(i)]
              : nullptr;
      const ReducedSolution red = solve_reduced(ocp, rb.phi, mu, solver_opts, p0);
      if (!red.converged)
        throw SolverError("greedy: reduced solve did not reach the Newton tolerance", mu);
      if (cfg.warm_start) warm[static_cast<std::size_t>(i)] = red.p_lift;
      const Residuals res = compute_residuals(ocp, mu, red);
      const double norm_u = control_norm(ocp, mu, red.u);
      const EstimatorReport rep = estimate(ocp, mu, res, norm_u, ocp.surrogate_constants(mu));
      values[static_cast<std::size_t>(i)] = cfg.estimator == EstimatorKind::RelativeControl
                                                ? rep.relative_bound
                                                : rep.delta_uyp;
    });

    int winner = 0;
    for (int i = 1; i < n_train; ++i)
      if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(winner)]) winner = i;
    const double max_value = values[static_cast<std::size_t>(winner)];

    GreedyIterRecord row;
    row.n = rb.samples();
    row.selected = cfg.train[static_cast<std::size_t>(winner)];
    row.max_estimator = max_value;
    row.dim = rb.cols();

    if (max_value <= cfg.eps_tol) {
      row.seconds = seconds_since(t0);
      hist.iters.push_back(std::move(row));
      hist.termination = GreedyTermination::Tolerance;
      break;
    }
    if (rb.samples() >= cfg.n_max) {
      row.seconds = seconds_since(t0);
      hist.iters.push_back(std::move(row));
      hist.termination = GreedyTermination::MaxIterations;
      break;
    }

    const Mu& mu_win = cfg.train[static_cast<std::size_t>(winner)];
    const OCPSolution full = checked_full_solve(ocp, mu_win, solver_opts, cache);
    {
      const Eigen::VectorXd* p0 = cfg.warm_start && warm[static_cast<std::size_t>(winner)].size() > 0
                                      ? &warm[static_cast<std::size_t>(winner)]
                                      : nullptr;
      const ReducedSolution red = solve_reduced(ocp, rb.phi, mu_win, solver_opts, p0);
      const double norm_full = control_norm(ocp, mu_win, full.u);
      if (norm_full > 0.0)
        row.winner_rel_error = control_error(ocp, mu_win, full.u, red.u) / norm_full;
      row.winner_rel_bound = max_value;
    }
    // Dimension stall: both snapshots essentially inside the span already.
    const double novelty = std::max(snapshot_novelty(rb, *ocp.y_gram, full.y),
                                    snapshot_novelty(rb, *ocp.y_gram, full.p));
    if (novelty <= cfg.stall_threshold) {
      row.seconds = seconds_since(t0);
      hist.iters.push_back(std::move(row));
      hist.termination = GreedyTermination::LinearDependence;
      break;
    }
    const int accepted =
        extend_orthonormal(rb, *ocp.y_gram, {full.y, full.p}, cfg.dependence_threshold);
    row.seconds = seconds_since(t0);
    hist.iters.push_back(std::move(row));
    if (accepted == 0) {
      hist.termination = GreedyTermination::LinearDependence;
      break;
    }
    rb.sampled.push_back(mu_win);
    rb.col_offsets.push_back(rb.cols());
  }
  return {std::move(rb), std::move(hist)};
}

EvalTable evaluate_on_test_set(const ParametricOCP& ocp, const RBSpace& rb,
                               const std::vector<Mu>& test_set, const SolverOptions& solver_opts,
                               const EvalOptions& eval_opts, FullSolveCache* cache) {
  if (rb.samples() == 0) throw std::invalid_argument("evaluate_on_test_set: empty basis");
  for (const Mu& mu : test_set) ocp.require_in_box(mu);
  const int n_test = static_cast<int>(test_set.size());
  const int n_samples = rb.samples();

  EvalTable table;
  table.rows.resize(static_cast<std::size_t>(n_test * n_samples));

  parallel_for(n_test, eval_opts.jobs, [&](int ti) {
    const Mu& mu = test_set[static_cast<std::size_t>(ti)];
    const OCPSolution full = checked_full_solve(ocp, mu, solver_opts, cache);
    const double norm_full = control_norm(ocp, mu, full.u);
    const StabilityConstants constants = constants_at(ocp, mu, eval_opts.exact_constants);

    Eigen::VectorXd warm;
    for (int s = 1; s <= n_samples; ++s) {
      const Eigen::VectorXd* p0 = eval_opts.warm_start && warm.size() > 0 ? &warm : nullptr;
      const ReducedSolution red = solve_reduced(ocp, rb.prefix(s), mu, solver_opts, p0);
      if (!red.converged)
        throw SolverError("evaluate: reduced solve did not reach the Newton tolerance", mu);
      if (eval_opts.warm_start) warm = red.p_lift;
      const Residuals res = compute_residuals(ocp, mu, red);
      const double norm_red = control_norm(ocp, mu, red.u);
      const EstimatorReport rep = estimate(ocp, mu, res, norm_red, constants);

      ResultRow row;
      row.n = s;
      row.mu = mu;
      row.rel_error = norm_full > 0.0 ? control_error(ocp, mu, full.u, red.u) / norm_full : 0.0;
      row.rel_bound = rep.relative_bound;
      row.relative_valid = rep.relative_valid;
      row.delta_uyp = rep.delta_uyp;
      row.delta_lower = rep.delta_lower;
      row.r_y_norm = res.r_y_norm;
      row.r_p_norm = res.r_p_norm;
      row.proviso_ok = rep.proviso_ok;
      table.rows[static_cast<std::size_t>((s - 1) * n_test + ti)] = std::move(row);
    }
  });

  std::sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.n != b.n) return a.n < b.n;
    return mu_less(a.mu, b.mu);
  });

  table.summary.reserve(static_cast<std::size_t>(n_samples));
  for (int s = 1; s <= n_samples; ++s) {
    SummaryRow sum;
    sum.n = s;
    for (const ResultRow& row : table.rows) {
      if (row.n != s) continue;
      sum.max_rel_error = std::max(sum.max_rel_error, row.rel_error);
      if (row.relative_valid) sum.max_rel_bound = std::max(sum.max_rel_bound, row.rel_bound);
    }
    table.summary.push_back(sum);
  }
  return table;
}

std::vector<EffectivityRow> effectivity_study(const ParametricOCP& ocp, const RBSpace& rb,
                                              const std::vector<std::pair<int, Mu>>& pairs,
                                              const SolverOptions& solver_opts,
                                              FullSolveCache* cache) {
  std::vector<EffectivityRow> rows;
  rows.reserve(pairs.size());
  const GramMatrix& gram = *ocp.y_gram;

  for (const auto& [n_prefix, mu] : pairs) {
    const OCPSolution full = checked_full_solve(ocp, mu, solver_opts, cache);
    const ReducedSolution red = solve_reduced(ocp, rb.prefix(n_prefix), mu, solver_opts);
    const Residuals res = compute_residuals(ocp, mu, red);
    const StabilityConstants constants = constants_at(ocp, mu, true);
    const double norm_red = control_norm(ocp, mu, red.u);
    const EstimatorReport rep = estimate(ocp, mu, res, norm_red, constants);

    EffectivityRow row;
    row.n = n_prefix;
    row.mu = mu;
    row.err_u = control_error(ocp, mu, full.u, red.u);
    row.err_y = gram.norm(full.y - red.y_lift);
    row.err_p = gram.norm(full.p - red.p_lift);
    row.err_sum = row.err_u + row.err_y + row.err_p;
    row.delta_uyp = rep.delta_uyp;
    row.delta_lower = rep.delta_lower.value_or(0.0);
    const double slack = 1e-9;
    row.sandwich_ok = row.delta_lower <= row.err_sum * (1.0 + slack) + 1e-13 &&
                      row.err_sum <= row.delta_uyp * (1.0 + slack) + 1e-13;

    // Auxiliary solutions driven by the reduced data.
    const SparseOperator a = ocp.a.at(mu);
    const Eigen::VectorXd rhs_y = integrate_control(ocp, mu, red.u) + ocp.f.at(mu);
    const Eigen::VectorXd rhs_p = ocp.obs.at(mu).mat * red.y_lift - ocp.z_load.at(mu);
    const Factorization a_fact(a);
    const Factorization at_fact(a.transpose());
    const Eigen::VectorXd y_aux = a_fact.solve(rhs_y);
    const Eigen::VectorXd p_aux = at_fact.solve(rhs_p);

    row.y_yaux_lhs = gram.norm(full.y - y_aux);
    row.y_yaux_rhs = constants.kappa / constants.beta * row.err_u;
    row.p_paux_lhs = gram.norm(full.p - p_aux);
    row.p_paux_rhs = 1.0 / (ocp.rho1 * ocp.rho1 * constants.beta) * row.err_y;
    row.yaux_lo = res.r_y_norm / constants.gamma;
    row.yaux_mid = gram.norm(y_aux - red.y_lift);
    row.yaux_hi = res.r_y_norm / constants.beta;
    row.paux_lo = res.r_p_norm / constants.gamma;
    row.paux_mid = gram.norm(p_aux - red.p_lift);
    row.paux_hi = res.r_p_norm / constants.beta;

    auto leq = [slack](double lhs, double rhs) { return lhs <= rhs * (1.0 + slack) + 1e-13; };
    row.lemma_ok = leq(row.y_yaux_lhs, row.y_yaux_rhs) && leq(row.p_paux_lhs, row.p_paux_rhs) &&
                   leq(row.yaux_lo, row.yaux_mid) && leq(row.yaux_mid, row.yaux_hi) &&
                   leq(row.paux_lo, row.paux_mid) && leq(row.paux_mid, row.paux_hi);
    rows.push_back(std::move(row));
  }
  return rows;
}

double fill_distance(const std::vector<std::pair<double, double>>& box,
                     const std::vector<Mu>& samples) {
  if (samples.empty()) throw std::invalid_argument("fill_distance: no samples");
  if (box.size() == 1) {
    std::vector<double> s;
    s.reserve(samples.size());
    for (const Mu& mu : samples) s.push_back(mu[0]);
    std::sort(s.begin(), s.end());
    double h = std::max(s.front() - box[0].first, box[0].second - s.back());
    for (std::size_t i = 0; i + 1 < s.size(); ++i) h = std::max(h, 0.5 * (s[i + 1] - s[i]));
    return h;
  }
  // Dense-grid approximation; diagnostic only.
  const int grid = 201;
  double h = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double x = box[0].first + (box[0].second - box[0].first) * i / (grid - 1);
      const double y = box[1].first + (box[1].second - box[1].first) * j / (grid - 1);
      double best = std::numeric_limits<double>::infinity();
      for (const Mu& mu : samples) {
        const double dx = x - mu[0], dy = y - mu[1];
        best = std::min(best, std::hypot(dx, dy));
      }
      h = std::max(h, best);
    }
  }
  return h;
}

}  // namespace rbocp
