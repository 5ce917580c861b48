// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: greedy training, test-set evaluation, exact-constants
// effectivity studies, solver cross-checks, and decay diagnostics. All plot
// data is emitted as CSV (gnuplot-friendly column layout).

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "rbocp/control.hpp"
#include "rbocp/greedy.hpp"
#include "rbocp/io.hpp"
#include "rbocp/solver.hpp"

namespace {

using namespace rbocp;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitViolation = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_override;
  std::string basis_dir;
  int jobs = -1;
  std::string estimator_override;
  bool exact_constants = false;
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = RunConfig::load(args.config_path);
  if (!args.out_override.empty()) cfg.out_dir = args.out_override;
  if (args.jobs >= 0) cfg.jobs = args.jobs;
  if (!args.estimator_override.empty()) {
    if (args.estimator_override != "relative" && args.estimator_override != "uyp")
      throw ConfigError("--estimator must be `relative` or `uyp`");
    cfg.estimator = args.estimator_override;
  }
  return cfg;
}

RBSpace load_rb(const ParametricOCP& ocp, const std::string& dir) {
  RBSpace rb;
  rb.phi = read_basis(dir + "/basis.bin");
  if (rb.phi.rows() != ocp.n_free())
    throw ConfigError("basis dimension " + std::to_string(rb.phi.rows()) +
                      " does not match the mesh (" + std::to_string(ocp.n_free()) + " dofs)");
  rb.kphi = ocp.y_gram->op.mat * rb.phi;
  SampleList samples = read_samples_csv(dir + "/sampled.csv", ocp.param_dim);
  rb.sampled = std::move(samples.sampled);
  rb.col_offsets = std::move(samples.col_offsets);
  if (rb.col_offsets.empty() || rb.col_offsets.back() != rb.cols())
    throw ConfigError("sampled.csv does not match basis.bin in " + dir);
  return rb;
}

int cmd_train(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const ParametricOCP ocp = cfg.make_problem();
  GreedyConfig greedy_cfg = cfg.make_greedy_config();
  greedy_cfg.jobs = cfg.jobs;
  FullSolveCache cache(cfg.cache_dir, ocp, cfg.solver);

  std::cout << "training " << ocp.name << " (dim Y = " << ocp.n_free() << ", "
            << greedy_cfg.train.size() << " training points)\n";
  auto [rb, hist] = greedy(ocp, greedy_cfg, cfg.solver, &cache);

  std::filesystem::create_directories(cfg.out_dir);
  write_basis(cfg.out_dir + "/basis.bin", rb.phi);
  write_samples_csv(cfg.out_dir + "/sampled.csv", rb, ocp.param_dim);
  write_history_csv(cfg.out_dir + "/history.csv", hist, ocp.param_dim);

  std::cout << "greedy finished: " << rb.samples() << " sampled parameters, basis dim "
            << rb.cols() << ", termination = " << to_string(hist.termination) << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const ParametricOCP ocp = cfg.make_problem();
  const std::string basis_dir = args.basis_dir.empty() ? cfg.out_dir : args.basis_dir;
  const RBSpace rb = load_rb(ocp, basis_dir);
  const std::vector<Mu> test = cfg.make_test_set();
  FullSolveCache cache(cfg.cache_dir, ocp, cfg.solver);

  EvalOptions eval_opts;
  eval_opts.jobs = cfg.jobs;
  eval_opts.exact_constants = args.exact_constants;
  std::cout << "evaluating " << rb.samples() << " basis prefixes on " << test.size()
            << " test points\n";
  const EvalTable table = evaluate_on_test_set(ocp, rb, test, cfg.solver, eval_opts, &cache);

  std::filesystem::create_directories(cfg.out_dir);
  for (int s = 1; s <= rb.samples(); ++s) {
    std::vector<ResultRow> rows;
    for (const ResultRow& r : table.rows)
      if (r.n == s) rows.push_back(r);
    write_rows_csv(cfg.out_dir + "/results_N" + std::to_string(s) + ".csv", rows, ocp.param_dim);
  }
  write_summary_csv(cfg.out_dir + "/summary.csv", table.summary);

  // Spot-check the cache against fresh solves.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, test.size() - 1);
  for (int check = 0; check < 3; ++check) {
    const Mu& mu = test[pick(rng)];
    const OCPSolution cached = cache.get_or_solve(ocp, mu);
    const OCPSolution fresh = cache.solve_fresh(ocp, mu);
    const double diff = (cached.p - fresh.p).norm() / (1.0 + fresh.p.norm());
    if (diff > 1e-9) {
      std::cerr << "CACHE VIOLATION: cached solve deviates from fresh solve by " << diff
                << " at mu = " << format_mu(mu) << "\n";
      return kExitViolation;
    }
  }

  int violations = 0;
  for (const ResultRow& r : table.rows)
    if (r.proviso_ok && r.rel_error > r.rel_bound * (1.0 + 1e-12)) ++violations;
  if (violations > 0) {
    std::cerr << "BOUND VIOLATION: " << violations
              << " rows exceed the certified relative bound; see " << cfg.out_dir << "\n";
    return kExitViolation;
  }
  std::cout << "evaluation written to " << cfg.out_dir << " (max rel error at final N = "
            << format_sci(table.summary.back().max_rel_error) << ")\n";
  return 0;
}

int cmd_effectivity(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const ParametricOCP ocp = cfg.make_problem();
  if (ocp.n_free() > 2500)
    throw ConfigError("effectivity needs the dense eigen oracle; use a mesh with at most "
                      "2500 free dofs");
  GreedyConfig greedy_cfg = cfg.make_greedy_config();
  greedy_cfg.jobs = cfg.jobs;
  FullSolveCache cache(cfg.cache_dir, ocp, cfg.solver);
  auto [rb, hist] = greedy(ocp, greedy_cfg, cfg.solver, &cache);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> pick_n(1, rb.samples());
  std::vector<std::pair<int, Mu>> pairs;
  for (int i = 0; i < 20; ++i) {
    Mu mu;
    for (const auto& [lo, hi] : ocp.box)
      mu.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
    pairs.emplace_back(pick_n(rng), std::move(mu));
  }
  const std::vector<EffectivityRow> rows = effectivity_study(ocp, rb, pairs, cfg.solver, &cache);

  std::filesystem::create_directories(cfg.out_dir);
  write_effectivity_csv(cfg.out_dir + "/effectivity.csv", rows, ocp.param_dim);

  int violations = 0;
  for (const EffectivityRow& r : rows)
    if (!r.sandwich_ok || !r.lemma_ok) ++violations;
  if (violations > 0) {
    std::cerr << "EFFECTIVITY VIOLATION: " << violations << " of " << rows.size()
              << " sampled pairs failed; see " << cfg.out_dir << "/effectivity.csv\n";
    return kExitViolation;
  }
  std::cout << "effectivity: all " << rows.size() << " sampled pairs satisfy the two-sided "
            << "bounds; written to " << cfg.out_dir << "/effectivity.csv\n";
  return 0;
}

int cmd_oracle_check(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  // Tiny mesh regardless of the configured sizes.
  const ParametricOCP ocp = cfg.problem == "thermal-block" ? thermal_block(8, 8, cfg.alpha)
                                                           : graetz_flow(25, 10, cfg.alpha);
  std::vector<Mu> sweep;
  for (int i = 0; i < 5; ++i) {
    Mu mu;
    for (const auto& [lo, hi] : ocp.box) mu.push_back(lo + (hi - lo) * i / 4.0);
    sweep.push_back(std::move(mu));
  }

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir + "/oracle_check.csv");
  out << "mu,rel_diff,pdas_iters,pg_iters\n";
  double worst = 0.0;
  for (const Mu& mu : sweep) {
    const OCPSolution pdas = solve_full(ocp, mu, cfg.solver);
    const OCPSolution pg =
        projected_gradient_oracle(ocp, mu, cfg.solver.oracle_step, cfg.solver.oracle_max_iters,
                                  cfg.solver.oracle_tol, cfg.solver.oracle_subdiv);
    const double norm = control_norm(ocp, mu, pdas.u);
    const double diff = control_error(ocp, mu, pdas.u, pg.u) / (norm > 0 ? norm : 1.0);
    worst = std::max(worst, diff);
    out << "\"" << format_mu(mu) << "\"," << format_sci(diff) << "," << pdas.iterations << ","
        << pg.iterations << "\n";
  }
  std::cout << "oracle check: max relative control difference = " << format_sci(worst) << "\n";
  if (worst > 1e-5) {
    std::cerr << "ORACLE DISAGREEMENT beyond 1e-5\n";
    return kExitViolation;
  }
  return 0;
}

int cmd_decay(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const ParametricOCP ocp = cfg.make_problem();
  const std::string basis_dir = args.basis_dir.empty() ? cfg.out_dir : args.basis_dir;
  const RBSpace rb = load_rb(ocp, basis_dir);
  const std::vector<Mu> test = cfg.make_test_set();
  FullSolveCache cache(cfg.cache_dir, ocp, cfg.solver);

  EvalOptions eval_opts;
  eval_opts.jobs = cfg.jobs;
  const EvalTable table = evaluate_on_test_set(ocp, rb, test, cfg.solver, eval_opts, &cache);

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir + "/decay.csv");
  out << "N,h_N,max_rel_error\n";
  for (int s = 1; s <= rb.samples(); ++s) {
    const std::vector<Mu> prefix(rb.sampled.begin(), rb.sampled.begin() + s);
    out << s << "," << format_sci(fill_distance(ocp.box, prefix)) << ","
        << format_sci(table.summary[static_cast<std::size_t>(s - 1)].max_rel_error) << "\n";
  }
  std::cout << "decay diagnostic written to " << cfg.out_dir << "/decay.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified reduced-basis solver for control-constrained elliptic optimal control"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* cmd, bool with_basis) {
    cmd->add_option("--config", args.config_path, "INI config file")->required();
    cmd->add_option("--out", args.out_override, "output directory override");
    cmd->add_option("--jobs", args.jobs, "parallel sweep width (default: all cores)");
    cmd->add_option("--estimator", args.estimator_override, "relative | uyp");
    cmd->add_flag("--exact-constants", args.exact_constants,
                  "use dense eigen-computed constants (desk-scale meshes)");
    if (with_basis) cmd->add_option("--basis", args.basis_dir, "trained artifact directory");
  };

  CLI::App* train = app.add_subcommand("train", "run the greedy basis construction");
  CLI::App* evaluate = app.add_subcommand("evaluate", "errors and bounds over the test set");
  CLI::App* effectivity = app.add_subcommand("effectivity", "two-sided bound study (small mesh)");
  CLI::App* oracle = app.add_subcommand("oracle-check", "PDAS vs projected-gradient cross-check");
  CLI::App* decay = app.add_subcommand("decay", "fill-distance decay diagnostic");
  add_common(train, false);
  add_common(evaluate, true);
  add_common(effectivity, false);
  add_common(oracle, false);
  add_common(decay, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(args);
    if (evaluate->parsed()) return cmd_evaluate(args);
    if (effectivity->parsed()) return cmd_effectivity(args);
    if (oracle->parsed()) return cmd_oracle_check(args);
    if (decay->parsed()) return cmd_decay(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OutOfParameterBox& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver failure at mu = " << format_mu(e.mu) << ": " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
