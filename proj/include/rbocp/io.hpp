// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBOCP_IO_HPP
#define RBOCP_IO_HPP

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rbocp/greedy.hpp"
#include "rbocp/problems.hpp"
#include "rbocp/solver.hpp"

namespace rbocp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat INI-style config: `key = value` lines, `#` comments, [section] headers.
class IniFile {
 public:
  static IniFile parse_file(const std::string& path);
  static IniFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> data_;
  const Entry* find(const std::string& section, const std::string& key) const;
};

struct RunConfig {
  std::string problem = "thermal-block";
  int nx = 0, ny = 0;  // 0 = problem default
  double alpha = 1e-2;

  // greedy
  std::string train_size;  // "100" or "30x30"; empty = problem default
  double eps_tol = 1e-8;
  int n_max = 30;
  std::string estimator = "relative";  // relative | uyp
  double dependence_threshold = 1e-10;
  double stall_threshold = 1e-6;

  // test set
  std::string test_size;  // "125" or "10x5"; empty = problem default

  // solver
  SolverOptions solver;

  // output
  std::string out_dir = "out";
  std::string cache_dir = "cache";
  unsigned int seed = 12345;

  int jobs = 0;

  static RunConfig load(const std::string& path);

  ParametricOCP make_problem() const;
  std::vector<Mu> make_train_set() const;
  std::vector<Mu> make_test_set() const;
  GreedyConfig make_greedy_config() const;
};

// Scientific notation with 17 significant digits; reparses to the same bits.
std::string format_sci(double v);
std::string format_mu(const Mu& mu);  // comma-separated components

// Basis file: 16-byte header (magic "RBB1", u32 version, u32 n_full rows,
// u32 N columns), then column-contiguous float64, all little-endian.
void write_basis(const std::string& path, const Eigen::MatrixXd& phi);
Eigen::MatrixXd read_basis(const std::string& path);

void write_samples_csv(const std::string& path, const RBSpace& rb, int param_dim);
struct SampleList {
  std::vector<Mu> sampled;
  std::vector<int> col_offsets;
};
SampleList read_samples_csv(const std::string& path, int param_dim);

void write_history_csv(const std::string& path, const GreedyHistory& hist, int param_dim);
void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows, int param_dim);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& summary);
void write_effectivity_csv(const std::string& path, const std::vector<EffectivityRow>& rows,
                           int param_dim);

struct CachedSolve {
  Eigen::VectorXd y, p;
  int iterations = 0;
  bool converged = false;
  double active_measure = 0.0;
};

// Disk-backed store of full-order solves keyed by problem identity, solver
// options, and parameter. Keys are content strings; the hash only names the
// file and the stored key is verified on read. Thread-safe.
class FullSolveCache {
 public:
  FullSolveCache(std::string dir, const ParametricOCP& ocp, const SolverOptions& opts);

  OCPSolution get_or_solve(const ParametricOCP& ocp, const Mu& mu);
  // Bypasses the cache; used for spot checks.
  OCPSolution solve_fresh(const ParametricOCP& ocp, const Mu& mu) const;

  int hits() const { return hits_; }
  int misses() const { return misses_; }

 private:
  std::string key_for(const Mu& mu) const;
  std::optional<CachedSolve> load(const std::string& key) const;
  void store(const std::string& key, const CachedSolve& value) const;

  std::string dir_;
  std::string prefix_;
  SolverOptions opts_;
  mutable std::mutex mutex_;
  std::map<std::string, CachedSolve> memory_;
  int hits_ = 0, misses_ = 0;
};

}  // namespace rbocp

#endif  // RBOCP_IO_HPP
