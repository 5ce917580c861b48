// Copyright (c) 2026 the rbocp authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "rbocp/io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rbocp {

static_assert(std::endian::native == std::endian::little,
              "artifact files are little-endian; byte swapping is not implemented");

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text, const std::string& origin) {
  IniFile ini;
  ini.origin_ = origin;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    ini.data_[section][key] = Entry{value, line_no};
  }
  return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const IniFile::Entry* IniFile::find(const std::string& section, const std::string& key) const {
  const auto sec = data_.find(section);
  if (sec == data_.end()) return nullptr;
  const auto it = sec->second.find(key);
  return it == sec->second.end() ? nullptr : &it->second;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": `" + key +
                      "` is not a number: " + e->value);
  }
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ":" + std::to_string(e->line) + ": `" + key +
                      "` is not an integer: " + e->value);
  }
}

RunConfig RunConfig::load(const std::string& path) {
  const IniFile ini = IniFile::parse_file(path);
  RunConfig cfg;
  cfg.problem = ini.get_string("problem", "name", cfg.problem);
  if (cfg.problem != "thermal-block" && cfg.problem != "graetz")
    throw ConfigError(path + ": unknown problem `" + cfg.problem +
                      "` (expected thermal-block or graetz)");
  cfg.alpha = ini.get_double("problem", "alpha", cfg.alpha);
  cfg.nx = ini.get_int("mesh", "nx", 0);
  cfg.ny = ini.get_int("mesh", "ny", 0);
  cfg.train_size = ini.get_string("greedy", "train_size", "");
  cfg.eps_tol = ini.get_double("greedy", "eps_tol", cfg.eps_tol);
  cfg.n_max = ini.get_int("greedy", "n_max", cfg.n_max);
  cfg.estimator = ini.get_string("greedy", "estimator", cfg.estimator);
  if (cfg.estimator != "relative" && cfg.estimator != "uyp")
    throw ConfigError(path + ": estimator must be `relative` or `uyp`");
  cfg.dependence_threshold =
      ini.get_double("greedy", "dependence_threshold", cfg.dependence_threshold);
  cfg.stall_threshold = ini.get_double("greedy", "stall_threshold", cfg.stall_threshold);
  cfg.test_size = ini.get_string("test", "test_size", "");
  cfg.solver.newton_tol = ini.get_double("solver", "newton_tol", cfg.solver.newton_tol);
  cfg.solver.max_newton_iters = ini.get_int("solver", "max_newton_iters", cfg.solver.max_newton_iters);
  cfg.solver.oracle_step = ini.get_double("solver", "oracle_step", cfg.solver.oracle_step);
  cfg.solver.oracle_tol = ini.get_double("solver", "oracle_tol", cfg.solver.oracle_tol);
  cfg.solver.oracle_max_iters =
      ini.get_int("solver", "oracle_max_iters", cfg.solver.oracle_max_iters);
  cfg.solver.oracle_subdiv = ini.get_int("solver", "oracle_subdiv", cfg.solver.oracle_subdiv);
  cfg.out_dir = ini.get_string("output", "out_dir", cfg.out_dir);
  cfg.cache_dir = ini.get_string("output", "cache_dir", cfg.cache_dir);
  cfg.seed = static_cast<unsigned int>(ini.get_int("output", "seed", static_cast<int>(cfg.seed)));
  cfg.jobs = ini.get_int("output", "jobs", cfg.jobs);
  return cfg;
}

ParametricOCP RunConfig::make_problem() const {
  if (problem == "thermal-block") {
    const int mx = nx > 0 ? nx : 64;
    const int my = ny > 0 ? ny : 64;
    return thermal_block(mx, my, alpha);
  }
  const int mx = nx > 0 ? nx : 100;
  const int my = ny > 0 ? ny : 40;
  return graetz_flow(mx, my, alpha);
}

namespace {

std::pair<int, int> parse_grid_size(const std::string& s, int d1, int d2) {
  if (s.empty()) return {d1, d2};
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) return {std::stoi(s), d2};
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad grid size: " + s);
  }
}

}  // namespace

std::vector<Mu> RunConfig::make_train_set() const {
  if (problem == "thermal-block") {
    const auto [n, unused] = parse_grid_size(train_size, 100, 1);
    (void)unused;
    return thermal_train_grid(n);
  }
  const auto [n1, n2] = parse_grid_size(train_size, 30, 30);
  return graetz_train_grid(n1, n2);
}

std::vector<Mu> RunConfig::make_test_set() const {
  if (problem == "thermal-block") {
    const auto [n, unused] = parse_grid_size(test_size, 125, 1);
    (void)unused;
    return thermal_test_grid(n);
  }
  const auto [n1, n2] = parse_grid_size(test_size, 10, 5);
  return graetz_test_grid(n1, n2);
}

GreedyConfig RunConfig::make_greedy_config() const {
  GreedyConfig g;
  g.train = make_train_set();
  g.eps_tol = eps_tol;
  g.n_max = n_max;
  g.estimator =
      estimator == "uyp" ? EstimatorKind::AbsoluteUyp : EstimatorKind::RelativeControl;
  g.dependence_threshold = dependence_threshold;
  g.stall_threshold = stall_threshold;
  g.jobs = jobs;
  return g;
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string format_mu(const Mu& mu) {
  std::string out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (i) out += ",";
    out += format_sci(mu[i]);
  }
  return out;
}

namespace {

constexpr char kBasisMagic[4] = {'R', 'B', 'B', '1'};
constexpr std::uint32_t kBasisVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void write_basis(const std::string& path, const Eigen::MatrixXd& phi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write basis file: " + path);
  out.write(kBasisMagic, 4);
  write_u32(out, kBasisVersion);
  write_u32(out, static_cast<std::uint32_t>(phi.rows()));
  write_u32(out, static_cast<std::uint32_t>(phi.cols()));
  for (Eigen::Index c = 0; c < phi.cols(); ++c)
    out.write(reinterpret_cast<const char*>(phi.col(c).data()),
              static_cast<std::streamsize>(sizeof(double)) * phi.rows());
  if (!out) throw std::runtime_error("short write on basis file: " + path);
}

Eigen::MatrixXd read_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read basis file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kBasisMagic, 4) != 0)
    throw std::runtime_error("bad basis file magic: " + path);
  const std::uint32_t version = read_u32(in);
  if (version != kBasisVersion) throw std::runtime_error("unsupported basis file version");
  const std::uint32_t rows = read_u32(in);
  const std::uint32_t cols = read_u32(in);
  Eigen::MatrixXd phi(rows, cols);
  for (std::uint32_t c = 0; c < cols; ++c)
    in.read(reinterpret_cast<char*>(phi.col(c).data()),
            static_cast<std::streamsize>(sizeof(double)) * rows);
  if (!in) throw std::runtime_error("short read on basis file: " + path);
  return phi;
}

void write_samples_csv(const std::string& path, const RBSpace& rb, int param_dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "idx";
  for (int d = 1; d <= param_dim; ++d) out << ",mu" << d;
  out << ",cols_accepted,col_offset\n";
  int prev = 0;
  for (int i = 0; i < rb.samples(); ++i) {
    out << (i + 1) << "," << format_mu(rb.sampled[static_cast<std::size_t>(i)]) << ","
        << (rb.col_offsets[static_cast<std::size_t>(i)] - prev) << ","
        << rb.col_offsets[static_cast<std::size_t>(i)] << "\n";
    prev = rb.col_offsets[static_cast<std::size_t>(i)];
  }
}

SampleList read_samples_csv(const std::string& path, int param_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  SampleList list;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // idx
    Mu mu;
    for (int d = 0; d < param_dim; ++d) {
      std::getline(row, cell, ',');
      mu.push_back(std::stod(cell));
    }
    std::getline(row, cell, ',');  // cols_accepted
    std::getline(row, cell, ',');  // col_offset
    list.sampled.push_back(std::move(mu));
    list.col_offsets.push_back(std::stoi(cell));
  }
  return list;
}

void write_history_csv(const std::string& path, const GreedyHistory& hist, int param_dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "N";
  for (int d = 1; d <= param_dim; ++d) out << ",mu" << d;
  out << ",max_estimator,dim,seconds,winner_rel_error,termination\n";
  for (std::size_t i = 0; i < hist.iters.size(); ++i) {
    const GreedyIterRecord& r = hist.iters[i];
    out << r.n << "," << format_mu(r.selected) << "," << format_sci(r.max_estimator) << ","
        << r.dim << "," << format_sci(r.seconds) << ",";
    if (r.winner_rel_error) out << format_sci(*r.winner_rel_error);
    out << "," << (i + 1 == hist.iters.size() ? to_string(hist.termination) : "") << "\n";
  }
}

void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows, int param_dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "N";
  for (int d = 1; d <= param_dim; ++d) out << ",mu" << d;
  out << ",rel_error,rel_bound,delta_uyp,delta_lower,ry_norm,rp_norm,proviso_ok\n";
  for (const ResultRow& r : rows) {
    out << r.n << "," << format_mu(r.mu) << "," << format_sci(r.rel_error) << ","
        << format_sci(r.rel_bound) << "," << format_sci(r.delta_uyp) << ",";
    if (r.delta_lower) out << format_sci(*r.delta_lower);
    out << "," << format_sci(r.r_y_norm) << "," << format_sci(r.r_p_norm) << ","
        << (r.proviso_ok ? 1 : 0) << "\n";
  }
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& summary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "N,max_rel_error,max_rel_bound\n";
  for (const SummaryRow& r : summary)
    out << r.n << "," << format_sci(r.max_rel_error) << "," << format_sci(r.max_rel_bound) << "\n";
}

void write_effectivity_csv(const std::string& path, const std::vector<EffectivityRow>& rows,
                           int param_dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "N";
  for (int d = 1; d <= param_dim; ++d) out << ",mu" << d;
  out << ",err_u,err_y,err_p,err_sum,delta_lower,delta_uyp,sandwich_ok,"
         "y_yaux_lhs,y_yaux_rhs,p_paux_lhs,p_paux_rhs,"
         "yaux_lo,yaux_mid,yaux_hi,paux_lo,paux_mid,paux_hi,lemma_ok\n";
  for (const EffectivityRow& r : rows) {
    out << r.n << "," << format_mu(r.mu) << "," << format_sci(r.err_u) << ","
        << format_sci(r.err_y) << "," << format_sci(r.err_p) << "," << format_sci(r.err_sum) << ","
        << format_sci(r.delta_lower) << "," << format_sci(r.delta_uyp) << ","
        << (r.sandwich_ok ? 1 : 0) << "," << format_sci(r.y_yaux_lhs) << ","
        << format_sci(r.y_yaux_rhs) << "," << format_sci(r.p_paux_lhs) << ","
        << format_sci(r.p_paux_rhs) << "," << format_sci(r.yaux_lo) << ","
        << format_sci(r.yaux_mid) << "," << format_sci(r.yaux_hi) << ","
        << format_sci(r.paux_lo) << "," << format_sci(r.paux_mid) << ","
        << format_sci(r.paux_hi) << "," << (r.lemma_ok ? 1 : 0) << "\n";
  }
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

constexpr std::uint32_t kCacheMagic = 0x52424331;  // "RBC1"

}  // namespace

FullSolveCache::FullSolveCache(std::string dir, const ParametricOCP& ocp,
                               const SolverOptions& opts)
    : dir_(std::move(dir)), opts_(opts) {
  std::ostringstream key;
  key << ocp.name << "|v" << ocp.mesh.n_vertices() << "|t" << ocp.mesh.n_triangles() << "|alpha="
      << format_sci(ocp.alpha) << "|tol=" << format_sci(opts.newton_tol)
      << "|maxit=" << opts.max_newton_iters;
  prefix_ = key.str();
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::string FullSolveCache::key_for(const Mu& mu) const { return prefix_ + "|mu=" + format_mu(mu); }

std::optional<CachedSolve> FullSolveCache::load(const std::string& key) const {
  if (dir_.empty()) return std::nullopt;
  const std::string path = dir_ + "/" + [&] {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(key));
    return std::string(buf);
  }() + ".bin";
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  if (read_u32(in) != kCacheMagic) return std::nullopt;
  const std::uint32_t key_len = read_u32(in);
  std::string stored(key_len, '\0');
  in.read(stored.data(), key_len);
  if (!in || stored != key) return std::nullopt;  // hash collision or stale layout
  const std::uint32_t n = read_u32(in);
  CachedSolve value;
  value.iterations = static_cast<int>(read_u32(in));
  value.converged = read_u32(in) != 0;
  in.read(reinterpret_cast<char*>(&value.active_measure), sizeof(double));
  value.y.resize(n);
  value.p.resize(n);
  in.read(reinterpret_cast<char*>(value.y.data()), static_cast<std::streamsize>(sizeof(double)) * n);
  in.read(reinterpret_cast<char*>(value.p.data()), static_cast<std::streamsize>(sizeof(double)) * n);
  if (!in) return std::nullopt;
  return value;
}

void FullSolveCache::store(const std::string& key, const CachedSolve& value) const {
  if (dir_.empty()) return;
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(key));
  const std::string path = dir_ + "/" + buf + ".bin";
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;  // cache is best-effort
    write_u32(out, kCacheMagic);
    write_u32(out, static_cast<std::uint32_t>(key.size()));
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    write_u32(out, static_cast<std::uint32_t>(value.y.size()));
    write_u32(out, static_cast<std::uint32_t>(value.iterations));
    write_u32(out, value.converged ? 1u : 0u);
    out.write(reinterpret_cast<const char*>(&value.active_measure), sizeof(double));
    out.write(reinterpret_cast<const char*>(value.y.data()),
              static_cast<std::streamsize>(sizeof(double)) * value.y.size());
    out.write(reinterpret_cast<const char*>(value.p.data()),
              static_cast<std::streamsize>(sizeof(double)) * value.p.size());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
}

OCPSolution FullSolveCache::get_or_solve(const ParametricOCP& ocp, const Mu& mu) {
  const std::string key = key_for(mu);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memory_.find(key);
    if (it == memory_.end()) {
      if (auto disk = load(key)) {
        it = memory_.emplace(key, std::move(*disk)).first;
      }
    }
    if (it != memory_.end()) {
      ++hits_;
      OCPSolution sol;
      sol.y = it->second.y;
      sol.p = it->second.p;
      sol.iterations = it->second.iterations;
      sol.converged = it->second.converged;
      sol.u = control_from_adjoint(ocp, mu, ocp.lift(sol.p));
      sol.active_measure = it->second.active_measure;
      sol.final_states_stable = true;
      return sol;
    }
    ++misses_;
  }
  OCPSolution sol = solve_full(ocp, mu, opts_);
  CachedSolve value{sol.y, sol.p, sol.iterations, sol.converged, sol.active_measure};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    memory_.emplace(key, value);
  }
  store(key, value);
  return sol;
}

OCPSolution FullSolveCache::solve_fresh(const ParametricOCP& ocp, const Mu& mu) const {
  return solve_full(ocp, mu, opts_);
}

}  // namespace rbocp
