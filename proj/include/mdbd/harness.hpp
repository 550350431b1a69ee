#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mdbd/oracle.hpp"
#include "mdbd/serialization.hpp"

namespace mdbd {

struct RunConfig {
  std::string family = "secV";  // secV | regression | file:<path>
  int n_agents = 10;
  int n = 4;
  std::uint64_t seed = 7;
  double l1_coef = 0.1;
  int q = 2;

  double step = 1e-3;
  double horizon = 50.0;
  int record_every = 100;
  Scheme scheme = Scheme::ExplicitEuler;

  Algorithm algorithm = Algorithm::Mdbd;
  ProjectionMode projection_mode = ProjectionMode::Fast;

  bool run_oracle = false;
  double oracle_tol = 1e-7;

  std::string out_dir = "out";
};

RunConfig config_from_json_file(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

/// FNV-1a hash of the canonical config serialization; embedded in every
/// artifact so outputs can be traced to their configuration.
std::string config_hash(const RunConfig& cfg);

struct RunResult {
  int exit_code = 0;
  std::string summary_path;
  double final_eq_residual = 0.0;
  double final_ineq_residual = 0.0;
  double final_kkt_residual = 0.0;
  double final_gap = 0.0;
  double final_x_error = 0.0;  // ||x(T) - x*||, NaN without oracle
  bool diverged = false;
};

/// Generates (or loads) the instance, optionally solves the reference
/// saddle, integrates, and writes instance/saddle JSON, trajectory and
/// diagnostics CSVs, and a run-summary JSON into cfg.out_dir.
RunResult run_experiment(const RunConfig& cfg);

/// Writes the instance (and Slater certificate) JSON only.
std::string generate_artifact(const RunConfig& cfg);

struct BenchCell {
  int n = 0;
  std::string algorithm;
  double per_step_seconds = 0.0;
  // Time of the per-step operation that differs between the algorithms (the
  // mirror map vs the Euclidean projection across agents); the remaining
  // field assembly is shared and scales identically for all lanes.
  double output_map_seconds = 0.0;
  // NaN: not requested (empty CSV cell); -1: limit exceeded (">LIMIT").
  double to_threshold_seconds = std::numeric_limits<double>::quiet_NaN();
};

struct BenchOptions {
  std::vector<int> dims{4, 64, 256};
  int n_agents = 10;
  std::uint64_t seed = 7;
  int warmup_steps = 3;
  int timed_steps = 5;  // median over repetitions of this many field evals
  int repetitions = 5;
  bool to_threshold = false;
  double threshold = 1e-1;  // optimal error target for to-threshold timing
  double time_limit = 60.0;
  std::string out_path = "bench.csv";
};

std::vector<BenchCell> run_bench(const BenchOptions& opts);
void write_bench_csv(const std::string& path, const std::vector<BenchCell>& cells);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Re-checks connectivity, the Slater certificate, saddle feasibility and
/// the declared KKT residual. Returns one row per check.
std::vector<VerifyCheck> verify_artifacts(const std::string& instance_path,
                                          const std::string& saddle_path);

}  // namespace mdbd
