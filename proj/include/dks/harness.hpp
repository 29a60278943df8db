#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dks/instance.hpp"
#include "dks/oracles.hpp"
#include "dks/rounding.hpp"
#include "dks/sdp.hpp"

namespace dks {

struct CalibrationSpec {
  int n = 400;
  int k = 100;
  double p = 0.05;
  int trials = 50;
  std::uint64_t seed = 0;
};

// Where the spectral constant xi comes from: a fixed value or a cached
// Monte-Carlo calibration.
struct XiSource {
  bool automatic = false;
  double fixed = 2.0;
  CalibrationSpec calibration;
};

// A single experiment description. Numeric model fields hold one or more
// values; the grid is their Cartesian product.
struct ExperimentConfig {
  ModelKind kind = ModelKind::Exp;
  std::vector<int> n{1000};
  std::vector<int> k{125};
  std::vector<double> d{100};
  std::vector<double> delta{0.005};
  std::vector<double> d_prime{0};
  std::vector<double> lambda{0};
  std::vector<double> gamma{0};
  double kappa = 1.0;
  AdversarySpec adversary;
  std::vector<std::uint64_t> seeds{1};
  double tol = 1e-5;
  long max_iter = 50000;
  XiSource xi;
  std::string out_dir = "results";

  void validate() const;
  std::vector<ModelParams> grid() const;  // xi left at the fixed default
};

ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// One pipeline run: everything needed to reproduce and audit it.
struct RunRow {
  ModelParams params;
  AdversarySpec adversary;
  std::uint64_t seed = 0;
  std::string error;  // non-empty when the run failed outright

  bool converged = false;
  double objective = 0;
  double dual_bound = 0;
  long iterations = 0;
  double residual_worst = 0;
  double tol = 0;

  bool has_recovery = false;
  RecoveryResult recovery;
  bool has_audit = false;
  AuditReport audit;

  bool has_brute = false;  // populated on tiny instances
  double brute_value = 0;
  bool brute_ok = false;

  double wall_time_s = 0;

  // One JSON object per line; wall time is the only non-deterministic
  // field and can be suppressed for byte-stable comparisons.
  std::string to_json_line(bool include_wall_time = true) const;
};

struct Aggregates {
  int rows = 0;
  int errors = 0;
  int converged = 0;
  int density_applicable = 0, density_pass = 0;
  int t_size_applicable = 0, t_size_pass = 0;
  int t_cap_s_applicable = 0, t_cap_s_pass = 0;
  int q_cap_s_applicable = 0, q_cap_s_pass = 0;
  int audit_rows = 0, audit_all_pass = 0;
  double mean_objective = 0;  // over converged rows

  std::string to_json_line() const;
};

Aggregates aggregate_rows(const std::vector<RunRow>& rows);

struct ResultRecord {
  std::vector<RunRow> rows;
  Aggregates aggregates;
};

// Resolves xi, caching calibration results in a keyed file under out_dir.
double resolve_xi(const XiSource& xi, const std::string& out_dir);

// generate -> solve -> recover -> audit for one grid point and seed; the
// row is appended to sink (when given) before returning. Non-convergence
// is recorded in the row, not thrown.
RunRow run_pipeline(const ExperimentConfig& config, const ModelParams& params,
                    std::uint64_t seed, std::ostream* sink);

// Single-grid-point convenience matching the CLI's one-shot mode.
RunRow run_pipeline(const ExperimentConfig& config, std::uint64_t seed,
                    std::ostream* sink = nullptr);

// Cartesian grid x seeds; rows plus recomputable aggregates, all appended
// to out_dir/results.jsonl.
ResultRecord sweep(const ExperimentConfig& config);

}  // namespace dks
