#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dks/instance.hpp"
#include "dks/sdp.hpp"

namespace dks {

struct LpDensestResult {
  double value = 0;       // max over non-empty W of rho(W)/|W|
  VertexSubset witness;   // a subset attaining it
};

// Exact maximum subgraph density via binary search on the density
// threshold with a max-flow feasibility test, followed by a final
// improvement loop so the returned witness is optimal.
LpDensestResult densest_subgraph(const WeightedGraph& graph);

struct LpFeasibilityReport {
  bool defined = true;      // false when the outer vectors carry zero mass
  double max_violation = 0; // over the density LP constraints
  double lp_objective = 0;
  double densest_value = 0;
  bool objective_ok = true; // lp_objective <= densest_value + 1e-6
};

// Maps a Gram block on the non-planted vertices to the density LP
// (x_ij = G_ij / sum G_ii, y_i = G_ii / sum G_ii) and reports the largest
// constraint violation plus the objective comparison.
LpFeasibilityReport check_lp_feasibility_map(const WeightedGraph& outer,
                                             const Eigen::MatrixXd& outer_gram);

struct BruteForceResult {
  VertexSubset set;
  double value = 0;
};

// Exact densest-k-subgraph by subset enumeration.  Ties resolve to the
// lexicographically smallest subset.
BruteForceResult brute_force_dks(const WeightedGraph& graph, int k, int max_n = 22);

// Largest absolute eigenvalue of a symmetric matrix, relative accuracy
// 1e-9 (shifted power iteration at both spectrum ends, full
// eigendecomposition as fallback).
double spectral_norm(const Eigen::MatrixXd& sym);

struct ExpanderCertificate {
  bool pass = false;
  bool regular = false;
  double lambda1 = 0;        // largest adjacency eigenvalue
  double max_abs_rest = 0;   // max |lambda_i| over i >= 2
};

ExpanderCertificate certify_expander(const WeightedGraph& graph, double d_prime, double lambda);

struct CalibrationResult {
  double xi = 0;               // max over trials of ||B|| / sqrt(n p)
  std::vector<double> ratios;  // per-trial ratios
};

// Empirical spectral constant for centered Bernoulli cross blocks.
CalibrationResult calibrate_xi(int n, int k, double p, int trials, std::uint64_t seed);

struct AuditReport {
  // The three-way split of 2*objective over S x S, S x (V\S) (one
  // orientation) and (V\S) x (V\S).
  double mass_ss = 0;
  double mass_cross = 0;
  double mass_outer = 0;
  double mean_vertex_norm = 0;  // E over S of G_ii
  double mean_edge_inner = 0;   // weighted mean of G_ij over planted edges
  double bound_cross = 0;       // model bound on mass_cross
  double bound_outer = 0;       // model bound on mass_outer
  double eta = 0;               // eta or eta' per model kind
  bool mass_identity_ok = false;
  bool cross_ok = false;
  bool outer_ok = false;
  bool ss_ok = true;            // Reg kinds: mass_ss <= k d E||X||^2
  bool inner_ok = false;        // non-Reg: mean_edge_inner >= 1 - eta;
                                // Reg: mean_vertex_norm >= 1 - eta'
  bool all_pass() const { return cross_ok && outer_ok && ss_ok && inner_ok && mass_identity_ok; }
};

AuditReport audit_mass_split(const PlantedInstance& instance, const SdpSolution& solution);

struct QuadraticFormCheck {
  double lhs = 0;  // U^T A U
  double rhs = 0;  // ((d'-lambda)/m) (sum U)^2 + lambda ||U||^2
  bool pass = false;
};

QuadraticFormCheck quadratic_form_bound_check(const WeightedGraph& expander, double d_prime,
                                              double lambda, const Eigen::VectorXd& U);

// Pointwise sqrt(x+y) > y/(1-x) over the open triangle {x,y>0, x+y<1},
// plus tau >= tau' on a grid of valid Gamma/GammaReg parameters.
bool tau_comparison_check(int grid_resolution, int param_grid_resolution = 10);

// Shared symmetric eigendecomposition helpers (LAPACK backed).
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& sym);
void symmetric_eigendecomposition(const Eigen::MatrixXd& sym, Eigen::VectorXd& values,
                                  Eigen::MatrixXd& vectors);

}  // namespace dks
