#pragma once

#include <optional>
#include <string>

#include "dks/graph.hpp"
#include "dks/instance.hpp"
#include "dks/sdp.hpp"

namespace dks {

// Recovery guarantee parameters derived from the model parameters: the
// slack eta (or eta' for the regular-core kinds), the threshold multiplier
// alpha, and the guarantee bound (valid only when it lands in (0,1)).
struct GuaranteeParams {
  ModelKind kind = ModelKind::Exp;
  double eta = 0.0;    // eta for Exp/Gamma, eta' for the Reg kinds
  double alpha = 0.0;  // 1/sqrt(3 eta) or 2/sqrt(eta')
  double bound = 0.0;  // 2 sqrt(3 eta) or 5 sqrt(eta')
  bool valid = false;  // bound in (0,1)
  bool bracket_positive = true;  // Reg kinds: sign of the derivation bracket

  // Alternate eta'/bound values from the statement-level formula that
  // drops the n factor; equal to eta/bound for non-Reg kinds.
  double eta_theorem = 0.0;
  double bound_theorem = 0.0;
};

struct EtaPrime {
  double value = 0.0;
  bool bracket_positive = true;
};

enum class ClauseFlag { Pass, Fail, NotApplicable };

std::string to_string(ClauseFlag flag);

struct RecoveryResult {
  VertexSubset T;
  VertexSubset Q;
  double rho_Q = 0.0;
  double rho_T_cap_S = 0.0;
  int size_T = 0;
  int size_Q_cap_S = 0;
  GuaranteeParams guarantee;

  // Guarantee clauses, evaluated against the planted target kd/2 with
  // solver-tolerance slack; NotApplicable when the guarantee is invalid
  // or the clause does not apply to the model kind.
  ClauseFlag density_ok = ClauseFlag::NotApplicable;
  ClauseFlag t_size_ok = ClauseFlag::NotApplicable;
  ClauseFlag t_cap_s_density_ok = ClauseFlag::NotApplicable;
  ClauseFlag q_cap_s_ok = ClauseFlag::NotApplicable;
};

// Closed-form eta for the Exp/Gamma kinds.
double compute_eta(const ModelParams& params);

// Closed-form eta' for the Reg kinds; bracket <= 0 flags the result
// instead of throwing.
EtaPrime compute_eta_prime(const ModelParams& params);

// eta/alpha/bound bundle for any kind.
GuaranteeParams guarantee_bounds(const ModelParams& params);

// Same bundle but with a caller-supplied eta (or eta') in place of the
// closed form; requires eta in (0,1).
GuaranteeParams guarantee_bounds_with_eta(ModelKind kind, double eta);

// T = {i : clamped G_ii >= 1 - alpha*eta}; requires alpha*eta < 1.
VertexSubset threshold_set(const SdpSolution& solution, double alpha, double eta);

// Prune T down to k vertices by repeatedly removing the vertex of minimum
// weighted degree in the current induced subgraph (ties: smallest index),
// or pad with non-members (by decreasing diag_hint when supplied, else by
// index) when |T| < k.
VertexSubset greedy_prune(const WeightedGraph& graph, const VertexSubset& T, int k,
                          const Eigen::VectorXd* diag_hint = nullptr);

// Full threshold-and-prune recovery with guarantee-clause evaluation
// against the hidden planted set. eta_override switches to manual mode.
RecoveryResult recover(const PlantedInstance& instance, const SdpSolution& solution,
                       std::optional<double> eta_override = std::nullopt);

}  // namespace dks
