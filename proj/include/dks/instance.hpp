#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dks/graph.hpp"

namespace dks {

enum class ModelKind { Exp, ExpReg, Gamma, GammaReg };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

inline bool is_reg_kind(ModelKind k) { return k == ModelKind::ExpReg || k == ModelKind::GammaReg; }
inline bool is_exp_kind(ModelKind k) { return k == ModelKind::Exp || k == ModelKind::ExpReg; }

struct ModelParams {
  ModelKind kind = ModelKind::Exp;
  int n = 0;          // total vertices
  int k = 0;          // planted size
  double d = 0;       // planted average (Reg kinds: exact) weighted degree
  double delta = 0;   // cross-edge density parameter
  double d_prime = 0; // outer expander degree (Exp kinds)
  double lambda = 0;  // outer expander spectral bound (Exp kinds)
  double gamma = 0;   // outer density bound parameter (Gamma kinds)
  double xi = 2.0;    // calibrated spectral constant
  double kappa = 1.0; // probability-floor constant

  double p() const { return delta * d / k; }

  // p below kappa log(n)/n: outside the proven w.h.p. range (advisory only).
  bool low_p_advisory() const;

  void validate() const;  // throws ParameterError on invariant violation
};

enum class AdversaryStrategy { None, RandomFraction, TargetHighDegree };

const char* to_string(AdversaryStrategy s);
AdversaryStrategy adversary_strategy_from_string(const std::string& s);

struct AdversarySpec {
  AdversaryStrategy strategy = AdversaryStrategy::None;
  double q_cross = 0.0;  // RandomFraction: deletion probability for cross edges
  double q_outer = 0.0;  // RandomFraction: deletion probability for outer edges
  int count = 0;         // TargetHighDegree: number of edges to delete
  std::uint64_t seed = 0;

  void validate() const;
};

struct PlantedInstance {
  WeightedGraph graph;
  VertexSubset planted;  // vertices 0..k-1
  ModelParams params;
  std::uint64_t seed = 0;
  // Step-1 / step-3 edges before any deletion, sorted lexicographically.
  std::vector<std::pair<int, int>> cross_edge_log;
  std::vector<std::pair<int, int>> outer_edge_log;
  // Edges the adversary removed, sorted lexicographically.
  std::vector<std::pair<int, int>> adversary_log;

  bool operator==(const PlantedInstance& o) const;
};

enum class CoreStyle { Regular, WeightedRandom };

// Regular: simple d-regular unit-weight graph (stub matching; dense degrees
// built as the complement of a sparse regular graph).  WeightedRandom:
// each pair kept with probability 1/2, uniform (0,1] weights rescaled by a
// single factor so the average weighted degree is exactly d.
WeightedGraph build_dense_core(int k, double d, CoreStyle style, std::uint64_t seed);

// Simple d'-regular graph certified to have all non-top adjacency
// eigenvalues within [-lambda_target, lambda_target]; resamples until the
// certificate passes.
WeightedGraph build_expander(int m, int d_prime, double lambda_target, std::uint64_t seed,
                             int max_retries = 64);

// Graph certified (via the exact densest-subgraph oracle) to have
// max_W rho(W)/|W| <= gamma*d.
WeightedGraph build_gamma_part(int m, double gamma, double d, std::uint64_t seed,
                               int max_retries = 64);

struct CrossEdgeResult {
  WeightedGraph graph;  // disjoint union of core (0..k-1) and outer (k..n-1) plus cross edges
  std::vector<std::pair<int, int>> log;
};

CrossEdgeResult plant_cross_edges(const WeightedGraph& core, const WeightedGraph& outer,
                                  double p, std::uint64_t seed);

PlantedInstance apply_adversary(const PlantedInstance& instance, const AdversarySpec& spec);

PlantedInstance generate(const ModelParams& params, const AdversarySpec& adversary,
                         std::uint64_t seed);

}  // namespace dks
