#include "dks/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "dks/errors.hpp"
#include "dks/oracles.hpp"
#include "dks/rng.hpp"

namespace dks {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Exp: return "Exp";
    case ModelKind::ExpReg: return "ExpReg";
    case ModelKind::Gamma: return "Gamma";
    case ModelKind::GammaReg: return "GammaReg";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "Exp") return ModelKind::Exp;
  if (s == "ExpReg") return ModelKind::ExpReg;
  if (s == "Gamma") return ModelKind::Gamma;
  if (s == "GammaReg") return ModelKind::GammaReg;
  throw ParameterError("unknown model kind: " + s);
}

const char* to_string(AdversaryStrategy s) {
  switch (s) {
    case AdversaryStrategy::None: return "none";
    case AdversaryStrategy::RandomFraction: return "random_fraction";
    case AdversaryStrategy::TargetHighDegree: return "target_high_degree";
  }
  return "?";
}

AdversaryStrategy adversary_strategy_from_string(const std::string& s) {
  if (s == "none") return AdversaryStrategy::None;
  if (s == "random_fraction") return AdversaryStrategy::RandomFraction;
  if (s == "target_high_degree") return AdversaryStrategy::TargetHighDegree;
  throw ParameterError("unknown adversary strategy: " + s);
}

bool ModelParams::low_p_advisory() const {
  return p() < kappa * std::log(static_cast<double>(n)) / n;
}

namespace {

bool is_integer(double x) { return std::floor(x) == x; }

}  // namespace

void ModelParams::validate() const {
  if (k <= 0 || k >= n) throw ParameterError("require 0 < k < n");
  if (!(d > 0)) throw ParameterError("require d > 0");
  if (!(delta > 0) || delta > 1) throw ParameterError("require 0 < delta <= 1");
  double prob = p();
  if (!(prob > 0) || prob > 1)
    throw ParameterError("require p = delta*d/k in (0, 1], got " + std::to_string(prob));
  if (is_exp_kind(kind)) {
    if (lambda < 0 || !(lambda < d_prime) || !(d_prime < n - k))
      throw ParameterError("Exp kinds require 0 <= lambda < d_prime < n-k");
    if (!is_integer(d_prime)) throw ParameterError("d_prime must be an integer");
  } else {
    if (!(gamma > 0)) throw ParameterError("Gamma kinds require gamma > 0");
  }
  if (is_reg_kind(kind)) {
    if (!is_integer(d) || !(d < k))
      throw ParameterError("Reg kinds require integer d with d < k");
    if ((static_cast<long long>(k) * static_cast<long long>(d)) % 2 != 0)
      throw ParameterError("Reg kinds require k*d even");
  }
  if (!(xi > 0)) throw ParameterError("require xi > 0");
  if (!(kappa > 0)) throw ParameterError("require kappa > 0");
}

void AdversarySpec::validate() const {
  if (strategy == AdversaryStrategy::RandomFraction) {
    if (q_cross < 0 || q_cross > 1 || q_outer < 0 || q_outer > 1)
      throw ParameterError("random_fraction requires q in [0, 1]");
  }
  if (strategy == AdversaryStrategy::TargetHighDegree && count < 0)
    throw ParameterError("target_high_degree requires count >= 0");
}

bool PlantedInstance::operator==(const PlantedInstance& o) const {
  auto params_eq = [](const ModelParams& a, const ModelParams& b) {
    return a.kind == b.kind && a.n == b.n && a.k == b.k && a.d == b.d && a.delta == b.delta &&
           a.d_prime == b.d_prime && a.lambda == b.lambda && a.gamma == b.gamma && a.xi == b.xi &&
           a.kappa == b.kappa;
  };
  return graph == o.graph && planted == o.planted && params_eq(params, o.params) &&
         seed == o.seed && cross_edge_log == o.cross_edge_log &&
         outer_edge_log == o.outer_edge_log && adversary_log == o.adversary_log;
}

namespace {

// Simple r-regular graph by sequential stub matching: draw random stub
// pairs, rejecting loops and repeated edges; dead ends restart the
// attempt.  Whole-graph resampling would almost never produce a simple
// graph beyond very small r.
WeightedGraph stub_matching_regular(int m, int r, Rng& rng, int max_attempts) {
  if (r == 0) return WeightedGraph(m);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(m) * r);
    for (int v = 0; v < m; ++v)
      for (int s = 0; s < r; ++s) stubs.push_back(v);
    std::unordered_set<PairKey> present;
    std::vector<std::pair<int, int>> edges;
    edges.reserve(stubs.size() / 2);
    bool dead_end = false;
    while (!stubs.empty()) {
      bool placed = false;
      for (int tries = 0; tries < 300; ++tries) {
        std::size_t a = static_cast<std::size_t>(rng.below(stubs.size()));
        std::size_t b = static_cast<std::size_t>(rng.below(stubs.size()));
        if (a == b) continue;
        int u = stubs[a], v = stubs[b];
        if (u == v) continue;
        PairKey key = pair_key(u, v);
        if (present.count(key)) continue;
        present.insert(key);
        edges.emplace_back(std::min(u, v), std::max(u, v));
        if (a < b) std::swap(a, b);
        stubs[a] = stubs.back();
        stubs.pop_back();
        stubs[b] = stubs.back();
        stubs.pop_back();
        placed = true;
        break;
      }
      if (!placed) {
        dead_end = true;
        break;
      }
    }
    if (dead_end) continue;
    WeightedGraph g(m);
    for (auto [u, v] : edges) g.set_weight(u, v, 1.0);
    return g;
  }
  throw RetryExhaustedError("stub matching could not complete a simple regular graph", 0.0);
}

WeightedGraph complement_unit(const WeightedGraph& g) {
  int m = g.vertex_count();
  WeightedGraph out(m);
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v)
      if (!g.has_edge(u, v)) out.set_weight(u, v, 1.0);
  return out;
}

WeightedGraph random_regular(int m, int r, Rng& rng, int max_attempts) {
  // Dense degrees go through the complement: the complement of a simple
  // r-regular graph on m vertices is simple (m-1-r)-regular.
  if (r > (m - 1) / 2) return complement_unit(stub_matching_regular(m, m - 1 - r, rng, max_attempts));
  return stub_matching_regular(m, r, rng, max_attempts);
}

}  // namespace

WeightedGraph build_dense_core(int k, double d, CoreStyle style, std::uint64_t seed) {
  if (k <= 0) throw ParameterError("core size must be positive");
  Rng rng(seed);
  if (style == CoreStyle::Regular) {
    if (!is_integer(d) || d < 1 || d >= k)
      throw ParameterError("regular core requires integer d with 1 <= d < k");
    int di = static_cast<int>(d);
    if ((static_cast<long long>(k) * di) % 2 != 0)
      throw ParameterError("regular core requires k*d even");
    return random_regular(k, di, rng, 200);
  }
  if (!(d > 0)) throw ParameterError("weighted_random core requires d > 0");
  if (k < 2) throw ParameterError("weighted_random core requires k >= 2");
  for (;;) {
    WeightedGraph g(k);
    double raw_total = 0;
    for (int u = 0; u < k; ++u)
      for (int v = u + 1; v < k; ++v)
        if (rng.bernoulli(0.5)) {
          double w = rng.uniform_pos();
          g.set_weight(u, v, w);
          raw_total += w;
        }
    if (raw_total <= 0) continue;
    double factor = (static_cast<double>(k) * d / 2.0) / raw_total;
    WeightedGraph scaled(k);
    for (const auto& [u, v, w] : g.sorted_edges()) scaled.set_weight(u, v, w * factor);
    return scaled;
  }
}

WeightedGraph build_expander(int m, int d_prime, double lambda_target, std::uint64_t seed,
                             int max_retries) {
  if (d_prime < 1 || d_prime >= m) throw ParameterError("require 1 <= d_prime < m");
  if ((static_cast<long long>(m) * d_prime) % 2 != 0)
    throw ParameterError("require m*d_prime even");
  if (!(lambda_target > 0)) throw ParameterError("require lambda_target > 0");
  if (max_retries < 1) throw ParameterError("require max_retries >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Rng rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(attempt)));
    WeightedGraph g = random_regular(m, d_prime, rng, 200);
    ExpanderCertificate cert = certify_expander(g, d_prime, lambda_target);
    if (cert.pass) return g;
    best = std::min(best, cert.max_abs_rest);
  }
  throw RetryExhaustedError("no sampled regular graph met the spectral bound " +
                                std::to_string(lambda_target),
                            best);
}

WeightedGraph build_gamma_part(int m, double gamma, double d, std::uint64_t seed,
                               int max_retries) {
  if (m < 1) throw ParameterError("require m >= 1");
  if (!(gamma * d > 0)) throw ParameterError("require gamma*d > 0");
  if (max_retries < 1) throw ParameterError("require max_retries >= 1");
  double cap = gamma * d;
  Rng rng(seed);

  // Any graph with an edge has max density >= 1/2 and one of disjoint
  // edges exactly 1/2, so low caps are met by construction and the
  // resampled random graph is reserved for caps that leave slack.
  if (cap < 0.5 - 1e-12) return WeightedGraph(m);
  if (cap < 2.0 / 3.0 - 1e-12) {
    std::vector<int> order;
    order.reserve(m);
    for (int v = 0; v < m; ++v) order.push_back(v);
    rng.shuffle(order);
    WeightedGraph g(m);
    for (int i = 0; i + 1 < m; i += 2) g.set_weight(order[i], order[i + 1], 1.0);
    return g;
  }

  double target_avg = std::min(2.0 * cap * 0.9, static_cast<double>(m - 1));
  double q = (m > 1) ? target_avg / (m - 1) : 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    WeightedGraph g(m);
    for (int u = 0; u < m; ++u)
      for (int v = u + 1; v < m; ++v)
        if (rng.bernoulli(q)) g.set_weight(u, v, 1.0);
    double value = (g.edge_count() == 0) ? 0.0 : densest_subgraph(g).value;
    if (value <= cap + 1e-9) return g;
    best = std::min(best, value);
  }
  throw RetryExhaustedError("no sampled graph met the density cap " + std::to_string(cap), best);
}

CrossEdgeResult plant_cross_edges(const WeightedGraph& core, const WeightedGraph& outer,
                                  double p, std::uint64_t seed) {
  if (p < 0 || p > 1) throw ParameterError("require p in [0, 1]");
  int k = core.vertex_count();
  int m = outer.vertex_count();
  CrossEdgeResult out;
  out.graph = WeightedGraph(k + m);
  for (const auto& [u, v, w] : core.sorted_edges()) out.graph.set_weight(u, v, w);
  for (const auto& [u, v, w] : outer.sorted_edges()) out.graph.set_weight(u + k, v + k, w);
  Rng rng(seed);
  for (int i = 0; i < k; ++i)
    for (int j = k; j < k + m; ++j)
      if (rng.bernoulli(p)) {
        out.graph.set_weight(i, j, 1.0);
        out.log.emplace_back(i, j);
      }
  return out;
}

namespace {

// Candidate edges the adversary may touch: logged cross/outer edges still
// present in the graph.
std::vector<std::pair<int, int>> present_candidates(const PlantedInstance& inst,
                                                    bool cross, bool outer) {
  std::vector<std::pair<int, int>> pool;
  if (cross)
    for (auto [u, v] : inst.cross_edge_log)
      if (inst.graph.has_edge(u, v)) pool.emplace_back(u, v);
  if (outer)
    for (auto [u, v] : inst.outer_edge_log)
      if (inst.graph.has_edge(u, v)) pool.emplace_back(u, v);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

PlantedInstance apply_adversary(const PlantedInstance& instance, const AdversarySpec& spec) {
  spec.validate();
  PlantedInstance out = instance;
  std::vector<std::pair<int, int>> deleted;

  if (spec.strategy == AdversaryStrategy::RandomFraction) {
    Rng rng(spec.seed);
    for (auto [u, v] : present_candidates(instance, true, false))
      if (rng.bernoulli(spec.q_cross)) deleted.emplace_back(u, v);
    for (auto [u, v] : present_candidates(instance, false, true))
      if (rng.bernoulli(spec.q_outer)) deleted.emplace_back(u, v);
  } else if (spec.strategy == AdversaryStrategy::TargetHighDegree) {
    auto pool = present_candidates(instance, true, true);
    for (int step = 0; step < spec.count && !pool.empty(); ++step) {
      std::size_t pick = 0;
      double best = -1;
      for (std::size_t idx = 0; idx < pool.size(); ++idx) {
        double score = out.graph.weighted_degree(pool[idx].first) +
                       out.graph.weighted_degree(pool[idx].second);
        if (score > best + 1e-15) {
          best = score;
          pick = idx;
        }
      }
      deleted.push_back(pool[pick]);
      out.graph.set_weight(pool[pick].first, pool[pick].second, 0.0);
      pool.erase(pool.begin() + static_cast<long>(pick));
    }
  }

  for (auto [u, v] : deleted) out.graph.set_weight(u, v, 0.0);
  deleted.insert(deleted.end(), instance.adversary_log.begin(), instance.adversary_log.end());
  std::sort(deleted.begin(), deleted.end());
  deleted.erase(std::unique(deleted.begin(), deleted.end()), deleted.end());
  out.adversary_log = std::move(deleted);
  return out;
}

PlantedInstance generate(const ModelParams& params, const AdversarySpec& adversary,
                         std::uint64_t seed) {
  params.validate();
  adversary.validate();
  int k = params.k;
  int m = params.n - params.k;

  CoreStyle style = is_reg_kind(params.kind) ? CoreStyle::Regular : CoreStyle::WeightedRandom;
  WeightedGraph core = build_dense_core(k, params.d, style, derive_seed(seed, 1));

  WeightedGraph outer =
      is_exp_kind(params.kind)
          ? build_expander(m, static_cast<int>(params.d_prime), params.lambda,
                           derive_seed(seed, 2))
          : build_gamma_part(m, params.gamma, params.d, derive_seed(seed, 2));

  CrossEdgeResult crossed = plant_cross_edges(core, outer, params.p(), derive_seed(seed, 3));

  PlantedInstance inst;
  inst.graph = std::move(crossed.graph);
  inst.planted = VertexSubset::range(0, k);
  inst.params = params;
  inst.seed = seed;
  inst.cross_edge_log = std::move(crossed.log);
  for (const auto& [u, v, w] : outer.sorted_edges()) inst.outer_edge_log.emplace_back(u + k, v + k);
  std::sort(inst.cross_edge_log.begin(), inst.cross_edge_log.end());
  std::sort(inst.outer_edge_log.begin(), inst.outer_edge_log.end());

  return apply_adversary(inst, adversary);
}

}  // namespace dks
