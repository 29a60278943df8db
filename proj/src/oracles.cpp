#include "dks/oracles.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "dks/errors.hpp"
#include "dks/rng.hpp"
#include "dks/rounding.hpp"

namespace dks {

// ---------------------------------------------------------------------------
// symmetric eigendecomposition helpers

namespace {

void run_dsyevd(Eigen::MatrixXd& a, Eigen::VectorXd& values, bool vectors) {
  lapack_int n = static_cast<lapack_int>(a.rows());
  values.resize(n);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, a.data(),
                                   n, values.data());
  if (info != 0) throw Error("symmetric eigendecomposition failed (info=" + std::to_string(info) + ")");
}

}  // namespace

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& sym) {
  Eigen::MatrixXd a = sym;
  Eigen::VectorXd values;
  run_dsyevd(a, values, false);
  return values;
}

void symmetric_eigendecomposition(const Eigen::MatrixXd& sym, Eigen::VectorXd& values,
                                  Eigen::MatrixXd& vectors) {
  vectors = sym;
  run_dsyevd(vectors, values, true);
}

// ---------------------------------------------------------------------------
// densest subgraph (max-flow feasibility test on the density threshold)

namespace {

class MaxFlow {
 public:
  MaxFlow(int n, double eps) : head_(n, -1), eps_(eps) {}

  void add_edge(int u, int v, double cap_uv, double cap_vu) {
    arcs_.push_back({v, head_[u], cap_uv});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], cap_vu});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
  }

  double run(int s, int t) {
    double flow = 0;
    while (bfs(s, t)) {
      iter_ = head_;
      for (;;) {
        double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= 0) break;
        flow += pushed;
      }
    }
    return flow;
  }

  // Vertices reachable from s in the residual network (the min-cut side).
  std::vector<char> source_side(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int e = head_[u]; e >= 0; e = arcs_[e].next)
        if (arcs_[e].cap > eps_ && !seen[arcs_[e].to]) {
          seen[arcs_[e].to] = 1;
          q.push(arcs_[e].to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    int next;
    double cap;
  };

  bool bfs(int s, int t) {
    level_.assign(head_.size(), -1);
    std::queue<int> q;
    q.push(s);
    level_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int e = head_[u]; e >= 0; e = arcs_[e].next)
        if (arcs_[e].cap > eps_ && level_[arcs_[e].to] < 0) {
          level_[arcs_[e].to] = level_[u] + 1;
          q.push(arcs_[e].to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t) return limit;
    for (int& e = iter_[u]; e >= 0; e = arcs_[e].next) {
      Arc& a = arcs_[e];
      if (a.cap > eps_ && level_[a.to] == level_[u] + 1) {
        double pushed = dfs(a.to, t, std::min(limit, a.cap));
        if (pushed > 0) {
          a.cap -= pushed;
          arcs_[e ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    level_[u] = -1;
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> iter_;
  double eps_;
};

// If some W has rho(W)/|W| > g, returns it; the min cut of the threshold
// network has value 2 rho(V) - 2 max_W (rho(W) - g |W|).
bool density_improvement(const WeightedGraph& graph, double g, double cut_margin,
                         std::vector<int>& witness) {
  int n = graph.vertex_count();
  double total = graph.total_weight();
  double flow_eps = 1e-13 * (1 + total);
  MaxFlow flow(n + 2, flow_eps);
  int s = n, t = n + 1;
  for (int v = 0; v < n; ++v) {
    flow.add_edge(s, v, graph.weighted_degree(v), 0.0);
    flow.add_edge(v, t, 2.0 * g, 0.0);
  }
  for (const auto& [u, v, w] : graph.sorted_edges()) flow.add_edge(u, v, w, w);
  double value = flow.run(s, t);
  if (value >= 2.0 * total - cut_margin) return false;
  std::vector<char> side = flow.source_side(s);
  witness.clear();
  for (int v = 0; v < n; ++v)
    if (side[v]) witness.push_back(v);
  return !witness.empty();
}

}  // namespace

LpDensestResult densest_subgraph(const WeightedGraph& graph) {
  int n = graph.vertex_count();
  if (n <= 0) throw ParameterError("densest_subgraph requires a non-empty graph");
  if (graph.edge_count() == 0) return {0.0, VertexSubset({0})};

  double total = graph.total_weight();
  auto density_of = [&](const std::vector<int>& members) {
    VertexSubset s(members);
    return rho(graph, s) / s.size();
  };

  std::vector<int> best;
  best.reserve(n);
  for (int v = 0; v < n; ++v) best.push_back(v);
  double best_density = total / n;

  // Binary search down to the documented resolution, keeping the witness
  // from every passing feasibility test.
  double resolution = 1e-9 * (1 + total);
  double lo = best_density, hi = total;
  std::vector<int> witness;
  while (hi - lo > resolution) {
    double mid = 0.5 * (lo + hi);
    if (density_improvement(graph, mid, 0.5 * resolution, witness)) {
      double dens = density_of(witness);
      if (dens > best_density) {
        best = witness;
        best_density = dens;
      }
      lo = std::max(mid, dens);
    } else {
      hi = mid;
    }
  }

  // Improvement loop from the achieved density: each pass either finds a
  // strictly denser witness or proves none exists, so the final witness is
  // optimal rather than resolution-close.
  double strict = 1e-12 * (1 + total);
  for (int pass = 0; pass < 64; ++pass) {
    if (!density_improvement(graph, best_density + strict, strict, witness)) break;
    double dens = density_of(witness);
    if (dens <= best_density) break;
    best = witness;
    best_density = dens;
  }

  return {best_density, VertexSubset(best)};
}

// ---------------------------------------------------------------------------
// density LP feasibility of the mapped Gram block

LpFeasibilityReport check_lp_feasibility_map(const WeightedGraph& outer,
                                             const Eigen::MatrixXd& outer_gram) {
  int m = outer.vertex_count();
  if (outer_gram.rows() != m || outer_gram.cols() != m)
    throw ParameterError("outer Gram block size does not match the outer graph");
  LpFeasibilityReport report;
  double mass = outer_gram.diagonal().sum();
  if (mass <= 0) {
    report.defined = false;
    return report;
  }
  double violation = 0;
  double objective = 0;
  for (const auto& [u, v, w] : outer.sorted_edges()) {
    double x = outer_gram(u, v) / mass;
    double yu = outer_gram(u, u) / mass;
    double yv = outer_gram(v, v) / mass;
    violation = std::max({violation, x - yu, x - yv, -x});
    objective += w * x;
  }
  double ysum = 0;
  for (int i = 0; i < m; ++i) {
    double y = outer_gram(i, i) / mass;
    violation = std::max(violation, -y);
    ysum += y;
  }
  violation = std::max(violation, ysum - 1.0);
  report.max_violation = violation;
  report.lp_objective = objective;
  report.densest_value = densest_subgraph(outer).value;
  report.objective_ok = objective <= report.densest_value + 1e-6;
  return report;
}

// ---------------------------------------------------------------------------
// brute-force densest k-subgraph

BruteForceResult brute_force_dks(const WeightedGraph& graph, int k, int max_n) {
  int n = graph.vertex_count();
  if (n > max_n)
    throw SizeError("brute_force_dks guard: n = " + std::to_string(n) + " exceeds " +
                    std::to_string(max_n));
  if (k < 1 || k > n) throw ParameterError("require 1 <= k <= n");

  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& [u, v, w] : graph.sorted_edges()) a[u][v] = a[v][u] = w;

  auto mask_rho = [&](std::uint32_t mask) {
    double sum = 0;
    for (std::uint32_t rest = mask; rest;) {
      int i = __builtin_ctz(rest);
      rest &= rest - 1;
      for (std::uint32_t others = rest; others;) {
        int j = __builtin_ctz(others);
        others &= others - 1;
        sum += a[i][j];
      }
    }
    return sum;
  };

  // First subset in lexicographic-mask order; among equal densities the
  // lexicographically smallest index set wins (its marker is the lowest
  // bit of the symmetric difference).
  auto lex_less = [](std::uint32_t x, std::uint32_t y) {
    std::uint32_t diff = x ^ y;
    return diff != 0 && (x & (diff & -diff)) != 0;
  };

  std::uint32_t mask = (k == 32) ? 0xffffffffu : ((1u << k) - 1);
  std::uint32_t limit = (n == 32) ? 0xffffffffu : (1u << n);
  std::uint32_t best_mask = mask;
  double best = mask_rho(mask);
  while (true) {
    // Gosper's hack: next mask with the same popcount.
    std::uint32_t c = mask & (~mask + 1);
    std::uint32_t r = mask + c;
    if (r >= limit || r < mask) break;
    mask = (((r ^ mask) >> 2) / c) | r;
    if (mask >= limit) break;
    double val = mask_rho(mask);
    if (val > best || (val == best && lex_less(mask, best_mask))) {
      best = val;
      best_mask = mask;
    }
  }

  std::vector<int> members;
  for (int v = 0; v < n; ++v)
    if (best_mask & (1u << v)) members.push_back(v);
  return {VertexSubset(members), best};
}

// ---------------------------------------------------------------------------
// spectral norm

namespace {

// Power iteration on shift*I + sign*A; returns the Rayleigh estimate once
// the eigen-residual certifies the requested accuracy, or NaN on stall.
double shifted_power_iteration(const Eigen::MatrixXd& a, double shift, double sign,
                               double tol_abs, long max_iter) {
  const long n = a.rows();
  Rng rng(0x5eedf00dULL);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = rng.uniform() - 0.5;
  v.normalize();
  Eigen::VectorXd w(n);
  for (long it = 0; it < max_iter; ++it) {
    w.noalias() = sign * (a * v);
    w += shift * v;
    double lambda = v.dot(w);
    double residual = (w - lambda * v).norm();
    if (residual <= tol_abs) return lambda;
    double norm = w.norm();
    if (norm <= 0) return 0.0;  // annihilated: shifted matrix acts as zero
    v = w / norm;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& sym) {
  if (sym.rows() != sym.cols()) throw ParameterError("spectral_norm requires a square matrix");
  const long n = sym.rows();
  if (n == 0) return 0.0;
  double scale = sym.cwiseAbs().maxCoeff();
  double asym = (sym - sym.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1 + scale)) throw ParameterError("spectral_norm requires a symmetric matrix");
  if (scale == 0) return 0.0;

  auto full = [&]() {
    Eigen::VectorXd ev = symmetric_eigenvalues(sym);
    return std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  };
  if (n <= 16) return full();

  // Gershgorin bound keeps both shifted matrices PSD so power iteration
  // targets the extreme eigenvalues.
  double bound = sym.cwiseAbs().rowwise().sum().maxCoeff();
  double tol_abs = 0.25e-9 * bound;
  double hi = shifted_power_iteration(sym, bound, 1.0, tol_abs, 5000);
  double lo = shifted_power_iteration(sym, bound, -1.0, tol_abs, 5000);
  if (std::isnan(hi) || std::isnan(lo)) return full();
  double lambda_max = hi - bound;
  double lambda_min = bound - lo;
  return std::max(std::abs(lambda_max), std::abs(lambda_min));
}

// ---------------------------------------------------------------------------
// expander certificate

ExpanderCertificate certify_expander(const WeightedGraph& graph, double d_prime, double lambda) {
  int m = graph.vertex_count();
  ExpanderCertificate cert;
  cert.regular = true;
  for (int v = 0; v < m; ++v)
    if (std::abs(graph.weighted_degree(v) - d_prime) > 1e-9) {
      cert.regular = false;
      break;
    }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [u, v, w] : graph.sorted_edges()) {
    a(u, v) = w;
    a(v, u) = w;
  }
  Eigen::VectorXd ev = symmetric_eigenvalues(a);
  cert.lambda1 = ev(m - 1);
  cert.max_abs_rest = (m >= 2) ? std::max(std::abs(ev(0)), std::abs(ev(m - 2))) : 0.0;
  cert.pass = cert.regular && cert.max_abs_rest <= lambda + 1e-9;
  return cert;
}

// ---------------------------------------------------------------------------
// xi calibration

CalibrationResult calibrate_xi(int n, int k, double p, int trials, std::uint64_t seed) {
  if (!(p > 0) || p > 1) throw ParameterError("calibrate_xi requires p in (0, 1]");
  if (trials < 1) throw ParameterError("calibrate_xi requires trials >= 1");
  if (k < 1 || k >= n) throw ParameterError("calibrate_xi requires 1 <= k < n");
  CalibrationResult result;
  result.ratios.reserve(trials);
  double denom = std::sqrt(static_cast<double>(n) * p);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd b(k, n - k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n - k; ++j) b(i, j) = (rng.bernoulli(p) ? 1.0 : 0.0) - p;
    double norm = (b.cwiseAbs().maxCoeff() == 0)
                      ? 0.0
                      : Eigen::BDCSVD<Eigen::MatrixXd>(b).singularValues()(0);
    result.ratios.push_back(norm / denom);
  }
  result.xi = *std::max_element(result.ratios.begin(), result.ratios.end());
  return result;
}

// ---------------------------------------------------------------------------
// mass-split audit

AuditReport audit_mass_split(const PlantedInstance& instance, const SdpSolution& solution) {
  const ModelParams& mp = instance.params;
  const Eigen::MatrixXd& g = solution.gram;
  if (g.rows() != mp.n + 1)
    throw ParameterError("solution dimension does not match the instance");
  int k = mp.k;
  AuditReport report;

  double rho_core = 0;
  for (const auto& [u, v, w] : instance.graph.sorted_edges()) {
    bool us = u < k, vs = v < k;
    double contribution = w * g(u, v);
    if (us && vs) {
      report.mass_ss += 2.0 * contribution;
      rho_core += w;
    } else if (!us && !vs) {
      report.mass_outer += 2.0 * contribution;
    } else {
      report.mass_cross += contribution;
    }
  }

  double ebar_raw = 0;
  for (int i = 0; i < k; ++i) ebar_raw += g(i, i);
  ebar_raw /= k;
  double ebar = std::clamp(ebar_raw, 0.0, 1.0);
  report.mean_vertex_norm = ebar_raw;
  report.mean_edge_inner = (rho_core > 0) ? report.mass_ss / (2.0 * rho_core) : 0.0;

  double p = mp.p();
  double kk = static_cast<double>(k);
  report.bound_cross = 3.0 * p * kk * kk * (1 - ebar) +
                       mp.xi * kk * std::sqrt(mp.n * p) * std::sqrt(ebar * (1 - ebar));
  report.bound_outer = is_exp_kind(mp.kind)
                           ? (mp.lambda * kk + mp.d_prime * kk * kk / (mp.n - k)) * (1 - ebar)
                           : 2.0 * mp.gamma * mp.d * kk * (1 - ebar);
  report.eta = is_reg_kind(mp.kind) ? compute_eta_prime(mp).value : compute_eta(mp);

  // Mass sums inherit the solver's feasibility noise, so the comparisons get
  // a slack proportional to the solve tolerance at the objective's scale.
  double slack = 10.0 * solution.tol * (1 + std::abs(solution.objective));
  auto leq = [slack](double lhs, double rhs) {
    return lhs <= rhs + slack + 1e-9 * (1 + std::abs(rhs));
  };
  report.cross_ok = leq(report.mass_cross, report.bound_cross);
  report.outer_ok = leq(report.mass_outer, report.bound_outer);
  double mean_slack = 10.0 * solution.tol;
  if (is_reg_kind(mp.kind)) {
    report.ss_ok = leq(report.mass_ss, kk * mp.d * ebar_raw);
    report.inner_ok = report.mean_vertex_norm >= 1 - report.eta - mean_slack;
  } else {
    report.ss_ok = true;
    report.inner_ok = report.mean_edge_inner >= 1 - report.eta - mean_slack;
  }
  double identity = report.mass_ss + 2.0 * report.mass_cross + report.mass_outer;
  report.mass_identity_ok =
      std::abs(identity - 2.0 * solution.objective) <= 1e-6 * (1 + std::abs(solution.objective));
  return report;
}

// ---------------------------------------------------------------------------
// expander quadratic form bound

QuadraticFormCheck quadratic_form_bound_check(const WeightedGraph& expander, double d_prime,
                                              double lambda, const Eigen::VectorXd& U) {
  int m = expander.vertex_count();
  if (U.size() != m) throw ParameterError("vector length does not match the graph");
  ExpanderCertificate cert = certify_expander(expander, d_prime, lambda);
  if (!cert.pass)
    throw ParameterError("quadratic_form_bound_check requires a certified expander");
  QuadraticFormCheck check;
  for (const auto& [u, v, w] : expander.sorted_edges()) check.lhs += 2.0 * w * U(u) * U(v);
  double s = U.sum();
  check.rhs = (d_prime - lambda) / m * s * s + lambda * U.squaredNorm();
  check.pass = check.lhs <= check.rhs + 1e-9 * (1 + std::abs(check.rhs));
  return check;
}

// ---------------------------------------------------------------------------
// closed-form comparison sweeps

bool tau_comparison_check(int grid_resolution, int param_grid_resolution) {
  if (grid_resolution < 2) throw ParameterError("require grid_resolution >= 2");
  if (param_grid_resolution < 1) throw ParameterError("require param_grid_resolution >= 1");

  for (int i = 1; i < grid_resolution; ++i)
    for (int j = 1; i + j < grid_resolution; ++j) {
      double x = static_cast<double>(i) / grid_resolution;
      double y = static_cast<double>(j) / grid_resolution;
      if (!(std::sqrt(x + y) > y / (1 - x))) return false;
    }

  // tau >= tau' on matching Gamma / GammaReg parameters across a grid
  // where both guarantees are valid.
  auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
  for (int i = 0; i < param_grid_resolution; ++i)
    for (int j = 0; j < param_grid_resolution; ++j) {
      double ti = param_grid_resolution == 1 ? 0.0 : static_cast<double>(i) / (param_grid_resolution - 1);
      double tj = param_grid_resolution == 1 ? 0.0 : static_cast<double>(j) / (param_grid_resolution - 1);
      ModelParams base;
      base.n = 1000;
      base.k = 125;
      base.d = 100;
      base.delta = lerp(5e-4, 5e-3, ti);
      base.gamma = lerp(5e-4, 5e-3, tj);
      base.xi = 2.0;
      ModelParams gamma_params = base;
      gamma_params.kind = ModelKind::Gamma;
      ModelParams reg_params = base;
      reg_params.kind = ModelKind::GammaReg;
      GuaranteeParams tau = guarantee_bounds(gamma_params);
      GuaranteeParams tau_prime = guarantee_bounds(reg_params);
      if (!tau.valid || !tau_prime.valid) return false;
      if (!(tau.bound >= tau_prime.bound)) return false;
    }
  return true;
}

}  // namespace dks
