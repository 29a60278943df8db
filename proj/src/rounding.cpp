#include "dks/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dks/errors.hpp"

namespace dks {

std::string to_string(ClauseFlag flag) {
  switch (flag) {
    case ClauseFlag::Pass:
      return "pass";
    case ClauseFlag::Fail:
      return "fail";
    default:
      return "not_applicable";
  }
}

double compute_eta(const ModelParams& params) {
  if (is_reg_kind(params.kind))
    throw ParameterError("compute_eta applies to the Exp/Gamma kinds only");
  double n = params.n, k = params.k, d = params.d;
  double common = 6.0 * params.delta + params.xi * std::sqrt(params.delta * n / (d * k));
  if (params.kind == ModelKind::Exp)
    return common + params.lambda / d + params.d_prime * k / ((n - k) * d);
  return common + 2.0 * params.gamma;
}

EtaPrime compute_eta_prime(const ModelParams& params) {
  if (!is_reg_kind(params.kind))
    throw ParameterError("compute_eta_prime applies to the Reg kinds only");
  double n = params.n, k = params.k, d = params.d;
  double bracket = 1.0 - 6.0 * params.delta;
  if (params.kind == ModelKind::ExpReg)
    bracket -= params.lambda / d + params.d_prime * k / ((n - k) * d);
  else
    bracket -= 2.0 * params.gamma;
  double coef = d * k / (4.0 * params.xi * params.xi * params.delta * n);
  EtaPrime result;
  result.bracket_positive = bracket > 0;
  result.value = 1.0 / (1.0 + coef * bracket * bracket);
  return result;
}

namespace {

GuaranteeParams bundle(ModelKind kind, double eta, bool bracket_positive) {
  GuaranteeParams g;
  g.kind = kind;
  g.eta = eta;
  g.bracket_positive = bracket_positive;
  if (is_reg_kind(kind)) {
    g.alpha = 2.0 / std::sqrt(eta);
    g.bound = 5.0 * std::sqrt(eta);
  } else {
    g.alpha = 1.0 / std::sqrt(3.0 * eta);
    g.bound = 2.0 * std::sqrt(3.0 * eta);
  }
  g.valid = bracket_positive && g.bound > 0 && g.bound < 1;
  g.eta_theorem = eta;
  g.bound_theorem = g.bound;
  return g;
}

}  // namespace

GuaranteeParams guarantee_bounds(const ModelParams& params) {
  if (!is_reg_kind(params.kind)) return bundle(params.kind, compute_eta(params), true);

  EtaPrime ep = compute_eta_prime(params);
  GuaranteeParams g = bundle(params.kind, ep.value, ep.bracket_positive);

  // Alternate statement-level form: same bracket, coefficient without the
  // n factor in the denominator.
  double bracket = 1.0 - 6.0 * params.delta;
  if (params.kind == ModelKind::ExpReg)
    bracket -= params.lambda / params.d +
               params.d_prime * static_cast<double>(params.k) /
                   ((static_cast<double>(params.n) - params.k) * params.d);
  else
    bracket -= 2.0 * params.gamma;
  double coef = params.d * static_cast<double>(params.k) /
                (4.0 * params.xi * params.xi * params.delta);
  g.eta_theorem = 1.0 / (1.0 + coef * bracket * bracket);
  g.bound_theorem = 5.0 * std::sqrt(g.eta_theorem);
  return g;
}

GuaranteeParams guarantee_bounds_with_eta(ModelKind kind, double eta) {
  if (!(eta > 0) || !(eta < 1)) throw ParameterError("manual eta must lie in (0, 1)");
  return bundle(kind, eta, true);
}

VertexSubset threshold_set(const SdpSolution& solution, double alpha, double eta) {
  double product = alpha * eta;
  if (!(product < 1)) throw ParameterError("alpha*eta >= 1 makes the threshold vacuous");
  Eigen::VectorXd diag = solution.clamped_diagonal();
  std::vector<int> members;
  double cutoff = 1.0 - product;
  for (int i = 0; i < solution.n(); ++i)
    if (diag(i) >= cutoff) members.push_back(i);
  return VertexSubset(members);
}

VertexSubset greedy_prune(const WeightedGraph& graph, const VertexSubset& T, int k,
                          const Eigen::VectorXd* diag_hint) {
  int n = graph.vertex_count();
  if (k > n) throw ParameterError("cannot select k = " + std::to_string(k) + " of " +
                                  std::to_string(n) + " vertices");
  if (k < 0) throw ParameterError("k must be non-negative");

  std::vector<int> members = T.members();
  if (static_cast<int>(members.size()) > k) {
    // Repeatedly drop the vertex of minimum weighted degree within the
    // current induced subgraph; ties go to the smallest index.
    std::vector<char> active(n, 0);
    std::vector<double> degree(n, 0.0);
    for (int v : members) active[v] = 1;
    for (int v : members)
      for (const auto& [u, w] : graph.neighbors(v))
        if (active[u]) degree[v] += w;
    int remaining = static_cast<int>(members.size());
    while (remaining > k) {
      int victim = -1;
      for (int v : members)
        if (active[v] && (victim < 0 || degree[v] < degree[victim])) victim = v;
      active[victim] = 0;
      for (const auto& [u, w] : graph.neighbors(victim))
        if (active[u]) degree[u] -= w;
      --remaining;
    }
    std::vector<int> kept;
    kept.reserve(k);
    for (int v : members)
      if (active[v]) kept.push_back(v);
    return VertexSubset(kept);
  }

  if (static_cast<int>(members.size()) == k) return T;

  // Pad with non-members: by decreasing diagonal value when a hint is
  // supplied (ties: smaller index), else by increasing index.
  std::vector<int> outside;
  for (int v = 0; v < n; ++v)
    if (!T.contains(v)) outside.push_back(v);
  if (diag_hint != nullptr) {
    if (diag_hint->size() != n) throw ParameterError("diagonal hint length must equal n");
    std::stable_sort(outside.begin(), outside.end(),
                     [&](int a, int b) { return (*diag_hint)(a) > (*diag_hint)(b); });
  }
  std::vector<int> padded = members;
  for (int v : outside) {
    if (static_cast<int>(padded.size()) >= k) break;
    padded.push_back(v);
  }
  return VertexSubset(padded);
}

RecoveryResult recover(const PlantedInstance& instance, const SdpSolution& solution,
                       std::optional<double> eta_override) {
  const ModelParams& mp = instance.params;
  if (solution.n() != mp.n)
    throw ParameterError("solution dimension does not match the instance");
  if (solution.k != mp.k) throw ParameterError("solution k does not match the instance");

  RecoveryResult result;
  result.guarantee = eta_override.has_value()
                         ? guarantee_bounds_with_eta(mp.kind, *eta_override)
                         : guarantee_bounds(mp);

  Eigen::VectorXd diag = solution.clamped_diagonal();
  result.T = threshold_set(solution, result.guarantee.alpha, result.guarantee.eta);
  result.Q = greedy_prune(instance.graph, result.T, mp.k, &diag);

  const VertexSubset& S = instance.planted;
  std::vector<int> t_cap_s, q_cap_s;
  for (int v : result.T.members())
    if (S.contains(v)) t_cap_s.push_back(v);
  for (int v : result.Q.members())
    if (S.contains(v)) q_cap_s.push_back(v);

  result.size_T = result.T.size();
  result.size_Q_cap_S = static_cast<int>(q_cap_s.size());
  result.rho_Q = rho(instance.graph, result.Q);
  result.rho_T_cap_S = rho(instance.graph, VertexSubset(t_cap_s));

  if (result.guarantee.valid) {
    double target = 0.5 * static_cast<double>(mp.k) * mp.d;
    double slack = 10.0 * solution.tol * target;
    double b = result.guarantee.bound;
    auto flag = [](bool ok) { return ok ? ClauseFlag::Pass : ClauseFlag::Fail; };
    result.density_ok = flag(result.rho_Q >= (1 - b) * target - slack);
    if (is_reg_kind(mp.kind)) {
      result.q_cap_s_ok = flag(result.size_Q_cap_S >= (1 - b / 6.0) * mp.k - 1e-9);
    } else {
      result.t_size_ok = flag(result.size_T <= (1 + b / 5.0) * mp.k + 1e-9);
      result.t_cap_s_density_ok = flag(result.rho_T_cap_S >= (1 - b / 2.0) * target - slack);
    }
  }
  return result;
}

}  // namespace dks
