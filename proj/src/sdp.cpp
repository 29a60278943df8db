#include "dks/sdp.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

#include "dks/io.hpp"

namespace dks {

// ---------------------------------------------------------------------------
// problem assembly

ConstraintCounts SdpProblem::counts() const {
  ConstraintCounts c;
  long m = n;
  c.trace_eq = 1;
  c.row_sum = m;
  c.nonneg = m * (m - 1) / 2;
  c.dominance = m * (m - 1);
  c.cap = m;
  c.tie = m;
  c.unit = 1;
  return c;
}

SdpProblem build_problem(const WeightedGraph& graph, int k) {
  int n = graph.vertex_count();
  if (n < 1) throw ParameterError("build_problem requires a non-empty graph");
  if (k < 1 || k > n) throw ParameterError("require 1 <= k <= n");
  SdpProblem p;
  p.n = n;
  p.k = k;
  p.C = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (const auto& [u, v, w] : graph.sorted_edges()) {
    p.C(u, v) = 0.5 * w;
    p.C(v, u) = 0.5 * w;
  }
  return p;
}

double FamilyViolations::worst(int k) const {
  double scale = std::max(1, k);
  double w = std::max(trace_eq / scale, row_sum / scale);
  w = std::max({w, nonneg, dominance, cap, tie, unit});
  return std::max(w, std::max(0.0, -min_eigenvalue));
}

// ---------------------------------------------------------------------------
// LAPACK helpers

namespace {

void symmetrize_from_lower(Eigen::MatrixXd& x) {
  const long n = x.rows();
  for (long j = 1; j < n; ++j)
    for (long i = 0; i < j; ++i) x(i, j) = x(j, i);
}

// Projection onto the PSD cone. side_hint carries the positive-eigenvalue
// count across calls so the cheaper half of the spectrum is computed.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& v, int& side_hint) {
  const lapack_int n = static_cast<lapack_int>(v.rows());
  bool positive_side = side_hint <= n / 2;
  Eigen::MatrixXd a = v;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd vec(n, n);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n) + 2);
  lapack_int found = 0;
  double big = std::numeric_limits<double>::max();
  double vl = positive_side ? 0.0 : -big;
  double vu = positive_side ? big : 0.0;
  lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'L', n, a.data(), n, vl, vu, 0, 0, 0.0,
                     &found, w.data(), vec.data(), n, isuppz.data());
  if (info != 0)
    throw Error("eigensolver failure during PSD projection (info=" + std::to_string(info) + ")");
  side_hint = positive_side ? found : n - found;

  Eigen::MatrixXd x;
  if (positive_side) {
    x.setZero(n, n);
    if (found > 0) {
      Eigen::MatrixXd b = vec.leftCols(found);
      for (lapack_int j = 0; j < found; ++j) b.col(j) *= std::sqrt(std::max(0.0, w(j)));
      cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, n, found, 1.0, b.data(), n, 0.0,
                  x.data(), n);
    }
  } else {
    x = v;
    if (found > 0) {
      Eigen::MatrixXd b = vec.leftCols(found);
      for (lapack_int j = 0; j < found; ++j) b.col(j) *= std::sqrt(std::max(0.0, -w(j)));
      cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, n, found, 1.0, b.data(), n, 1.0,
                  x.data(), n);
    }
  }
  symmetrize_from_lower(x);
  return x;
}

double extreme_eigenvalue(const Eigen::MatrixXd& sym, bool largest) {
  const lapack_int n = static_cast<lapack_int>(sym.rows());
  Eigen::MatrixXd a = sym;
  Eigen::VectorXd w(n);
  std::vector<lapack_int> isuppz(4);
  double dummy = 0;
  lapack_int found = 0;
  lapack_int idx = largest ? n : 1;
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, a.data(), n, 0.0, 0.0,
                                   idx, idx, 0.0, &found, w.data(), &dummy, 1, isuppz.data());
  if (info != 0)
    throw Error("eigensolver failure on extreme eigenvalue (info=" + std::to_string(info) + ")");
  return w(0);
}

// ---------------------------------------------------------------------------
// row-polytope projection: minimize (u-a)^2 + 2 sum_j (g_j - b_j)^2 over
// {0 <= u <= 1, 0 <= g_j <= u, sum_j g_j <= cap * u}.

struct RowWorkspace {
  std::vector<double> sorted;     // b descending
  std::vector<double> prefix;     // prefix sums of sorted
  std::vector<double> prefix_sq;  // prefix sums of squares
};

// Count of sorted (descending) entries strictly greater than x.
int count_above(const std::vector<double>& s, double x) {
  return static_cast<int>(std::lower_bound(s.begin(), s.end(), x, std::greater<double>()) -
                          s.begin());
}

// theta >= 0 such that sum_j clamp(s_j - theta, 0, u) == cap*u, given that
// theta = 0 overshoots. The sum is decreasing and piecewise linear in theta.
double solve_theta(const RowWorkspace& ws, double u, double target) {
  double lo = 0.0, hi = std::max(ws.sorted.empty() ? 0.0 : ws.sorted[0], 0.0);
  for (int it = 0; it < 64; ++it) {
    double mid = 0.5 * (lo + hi);
    int high = count_above(ws.sorted, mid + u);
    int mid_end = count_above(ws.sorted, mid);
    double sum = high * u + (ws.prefix[mid_end] - ws.prefix[high]) - (mid_end - high) * mid;
    (sum > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Objective restricted to the best g for the given u (row-sum active or not).
double row_height(const RowWorkspace& ws, double a, double cap, double u) {
  int m = static_cast<int>(ws.sorted.size());
  if (u <= 0) return a * a + 2.0 * ws.prefix_sq[m];
  int pos_end = count_above(ws.sorted, 0.0);
  int high0 = count_above(ws.sorted, u);
  double sum0 = high0 * u + (ws.prefix[pos_end] - ws.prefix[high0]);
  double theta = 0.0;
  if (sum0 > cap * u) theta = solve_theta(ws, u, cap * u);
  int high = count_above(ws.sorted, theta + u);
  int mid_end = count_above(ws.sorted, theta);
  double cost = ws.prefix_sq[high] - 2.0 * u * ws.prefix[high] + high * u * u;
  cost += (mid_end - high) * theta * theta;
  cost += ws.prefix_sq[m] - ws.prefix_sq[mid_end];
  return (u - a) * (u - a) + 2.0 * cost;
}

void project_row(double a, const std::vector<double>& b, double cap, RowWorkspace& ws,
                 double& u_out, std::vector<double>& g_out) {
  int m = static_cast<int>(b.size());
  ws.sorted = b;
  std::sort(ws.sorted.begin(), ws.sorted.end(), std::greater<double>());
  ws.prefix.assign(m + 1, 0.0);
  ws.prefix_sq.assign(m + 1, 0.0);
  for (int j = 0; j < m; ++j) {
    ws.prefix[j + 1] = ws.prefix[j] + ws.sorted[j];
    ws.prefix_sq[j + 1] = ws.prefix_sq[j] + ws.sorted[j] * ws.sorted[j];
  }
  int pos_end = count_above(ws.sorted, 0.0);

  // Row-sum-inactive candidate: bisect the derivative of
  // (u-a)^2 + 2 sum_{s_j >= u} (u-s_j)^2, which is increasing in u.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    int high = count_above(ws.sorted, mid);
    double deriv = 2.0 * (mid - a) + 4.0 * (high * mid - ws.prefix[high]);
    (deriv < 0 ? lo : hi) = mid;
  }
  double u = 0.5 * (lo + hi);
  int high0 = count_above(ws.sorted, u);
  double sum0 = high0 * u + (ws.prefix[pos_end] - ws.prefix[high0]);
  double theta = 0.0;

  if (sum0 > cap * u + 1e-12 * (1.0 + cap * u)) {
    // Row sum binds: golden-section search on the convex height function.
    const double inv_phi = 0.6180339887498949;
    double x0 = 0.0, x3 = 1.0;
    double x1 = x3 - inv_phi * (x3 - x0);
    double x2 = x0 + inv_phi * (x3 - x0);
    double f1 = row_height(ws, a, cap, x1);
    double f2 = row_height(ws, a, cap, x2);
    while (x3 - x0 > 1e-12) {
      if (f1 < f2) {
        x3 = x2;
        x2 = x1;
        f2 = f1;
        x1 = x3 - inv_phi * (x3 - x0);
        f1 = row_height(ws, a, cap, x1);
      } else {
        x0 = x1;
        x1 = x2;
        f1 = f2;
        x2 = x0 + inv_phi * (x3 - x0);
        f2 = row_height(ws, a, cap, x2);
      }
    }
    u = 0.5 * (x0 + x3);
    if (u > 0) {
      int high = count_above(ws.sorted, u);
      double sum = high * u + (ws.prefix[pos_end] - ws.prefix[high]);
      if (sum > cap * u) theta = solve_theta(ws, u, cap * u);
    }
  }

  u_out = u;
  g_out.resize(m);
  for (int j = 0; j < m; ++j) g_out[j] = std::clamp(b[j] - theta, 0.0, u);
}

// ---------------------------------------------------------------------------
// feasibility measurement

FamilyViolations measure(const Eigen::MatrixXd& g, int k, bool with_eigenvalue) {
  FamilyViolations f;
  const int n = static_cast<int>(g.rows()) - 1;
  double trace = 0;
  for (int i = 0; i < n; ++i) {
    double gii = g(i, i);
    trace += gii;
    double row = 0, max_off = -std::numeric_limits<double>::infinity(), min_off = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) {
        row += gii;
        continue;
      }
      double gij = g(i, j);
      row += gij;
      max_off = std::max(max_off, gij);
      min_off = std::min(min_off, gij);
    }
    f.row_sum = std::max(f.row_sum, row - k * gii);
    if (n > 1) {
      f.nonneg = std::max(f.nonneg, -min_off);
      f.dominance = std::max(f.dominance, max_off - gii);
    }
    f.cap = std::max(f.cap, gii - 1.0);
    f.tie = std::max(f.tie, std::abs(g(i, n) - gii));
  }
  f.trace_eq = std::abs(trace - k);
  f.row_sum = std::max(f.row_sum, 0.0);
  f.nonneg = std::max(f.nonneg, 0.0);
  f.dominance = std::max(f.dominance, 0.0);
  f.cap = std::max(f.cap, 0.0);
  f.unit = std::abs(g(n, n) - 1.0);
  f.min_eigenvalue = with_eigenvalue ? extreme_eigenvalue(g, false) : 0.0;
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// solver

namespace {

// Consensus splitting over four constraint families sharing the matrix
// coordinates: the PSD cone, the affine family (trace, ties, corner), the
// box family, and one row polytope per vertex.
struct Splitting {
  int n;  // vertices (matrix dimension n + 1)
  int k;
  double sigma;

  Eigen::MatrixXd z;    // consensus matrix
  Eigen::MatrixXd y_p;  // per-family running sums x_hat + dual
  Eigen::MatrixXd y_b;
  Eigen::VectorXd ya_u, ya_t;
  double ya_c = 1.0;
  Eigen::MatrixXd y_r;  // row i: diagonal entry at (i,i), pair entries at (i,j)

  Eigen::MatrixXd mult;    // coordinate multiplicities
  Eigen::MatrixXd c_over;  // C / sigma, refreshed on sigma changes
  const Eigen::MatrixXd* c_ptr = nullptr;

  void rescale_duals(double ratio) {
    y_p = z + (y_p - z) * ratio;
    y_b = z + (y_b - z) * ratio;
    for (int i = 0; i < n; ++i) {
      ya_u(i) = z(i, i) + (ya_u(i) - z(i, i)) * ratio;
      ya_t(i) = z(i, n) + (ya_t(i) - z(i, n)) * ratio;
      for (int j = 0; j < n; ++j) {
        double ref = (j == i) ? z(i, i) : z(i, j);
        y_r(i, j) = ref + (y_r(i, j) - ref) * ratio;
      }
    }
    ya_c = z(n, n) + (ya_c - z(n, n)) * ratio;
  }
};

double frobenius_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.cwiseProduct(b)).sum();
}

// Support-function upper bound from the exact dual decomposition
// sum_s lambda_s = C that holds after every consensus update.
double dual_objective(const Splitting& s) {
  const int n = s.n;
  const double sigma = s.sigma;
  const Eigen::MatrixXd& z = s.z;

  Eigen::MatrixXd lambda_p = -sigma * (s.y_p - z);
  double top = extreme_eigenvalue(lambda_p, true);
  double d_total = (s.k + 1) * std::max(0.0, top);

  // Affine family: support is finite only along the uniform direction, so
  // per-vertex residuals are shifted onto the box family's diagonal terms.
  Eigen::VectorXd shift(n);
  double mean = 0;
  for (int i = 0; i < n; ++i) {
    shift(i) = -sigma * (s.ya_u(i) - z(i, i)) - 2.0 * sigma * (s.ya_t(i) - z(i, n));
    mean += shift(i);
  }
  mean /= n;
  d_total += mean * s.k + (-sigma * (s.ya_c - z(n, n)));

  for (int i = 0; i < n; ++i) {
    double diag_pi = -sigma * (s.y_b(i, i) - z(i, i)) + (shift(i) - mean);
    d_total += std::max(0.0, diag_pi);
    for (int j = i + 1; j < n; ++j)
      d_total += std::max(0.0, -2.0 * sigma * (s.y_b(i, j) - z(i, j)));
    d_total += std::max(0.0, -2.0 * sigma * (s.y_b(i, n) - z(i, n)));
  }
  d_total += -sigma * (s.y_b(n, n) - z(n, n));

  // Row polytopes: at most k-1 units of pair mass, each at most u <= 1.
  std::vector<double> positives;
  for (int i = 0; i < n; ++i) {
    positives.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double pi = -2.0 * sigma * (s.y_r(i, j) - z(i, j));
      if (pi > 0) positives.push_back(pi);
    }
    int take = std::min<int>(s.k - 1, static_cast<int>(positives.size()));
    double gain = 0;
    if (take > 0) {
      std::nth_element(positives.begin(), positives.begin() + (take - 1), positives.end(),
                       std::greater<double>());
      for (int t = 0; t < take; ++t) gain += positives[t];
    }
    double pi_u = -sigma * (s.y_r(i, i) - z(i, i));
    d_total += std::max(0.0, pi_u + gain);
  }
  return d_total;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolveOptions& options) {
  const int n = problem.n;
  const int k = problem.k;
  const int dim = n + 1;
  if (n < 1) throw ParameterError("problem has no vertices");
  if (k < 1 || k > n) throw ParameterError("require 1 <= k <= n");
  if (problem.C.rows() != dim || problem.C.cols() != dim)
    throw ParameterError("objective matrix has the wrong shape");
  if (!(options.tol > 0)) throw ParameterError("tol must be positive");
  if (options.max_iter < 1) throw ParameterError("max_iter must be positive");

  Splitting s;
  s.n = n;
  s.k = k;
  s.c_ptr = &problem.C;

  // Consensus start: warm Gram matrix when provided, else the uniform
  // feasible guess with diagonal k/n.
  if (options.warm_start != nullptr) {
    if (options.warm_start->gram.rows() != dim)
      throw ParameterError("warm start dimension does not match the problem");
    s.z = options.warm_start->gram;
    s.sigma = options.sigma0 > 0
                  ? options.sigma0
                  : (options.warm_start->sigma > 0 ? options.warm_start->sigma : 1.0);
  } else {
    double diag = static_cast<double>(k) / n;
    double off = (n > 1) ? diag * (k - 1.0) / (n - 1.0) : 0.0;
    s.z = Eigen::MatrixXd::Constant(dim, dim, off);
    for (int i = 0; i < n; ++i) {
      s.z(i, i) = diag;
      s.z(i, n) = diag;
      s.z(n, i) = diag;
    }
    s.z(n, n) = 1.0;
    s.sigma = options.sigma0 > 0 ? options.sigma0 : 1.0;
  }

  s.y_p = s.z;
  s.y_b = s.z;
  s.ya_u = s.z.diagonal().head(n);
  s.ya_t = s.z.col(n).head(n);
  s.ya_c = s.z(n, n);
  s.y_r.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.y_r(i, j) = (j == i) ? s.z(i, i) : s.z(i, j);

  s.mult = Eigen::MatrixXd::Constant(dim, dim, 4.0);
  for (int i = 0; i < n; ++i) {
    s.mult(i, n) = 3.0;
    s.mult(n, i) = 3.0;
  }
  s.mult(n, n) = 3.0;
  s.c_over = problem.C / s.sigma;

  const double relax = 1.3;
  const int check_every = 25;
  int side_hint = 0;

  Eigen::MatrixXd x_p, acc(dim, dim), z_old;
  RowWorkspace ws;
  std::vector<double> row_b(std::max(0, n - 1)), row_g;
  double best_score = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_gram;
  double best_obj = 0, best_bound = 0;
  long best_iters = 0;

  auto finish = [&](long iters, bool converged, const Eigen::MatrixXd& gram, double obj,
                    double bound) {
    SdpSolution sol;
    sol.gram = gram;
    sol.objective = obj;
    sol.dual_bound = bound;
    sol.residuals = measure(gram, k, true);
    sol.iterations = iters;
    sol.tol = options.tol;
    sol.k = k;
    sol.converged = converged;
    sol.sigma = s.sigma;
    return sol;
  };

  for (long it = 0; it < options.max_iter; ++it) {
    z_old = s.z;

    // PSD family.
    x_p = psd_project(2.0 * s.z - s.y_p, side_hint);
    Eigen::MatrixXd xhat = relax * x_p + (1.0 - relax) * s.z;
    s.y_p += xhat - s.z;

    // Box family.
    {
      Eigen::MatrixXd xb = (2.0 * s.z - s.y_b).cwiseMax(0.0).cwiseMin(1.0);
      xb(n, n) = 1.0;
      s.y_b += relax * xb + (1.0 - relax) * s.z - s.z;
    }

    // Affine family: ties t_i = u_i, trace sum u_i = k, corner = 1.
    {
      double mu = 0;
      Eigen::VectorXd q(n);
      for (int i = 0; i < n; ++i) {
        double au = 2.0 * s.z(i, i) - s.ya_u(i);
        double at = 2.0 * s.z(i, n) - s.ya_t(i);
        q(i) = (au + 2.0 * at) / 3.0;
        mu += q(i);
      }
      mu = (mu - k) / n;
      for (int i = 0; i < n; ++i) {
        double star = q(i) - mu;
        s.ya_u(i) += relax * star + (1.0 - relax) * s.z(i, i) - s.z(i, i);
        s.ya_t(i) += relax * star + (1.0 - relax) * s.z(i, n) - s.z(i, n);
      }
      s.ya_c += relax * 1.0 + (1.0 - relax) * s.z(n, n) - s.z(n, n);
    }

    // Row polytopes.
    {
      double cap = static_cast<double>(k) - 1.0;
      for (int i = 0; i < n; ++i) {
        row_b.resize(n - 1);
        int t = 0;
        for (int j = 0; j < n; ++j)
          if (j != i) row_b[t++] = 2.0 * s.z(i, j) - s.y_r(i, j);
        double au = 2.0 * s.z(i, i) - s.y_r(i, i);
        double u_star = 0;
        project_row(au, row_b, cap, ws, u_star, row_g);
        s.y_r(i, i) += relax * u_star + (1.0 - relax) * s.z(i, i) - s.z(i, i);
        t = 0;
        for (int j = 0; j < n; ++j)
          if (j != i) {
            s.y_r(i, j) += relax * row_g[t] + (1.0 - relax) * s.z(i, j) - s.z(i, j);
            ++t;
          }
      }
    }

    // Consensus update.
    acc = s.y_p + s.y_b;
    acc.topLeftCorner(n, n) += s.y_r + s.y_r.transpose();
    for (int i = 0; i < n; ++i) {
      acc(i, i) -= s.y_r(i, i);
      acc(i, i) += s.ya_u(i);
      acc(i, n) += s.ya_t(i);
      acc(n, i) += s.ya_t(i);
    }
    acc(n, n) += s.ya_c;
    s.z = (acc + s.c_over).cwiseQuotient(s.mult);

    bool last = (it + 1 == options.max_iter);
    if ((it + 1) % check_every == 0 || last) {
      FamilyViolations resid = measure(x_p, k, false);
      double obj = frobenius_inner(problem.C, x_p);
      double bound = dual_objective(s);
      double gap = std::abs(bound - obj);
      double gap_scale = options.tol * (1.0 + std::abs(obj));
      double score = std::max(resid.worst(k) / options.tol, gap / gap_scale);
      static const bool trace = std::getenv("DKS_SDP_TRACE") != nullptr;
      if (trace)
        std::cerr << "iter " << (it + 1) << " worst " << resid.worst(k) << " obj " << obj
                  << " bound " << bound << " gap " << gap << " sigma " << s.sigma
                  << " primal " << (x_p - s.z).norm() << " dual "
                  << s.sigma * (s.z - z_old).norm() << "\n";
      if (score < best_score) {
        best_score = score;
        best_gram = x_p;
        best_obj = obj;
        best_bound = bound;
        best_iters = it + 1;
      }
      if (resid.worst(k) <= options.tol && gap <= gap_scale)
        return finish(it + 1, true, x_p, obj, bound);

      // Residual balancing: grow sigma when consensus lags, shrink when
      // the consensus point is the one still moving.
      if ((it + 1) % (2 * check_every) == 0 && !last) {
        double primal = (x_p - s.z).norm();
        double dual = s.sigma * (s.z - z_old).norm();
        double next = s.sigma;
        if (primal > 10.0 * dual)
          next = std::min(s.sigma * 1.5, 1e4);
        else if (dual > 10.0 * primal)
          next = std::max(s.sigma / 1.5, 1e-4);
        if (next != s.sigma) {
          s.rescale_duals(s.sigma / next);
          s.sigma = next;
          s.c_over = problem.C / s.sigma;
        }
      }
    }
  }

  if (best_gram.rows() == 0) {
    best_gram = x_p;
    best_obj = frobenius_inner(problem.C, x_p);
    best_bound = dual_objective(s);
    best_iters = options.max_iter;
  }
  throw NonConvergedError("solver did not reach tolerance " + std::to_string(options.tol) +
                              " within " + std::to_string(options.max_iter) + " iterations",
                          finish(best_iters, false, best_gram, best_obj, best_bound));
}

// ---------------------------------------------------------------------------
// solution utilities

Eigen::VectorXd SdpSolution::clamped_diagonal() const {
  int nn = n();
  Eigen::VectorXd d(nn);
  for (int i = 0; i < nn; ++i) d(i) = std::clamp(gram(i, i), 0.0, 1.0);
  return d;
}

Eigen::MatrixXd SdpSolution::rounding_gram() const {
  Eigen::MatrixXd g = gram;
  int nn = n();
  for (int i = 0; i < nn; ++i) {
    double v = std::clamp(g(i, i), 0.0, 1.0);
    g(i, i) = v;
    g(i, nn) = v;
    g(nn, i) = v;
  }
  g(nn, nn) = 1.0;
  return g;
}

Eigen::MatrixXd extract_vectors(const SdpSolution& solution) {
  const lapack_int dim = static_cast<lapack_int>(solution.gram.rows());
  Eigen::MatrixXd vec = solution.gram;
  Eigen::VectorXd w(dim);
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', dim, vec.data(), dim, w.data());
  if (info != 0)
    throw Error("eigensolver failure in extract_vectors (info=" + std::to_string(info) + ")");
  for (lapack_int j = 0; j < dim; ++j) vec.col(j) *= std::sqrt(std::max(0.0, w(j)));
  return vec;
}

FamilyViolations feasibility_report(const SdpSolution& solution) {
  return measure(solution.gram, solution.k, true);
}

FamilyViolations feasibility_report(const Eigen::MatrixXd& gram, int k, bool with_eigenvalue) {
  if (gram.rows() != gram.cols() || gram.rows() < 2)
    throw ParameterError("Gram matrix must be square with dimension at least 2");
  if (k < 1) throw ParameterError("k must be positive");
  return measure(gram, k, with_eigenvalue);
}

// ---------------------------------------------------------------------------
// solution files

void save_solution(const SdpSolution& solution, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  const FamilyViolations& r = solution.residuals;
  out << "dks-solution 1\n";
  out << "n " << solution.n() << " k " << solution.k << " iterations " << solution.iterations
      << " converged " << (solution.converged ? 1 : 0) << "\n";
  out << "tol " << format_real(solution.tol) << " objective " << format_real(solution.objective)
      << " dual_bound " << format_real(solution.dual_bound) << " sigma "
      << format_real(solution.sigma) << "\n";
  out << "residuals " << format_real(r.trace_eq) << " " << format_real(r.row_sum) << " "
      << format_real(r.nonneg) << " " << format_real(r.dominance) << " " << format_real(r.cap)
      << " " << format_real(r.tie) << " " << format_real(r.unit) << " "
      << format_real(r.min_eigenvalue) << "\n";
  const long dim = solution.gram.rows();
  for (long i = 0; i < dim; ++i) {
    for (long j = 0; j < dim; ++j) {
      if (j) out << ' ';
      out << format_real(solution.gram(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

SdpSolution load_solution(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (!in || magic != "dks-solution") throw ParseError("not a solution file", "", 1);
  if (version != 1)
    throw VersionError("unsupported solution file version " + std::to_string(version));

  auto expect = [&](const char* key, int line) {
    std::string token;
    in >> token;
    if (!in || token != key)
      throw ParseError(std::string("expected field '") + key + "'", key, line);
  };

  SdpSolution sol;
  int n = 0, converged = 0;
  expect("n", 2);
  in >> n;
  expect("k", 2);
  in >> sol.k;
  expect("iterations", 2);
  in >> sol.iterations;
  expect("converged", 2);
  in >> converged;
  expect("tol", 3);
  in >> sol.tol;
  expect("objective", 3);
  in >> sol.objective;
  expect("dual_bound", 3);
  in >> sol.dual_bound;
  expect("sigma", 3);
  in >> sol.sigma;
  expect("residuals", 4);
  FamilyViolations& r = sol.residuals;
  in >> r.trace_eq >> r.row_sum >> r.nonneg >> r.dominance >> r.cap >> r.tie >> r.unit >>
      r.min_eigenvalue;
  if (!in || n < 1 || sol.k < 1) throw ParseError("malformed solution header", "", 2);
  sol.converged = converged != 0;
  sol.gram.resize(n + 1, n + 1);
  for (long i = 0; i <= n; ++i)
    for (long j = 0; j <= n; ++j) {
      double v;
      if (!(in >> v)) throw ParseError("truncated Gram matrix", "gram", 5);
      sol.gram(i, j) = v;
    }
  return sol;
}

}  // namespace dks
