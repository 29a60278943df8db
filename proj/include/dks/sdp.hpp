#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "dks/errors.hpp"
#include "dks/graph.hpp"

namespace dks {

struct ConstraintCounts {
  long trace_eq = 0;   // sum of vertex diagonal entries equals k
  long row_sum = 0;    // per-vertex row sums bounded by k * G_ii
  long nonneg = 0;     // pairwise non-negativity
  long dominance = 0;  // G_ij <= G_ii for i != j (both orientations)
  long cap = 0;        // G_ii <= 1
  long tie = 0;        // G_{i,I} = G_ii
  long unit = 0;       // G_{I,I} = 1
  long total() const { return trace_eq + row_sum + nonneg + dominance + cap + tie + unit; }
};

// The vector relaxation over {X_1..X_n, I}, posed on the (n+1)x(n+1)
// Gram matrix; index n holds the unit vector I.
struct SdpProblem {
  int n = 0;
  int k = 0;
  Eigen::MatrixXd C;  // objective coefficients: C(i,j) = A(i,j)/2 on the vertex block

  int dim() const { return n + 1; }
  ConstraintCounts counts() const;
};

SdpProblem build_problem(const WeightedGraph& graph, int k);

struct FamilyViolations {
  double trace_eq = 0;
  double row_sum = 0;
  double nonneg = 0;
  double dominance = 0;
  double cap = 0;
  double tie = 0;
  double unit = 0;
  double min_eigenvalue = 0;

  // Largest violation after normalizing the k-scaled families by k.
  double worst(int k) const;
};

struct SdpSolution {
  Eigen::MatrixXd gram;  // (n+1)x(n+1), exactly PSD up to eigensolver noise
  double objective = 0;
  double dual_bound = 0;  // certified upper bound on the optimum
  FamilyViolations residuals;
  long iterations = 0;
  double tol = 0;
  int k = 0;
  bool converged = true;
  double sigma = 0;  // final penalty parameter; reused by warm starts

  int n() const { return static_cast<int>(gram.rows()) - 1; }

  // Vertex diagonal clamped into [0, 1]; what the rounding thresholds see.
  Eigen::VectorXd clamped_diagonal() const;

  // Copy of gram with the diagonal clamped and the I-column re-tied to it.
  Eigen::MatrixXd rounding_gram() const;
};

class NonConvergedError : public Error {
 public:
  NonConvergedError(const std::string& msg, SdpSolution best)
      : Error(msg), best_(std::make_shared<SdpSolution>(std::move(best))) {}

  const SdpSolution& best() const { return *best_; }

 private:
  std::shared_ptr<SdpSolution> best_;
};

struct SolveOptions {
  double tol = 1e-5;
  long max_iter = 50000;
  const SdpSolution* warm_start = nullptr;
  double sigma0 = 0;  // initial penalty parameter; 0 = automatic
};

SdpSolution solve(const SdpProblem& problem, const SolveOptions& options);

inline SdpSolution solve(const SdpProblem& problem, double tol = 1e-5, long max_iter = 50000) {
  SolveOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return solve(problem, opt);
}

// Rows are the vectors {X_0..X_{n-1}, I}; negative eigenvalues of the
// Gram matrix are clamped to zero before factorization.
Eigen::MatrixXd extract_vectors(const SdpSolution& solution);

// Recomputes every constraint residual from the Gram matrix.
FamilyViolations feasibility_report(const SdpSolution& solution);
FamilyViolations feasibility_report(const Eigen::MatrixXd& gram, int k,
                                    bool with_eigenvalue = true);

// Solution dump: header with metadata and residuals, then the Gram matrix
// in row-major decimal text.
void save_solution(const SdpSolution& solution, const std::string& path);
SdpSolution load_solution(const std::string& path);

}  // namespace dks
