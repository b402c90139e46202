#pragma once

#include <functional>
#include <vector>

namespace edgesim {

using Vec = std::vector<double>;

struct DiffFn {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
};

// Tangent map of a differentiable function at x0. For convex f it is a global
// under-estimator; for concave f a global over-estimator.
struct AffineFn {
  double f0 = 0;
  Vec g;
  Vec x0;
  double operator()(const Vec& x) const {
    double v = f0;
    for (size_t i = 0; i < g.size(); ++i) v += g[i] * (x[i] - x0[i]);
    return v;
  }
};

AffineFn linearize(const DiffFn& f, const Vec& x0);

void project_box(Vec& x, const Vec& lo, const Vec& hi);

// Euclidean projection onto {0 <= x_i <= ub_i, sum_i x_i <= budget}.
void project_capped_simplex(Vec& x, const Vec& ub, double budget);

// One convexified subproblem: maximize `objective` over the feasible set
// encoded by `project` (projection doubles as feasibility restoration).
struct InnerProblem {
  std::function<double(const Vec&)> objective;
  std::function<Vec(const Vec&)> gradient;
  std::function<void(Vec&)> project;
};

struct SolveResult {
  Vec x;
  double value = 0;
  int iters = 0;
  bool hit_cap = false;
};

// Projected gradient ascent with backtracking; only improving steps are
// accepted, so the result is never worse than the start.
SolveResult solve_convex(const InnerProblem& p, Vec start, int max_iter,
                         double tol);

struct CcpOptions {
  int max_outer = 50;
  int max_inner = 500;
  double tol = 1e-6;
};

struct CcpTrace {
  std::vector<double> objectives;  // true DC objective after each outer iterate
  bool converged = false;
  int iterations = 0;

  bool is_monotone(double slack = 1e-9) const {
    for (size_t i = 1; i < objectives.size(); ++i)
      if (objectives[i] < objectives[i - 1] - slack) return false;
    return true;
  }
};

// Alg. 2 skeleton: consumers provide the true objective and a surrogate
// builder that convexifies around the current iterate.
struct CcpProblem {
  std::function<double(const Vec&)> true_objective;
  std::function<InnerProblem(const Vec& linpoint)> build_surrogate;
};

CcpTrace ccp(const CcpProblem& p, Vec& x, const CcpOptions& opt);

// Declarative DC objective (concave part kept, convex part linearized each
// outer iteration) over a box with an optional sum budget.
struct DcProgram {
  DiffFn concave_part;
  DiffFn convex_part;
  Vec lo, hi;
  double budget = -1;  // active when >= 0

  CcpProblem to_ccp() const;
};

// Differentiable pieces used by the scheduler's convexifications; their
// analytic gradients are finite-difference checked in the test suite.
DiffFn fn_log2_sum(double eps = 1e-9);  // g0(v) = log2(sum v + eps)
DiffFn fn_pair_square();                // g2(v) = (v0 + v1 + ... )^2
DiffFn fn_half_square_sum();            // g3(v) = 0.5 * (v0 + v1)^2
DiffFn fn_square_plus_square();         // g4(v) = v0^2 + v1^2

}  // namespace edgesim
