#include "edgesim/convex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

AffineFn linearize(const DiffFn& f, const Vec& x0) {
  AffineFn a;
  a.x0 = x0;
  a.f0 = f.value(x0);
  a.g = f.grad(x0);
  return a;
}

void project_box(Vec& x, const Vec& lo, const Vec& hi) {
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

void project_capped_simplex(Vec& x, const Vec& ub, double budget) {
  for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], 0.0, ub[i]);
  double sum = 0;
  for (double v : x) sum += v;
  if (sum <= budget) return;
  // bisection on the uniform shift theta with clamping
  double lo = 0, hi = 0;
  for (double v : x) hi = std::max(hi, v);
  for (int it = 0; it < 100; ++it) {
    double th = 0.5 * (lo + hi);
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i)
      s += std::clamp(x[i] - th, 0.0, ub[i]);
    if (s > budget)
      lo = th;
    else
      hi = th;
  }
  for (size_t i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i] - hi, 0.0, ub[i]);
}

SolveResult solve_convex(const InnerProblem& p, Vec start, int max_iter,
                         double tol) {
  SolveResult res;
  p.project(start);
  res.x = std::move(start);
  res.value = p.objective(res.x);
  double step = 1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    Vec g = p.gradient(res.x);
    bool improved = false;
    while (step > 1e-14) {
      Vec xn = res.x;
      for (size_t i = 0; i < xn.size(); ++i) xn[i] += step * g[i];
      p.project(xn);
      double vn = p.objective(xn);
      if (vn > res.value + 1e-12) {
        // measure movement before accepting for the stop criterion
        double move = 0;
        for (size_t i = 0; i < xn.size(); ++i)
          move = std::max(move, std::abs(xn[i] - res.x[i]));
        res.x = std::move(xn);
        double gain = vn - res.value;
        res.value = vn;
        step = std::min(step * 1.6, 1e6);
        improved = true;
        if (move < tol && gain < tol * (1.0 + std::abs(vn))) it = max_iter;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  res.iters = it;
  res.hit_cap = (it >= max_iter);
  return res;
}

CcpTrace ccp(const CcpProblem& p, Vec& x, const CcpOptions& opt) {
  CcpTrace trace;
  double prev = p.true_objective(x);
  trace.objectives.push_back(prev);
  for (int k = 0; k < opt.max_outer; ++k) {
    InnerProblem inner = p.build_surrogate(x);
    SolveResult res = solve_convex(inner, x, opt.max_inner, opt.tol * 1e-3);
    x = res.x;
    double cur = p.true_objective(x);
    trace.objectives.push_back(cur);
    trace.iterations = k + 1;
    if (cur - prev < opt.tol * (1.0 + std::abs(prev))) {
      trace.converged = true;
      break;
    }
    prev = cur;
  }
  return trace;
}

CcpProblem DcProgram::to_ccp() const {
  CcpProblem p;
  const DcProgram prog = *this;
  p.true_objective = [prog](const Vec& x) {
    return prog.concave_part.value(x) + prog.convex_part.value(x);
  };
  p.build_surrogate = [prog](const Vec& xk) {
    AffineFn lin = linearize(prog.convex_part, xk);
    InnerProblem inner;
    inner.objective = [prog, lin](const Vec& x) {
      return prog.concave_part.value(x) + lin(x);
    };
    inner.gradient = [prog, lin](const Vec& x) {
      Vec g = prog.concave_part.grad(x);
      for (size_t i = 0; i < g.size(); ++i) g[i] += lin.g[i];
      return g;
    };
    inner.project = [prog](Vec& x) {
      project_box(x, prog.lo, prog.hi);
      if (prog.budget >= 0) project_capped_simplex(x, prog.hi, prog.budget);
    };
    return inner;
  };
  return p;
}

DiffFn fn_log2_sum(double eps) {
  DiffFn f;
  f.value = [eps](const Vec& v) {
    double s = eps;
    for (double x : v) s += x;
    return std::log2(s);
  };
  f.grad = [eps](const Vec& v) {
    double s = eps;
    for (double x : v) s += x;
    return Vec(v.size(), 1.0 / (s * std::log(2.0)));
  };
  return f;
}

DiffFn fn_pair_square() {
  DiffFn f;
  f.value = [](const Vec& v) {
    double s = 0;
    for (double x : v) s += x;
    return s * s;
  };
  f.grad = [](const Vec& v) {
    double s = 0;
    for (double x : v) s += x;
    return Vec(v.size(), 2.0 * s);
  };
  return f;
}

DiffFn fn_half_square_sum() {
  DiffFn f;
  f.value = [](const Vec& v) {
    double s = v[0] + v[1];
    return 0.5 * s * s;
  };
  f.grad = [](const Vec& v) {
    double s = v[0] + v[1];
    return Vec{s, s};
  };
  return f;
}

DiffFn fn_square_plus_square() {
  DiffFn f;
  f.value = [](const Vec& v) { return v[0] * v[0] + v[1] * v[1]; };
  f.grad = [](const Vec& v) { return Vec{2.0 * v[0], 2.0 * v[1]}; };
  return f;
}

}  // namespace edgesim
