#include "edgesim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace edgesim {

namespace {
constexpr double kLogEps = 1e-9;
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

void update_interference(InterferenceEstimate& est,
                         const std::vector<double>& measured, double eta) {
  if (measured.size() != est.w.size())
    throw std::invalid_argument("update_interference: size mismatch");
  for (size_t i = 0; i < est.w.size(); ++i) {
    est.w[i] += (1.0 - eta) * (measured[i] - est.w[i]);
    if (est.w[i] < 0) est.w[i] = 0;
  }
}

Association associate_user(int u, int f,
                           const std::vector<int>& covering_sbs,
                           const std::vector<std::vector<int>>& cache_sorted,
                           const std::vector<double>& total_queue,
                           const NetworkState& net) {
  Association out;
  if (covering_sbs.empty()) return out;
  int best = -1;
  double best_q = 0, best_d = 0;
  for (int s : covering_sbs) {
    if (!std::binary_search(cache_sorted[s].begin(), cache_sorted[s].end(), f))
      continue;
    double q = total_queue[s];
    double d = net.distance(s, u);
    if (best < 0 || q < best_q - 1e-12 ||
        (std::abs(q - best_q) <= 1e-12 &&
         (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && s < best)))) {
      best = s;
      best_q = q;
      best_d = d;
    }
  }
  if (best >= 0) {
    out.sbs = best;
    out.hit = true;
    return out;
  }
  // nearest covering SBS, request served through the cloud
  for (int s : covering_sbs) {
    double d = net.distance(s, u);
    if (out.sbs < 0 || d < best_d - 1e-12 ||
        (std::abs(d - best_d) <= 1e-12 && s < out.sbs)) {
      out.sbs = s;
      best_d = d;
    }
  }
  out.hit = false;
  return out;
}

std::vector<std::vector<int>> partition_rbs(const std::vector<double>& backlogs,
                                            const std::vector<int>& rb_ids) {
  const int n = int(backlogs.size());
  std::vector<std::vector<int>> out(n);
  if (n == 0 || rb_ids.empty()) return out;
  double total = std::accumulate(backlogs.begin(), backlogs.end(), 0.0);
  std::vector<double> w(backlogs);
  if (total <= 0) {
    w.assign(n, 1.0);
    total = n;
  }
  const int count = int(rb_ids.size());
  std::vector<int> quota(n);
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    quota[i] = int(std::floor(count * w[i] / total));
    assigned += quota[i];
  }
  for (int i = 0; assigned < count; i = (i + 1) % n) {
    quota[i] += 1;
    assigned += 1;
  }
  int next = 0;
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < quota[i]; ++q) out[i].push_back(rb_ids[next++]);
  return out;
}

// ---------------------------------------------------------------------------
// Per-SBS subproblem. Variables pack as [delta | psi | x]; z and E are
// eliminated (z at its rate bound, E at the max-latency bound), which keeps
// the inner feasible set projectable. The chain rule through the active
// x <= bound(delta) clamp carries the rate value into delta.
// ---------------------------------------------------------------------------

namespace {

struct SbsLayout {
  int nu, nm, np;
  int od = 0, op, ox, dim;
  std::vector<std::vector<int>> pairs_of_user;

  explicit SbsLayout(const SbsInstance& inst)
      : nu(inst.nu), nm(inst.nm), np(int(inst.pairs.size())) {
    op = nu * nm;
    ox = op + np;
    dim = ox + nu * nm;
    pairs_of_user.resize(nu);
    for (int p = 0; p < np; ++p)
      pairs_of_user[inst.pairs[p].first].push_back(p);
  }
  int id(int u, int m) const { return u * nm + m; }
  int ip(int p) const { return op + p; }
  int ix(int u, int m) const { return ox + u * nm + m; }
};

double sbs_true_objective(const SbsInstance& inst, const SbsLayout& L,
                          const Vec& v) {
  double sum_delta = 0;
  for (int i = 0; i < L.op; ++i) sum_delta += v[i];
  std::vector<double> xu(L.nu, 0.0);
  for (int u = 0; u < L.nu; ++u)
    for (int m = 0; m < L.nm; ++m) xu[u] += v[L.ix(u, m)];
  double obj = inst.h * sum_delta;
  double e = 0;
  for (int p = 0; p < L.np; ++p) {
    double s = inst.alpha_omega * v[L.ip(p)] * xu[inst.pairs[p].first];
    obj += inst.wq[p] * s / inst.lp;
    double z = std::max(s, 0.0);
    e = std::max(e, inst.lp * inst.w_pkts[p] / (z + inst.c));
    obj += inst.fixed[p];
  }
  return obj - inst.v * e;
}

}  // namespace

RelaxedSbsSolution solve_sbs_subproblem(const SbsInstance& inst,
                                        const CcpOptions& opt) {
  RelaxedSbsSolution sol;
  SbsLayout L(inst);
  sol.delta.assign(size_t(L.nu) * L.nm, 0.0);
  sol.psi.assign(L.np, 0.0);
  sol.x.assign(size_t(L.nu) * L.nm, 0.0);
  sol.z.assign(L.np, 0.0);
  if (L.nu == 0 || L.nm == 0 || L.np == 0 || inst.h <= 0) {
    for (int p = 0; p < L.np; ++p)
      sol.e = std::max(sol.e, inst.lp * inst.w_pkts[p] / inst.c);
    sol.trace.objectives.push_back(0.0);
    return sol;
  }

  const double aw = inst.alpha_omega;
  double zmax = 0;
  for (double z : inst.zeta_p) zmax = std::max(zmax, z);
  const double xmax = std::log2(1.0 + zmax) + 1.0;

  // feasible start: delta/psi uniform small, x at the Eq.-(32) bound
  Vec v(L.dim, 0.0);
  for (int i = 0; i < L.op; ++i) v[i] = 0.5 / L.nu;
  for (int p = 0; p < L.np; ++p) v[L.ip(p)] = 0.5;
  {
    double t = 0;
    for (int i = 0; i < L.op; ++i) t += v[i];
    for (int u = 0; u < L.nu; ++u)
      for (int m = 0; m < L.nm; ++m)
        v[L.ix(u, m)] = std::max(
            std::log2(t + inst.zp(u, m) * v[L.id(u, m)] + kLogEps) -
                std::log2(t + kLogEps),
            0.0);
  }

  CcpProblem prob;
  prob.true_objective = [&inst, &L](const Vec& vv) {
    return sbs_true_objective(inst, L, vv);
  };
  prob.build_surrogate = [&inst, &L, aw, xmax](const Vec& vk) {
    // linearization state
    double tk = 0;
    for (int i = 0; i < L.op; ++i) tk += vk[i];
    std::vector<double> xku(L.nu, 0.0);
    for (int u = 0; u < L.nu; ++u)
      for (int m = 0; m < L.nm; ++m) xku[u] += vk[L.ix(u, m)];
    std::vector<double> psik(vk.begin() + L.op, vk.begin() + L.ox);
    const double tk_eps = tk + kLogEps;

    auto sbound = [&inst, &L, tk_eps](const Vec& vv, int u, int m, double t) {
      return std::log2(t + inst.zp(u, m) * vv[L.id(u, m)] + kLogEps) -
             (std::log2(tk_eps) + (t + kLogEps - tk_eps) / (tk_eps * kLn2));
    };
    auto surrogate_rate = [&inst, &L, aw, psik, xku](const Vec& vv, int p,
                                                     const std::vector<double>& xu) {
      int u = inst.pairs[p].first;
      double anchor = psik[p] + xku[u];
      double g2 = anchor * anchor +
                  2.0 * anchor * ((vv[L.ip(p)] - psik[p]) + (xu[u] - xku[u]));
      return 0.5 * aw * (g2 - vv[L.ip(p)] * vv[L.ip(p)] - xu[u] * xu[u]);
    };

    InnerProblem inner;
    inner.objective = [&inst, &L, surrogate_rate](const Vec& vv) {
      double sum_delta = 0;
      for (int i = 0; i < L.op; ++i) sum_delta += vv[i];
      std::vector<double> xu(L.nu, 0.0);
      for (int u = 0; u < L.nu; ++u)
        for (int m = 0; m < L.nm; ++m) xu[u] += vv[L.ix(u, m)];
      double obj = inst.h * sum_delta;
      double e = 0;
      for (int p = 0; p < L.np; ++p) {
        double s = surrogate_rate(vv, p, xu);
        obj += inst.wq[p] * s / inst.lp + inst.fixed[p];
        e = std::max(e, inst.lp * inst.w_pkts[p] / (std::max(s, 0.0) + inst.c));
      }
      return obj - inst.v * e;
    };
    inner.gradient = [&inst, &L, aw, psik, xku, tk_eps, surrogate_rate,
                      sbound](const Vec& vv) {
      Vec g(L.dim, 0.0);
      std::vector<double> xu(L.nu, 0.0);
      double t = 0;
      for (int i = 0; i < L.op; ++i) t += vv[i];
      for (int u = 0; u < L.nu; ++u)
        for (int m = 0; m < L.nm; ++m) xu[u] += vv[L.ix(u, m)];
      for (int i = 0; i < L.op; ++i) g[i] = inst.h;
      std::vector<double> gxu(L.nu, 0.0);
      int arg_p = -1;
      double emax = -1, arg_s = 0;
      for (int p = 0; p < L.np; ++p) {
        int u = inst.pairs[p].first;
        double anchor = psik[p] + xku[u];
        double ds_dpsi = aw * (anchor - vv[L.ip(p)]);
        double ds_dx = aw * (anchor - xu[u]);
        g[L.ip(p)] += inst.wq[p] * ds_dpsi / inst.lp;
        gxu[u] += inst.wq[p] * ds_dx / inst.lp;
        double s = surrogate_rate(vv, p, xu);
        double e = inst.lp * inst.w_pkts[p] / (std::max(s, 0.0) + inst.c);
        if (e > emax) {
          emax = e;
          arg_p = p;
          arg_s = s;
        }
      }
      if (arg_p >= 0 && arg_s > 0) {
        int u = inst.pairs[arg_p].first;
        double anchor = psik[arg_p] + xku[u];
        double z = std::max(arg_s, 0.0);
        double de_dz = -inst.lp * inst.w_pkts[arg_p] / ((z + inst.c) * (z + inst.c));
        g[L.ip(arg_p)] -= inst.v * de_dz * aw * (anchor - vv[L.ip(arg_p)]);
        gxu[u] -= inst.v * de_dz * aw * (anchor - xu[u]);
      }
      for (int u = 0; u < L.nu; ++u)
        for (int m = 0; m < L.nm; ++m) g[L.ix(u, m)] = gxu[u];
      // active x-clamps: route the rate gradient into delta
      for (int u = 0; u < L.nu; ++u) {
        for (int m = 0; m < L.nm; ++m) {
          double gx = gxu[u];
          if (gx <= 0) continue;
          double bnd = sbound(vv, u, m, t);
          if (vv[L.ix(u, m)] < bnd - 1e-9) continue;
          double base = 1.0 / ((t + inst.zp(u, m) * vv[L.id(u, m)] + kLogEps) * kLn2);
          double corr = 1.0 / (tk_eps * kLn2);
          for (int i = 0; i < L.op; ++i) g[i] += gx * (base - corr);
          g[L.id(u, m)] += gx * base * inst.zp(u, m);
        }
      }
      return g;
    };
    inner.project = [&inst, &L, xmax, sbound](Vec& vv) {
      for (int p = 0; p < L.np; ++p)
        vv[L.ip(p)] = std::clamp(vv[L.ip(p)], 0.0, 1.0);
      // delta: box, coupling to psi, RB budget
      std::vector<double> psi_sum(L.nu, 0.0);
      for (int p = 0; p < L.np; ++p)
        psi_sum[inst.pairs[p].first] += vv[L.ip(p)];
      Vec d(L.op);
      for (int u = 0; u < L.nu; ++u)
        for (int m = 0; m < L.nm; ++m)
          d[L.id(u, m)] =
              std::clamp(vv[L.id(u, m)], 0.0, std::min(1.0, psi_sum[u]));
      Vec ub(L.op, 1.0);
      project_capped_simplex(d, ub, inst.h);
      for (int i = 0; i < L.op; ++i) vv[i] = d[i];
      double t = 0;
      for (int i = 0; i < L.op; ++i) t += vv[i];
      for (int u = 0; u < L.nu; ++u)
        for (int m = 0; m < L.nm; ++m) {
          double bnd = std::max(sbound(vv, u, m, t), 0.0);
          vv[L.ix(u, m)] = std::clamp(vv[L.ix(u, m)], 0.0, std::min(bnd, xmax));
        }
    };
    return inner;
  };

  CcpOptions local = opt;
  sol.trace = ccp(prob, v, local);
  for (int i = 0; i < L.op; ++i) sol.delta[i] = v[i];
  for (int p = 0; p < L.np; ++p) sol.psi[p] = v[L.ip(p)];
  for (int u = 0; u < L.nu; ++u)
    for (int m = 0; m < L.nm; ++m) sol.x[L.id(u, m)] = v[L.ix(u, m)];
  std::vector<double> xu(L.nu, 0.0);
  for (int u = 0; u < L.nu; ++u)
    for (int m = 0; m < L.nm; ++m) xu[u] += sol.x[L.id(u, m)];
  for (int p = 0; p < L.np; ++p) {
    double s = inst.alpha_omega * sol.psi[p] * xu[inst.pairs[p].first];
    sol.z[p] = std::max(s, 0.0);
    sol.e = std::max(sol.e, inst.lp * inst.w_pkts[p] / (sol.z[p] + inst.c));
  }
  sol.objective = sol.trace.objectives.back();
  return sol;
}

RoundedSbs round_decision(const SbsInstance& inst, const RelaxedSbsSolution& rel) {
  RoundedSbs out;
  out.content_of_user.assign(inst.nu, -1);
  std::vector<std::pair<int, int>> order;
  for (int u = 0; u < inst.nu; ++u)
    for (int m = 0; m < inst.nm; ++m) order.emplace_back(u, m);
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
                     double da = rel.delta[a.first * inst.nm + a.second];
                     double db = rel.delta[b.first * inst.nm + b.second];
                     if (da != db) return da > db;
                     if (a.first != b.first) return a.first < b.first;
                     return a.second < b.second;
                   });
  std::vector<char> rb_used(inst.nm, 0);
  std::vector<char> has_backlog(inst.nu, 0);
  for (const auto& pr : inst.pairs) has_backlog[pr.first] = 1;
  int granted = 0;
  for (const auto& [u, m] : order) {
    if (granted >= int(inst.h)) break;
    if (rel.delta[u * inst.nm + m] <= 1e-9) break;
    if (rb_used[m] || !has_backlog[u]) continue;
    out.grants.emplace_back(u, m);
    rb_used[m] = 1;
    ++granted;
  }
  for (const auto& [u, m] : out.grants) {
    if (out.content_of_user[u] >= 0) continue;
    double best = -1;
    int bf = -1;
    for (int p = 0; p < int(inst.pairs.size()); ++p) {
      if (inst.pairs[p].first != u) continue;
      double w = inst.wq[p] * rel.psi[p];
      if (w > best + 1e-15) {
        best = w;
        bf = inst.pairs[p].second;
      }
    }
    out.content_of_user[u] = bf;
  }
  return out;
}

std::vector<double> rate_of(int nu, int nf,
                            const std::vector<std::pair<int, int>>& grants,
                            const std::vector<int>& content_of_user,
                            const std::vector<double>& zeta_um, int nm,
                            double p_max, double alpha, double omega) {
  std::vector<double> rate(size_t(nu) * nf, 0.0);
  const int total = int(grants.size());
  if (total == 0) return rate;
  for (const auto& [u, m] : grants) {
    int f = content_of_user[u];
    if (f < 0) continue;
    double sinr = zeta_um[size_t(u) * nm + m] * p_max / double(total);
    rate[size_t(u) * nf + f] += alpha * omega * std::log2(1.0 + sinr);
  }
  return rate;
}

// ---------------------------------------------------------------------------
// Fronthaul program. B is eliminated: under the linearized DC constraint the
// feasible B values per cell form an interval, so B*(nu) is the largest
// interval floor (clamped at 0). The surrogate set is tighter than the true
// one, which gives the monotone trace.
// ---------------------------------------------------------------------------

namespace {

struct FrontState {
  double b_true(const FronthaulInstance& inst, const Vec& nu) const {
    double b = 0;
    for (int i = 0; i < inst.cells; ++i) {
      double u = (1.0 - inst.alpha) * nu[i] * inst.x_capacity + inst.c;
      b = std::max(b, inst.lp * inst.w_pkts[i] / u);
    }
    return b;
  }
  double objective(const FronthaulInstance& inst, const Vec& nu, double b) const {
    double obj = -inst.v * b;
    for (int i = 0; i < inst.cells; ++i) {
      double coef = (1.0 - inst.alpha) * inst.x_capacity *
                    (inst.q_pkts[i] + inst.gamma_pkts[i]) / inst.lp;
      obj += coef * nu[i] + inst.fixed[i];
    }
    return obj;
  }
};

}  // namespace

FronthaulSolution solve_fronthaul(const FronthaulInstance& inst,
                                  const CcpOptions& opt) {
  FronthaulSolution sol;
  FrontState fs;
  if (inst.cells == 0) {
    sol.trace.objectives.push_back(0.0);
    return sol;
  }
  Vec nu(inst.cells, 0.0);

  CcpProblem prob;
  prob.true_objective = [&inst, &fs](const Vec& v) {
    return fs.objective(inst, v, fs.b_true(inst, v));
  };
  prob.build_surrogate = [&inst, &fs](const Vec& nuk) {
    // linearize at (B_true(nu_k), nu_k); tangency there makes the surrogate
    // floor coincide with the true floor, which carries the monotone trace
    const double b_at_k = fs.b_true(inst, nuk);
    std::vector<double> a(inst.cells);
    for (int i = 0; i < inst.cells; ++i)
      a[i] = b_at_k + (1.0 - inst.alpha) * nuk[i] * inst.x_capacity + inst.c;

    // Feasible-B floor under the linearized constraints; quiet NaN when the
    // surrogate set is empty at this nu.
    auto b_floor = [&inst, a](const Vec& v, int* arg) {
      double lo = 0, hi = std::numeric_limits<double>::max();
      int argi = -1;
      for (int i = 0; i < inst.cells; ++i) {
        double u = (1.0 - inst.alpha) * v[i] * inst.x_capacity + inst.c;
        double kappa = inst.lp * inst.w_pkts[i] + 0.5 * u * u - a[i] * u +
                       0.5 * a[i] * a[i];
        double disc = a[i] * a[i] - 2.0 * kappa;
        if (disc < 0) return std::numeric_limits<double>::quiet_NaN();
        double root = std::sqrt(disc);
        if (a[i] - root > lo) {
          lo = a[i] - root;
          argi = i;
        }
        hi = std::min(hi, a[i] + root);
      }
      if (lo > hi + 1e-9) return std::numeric_limits<double>::quiet_NaN();
      if (arg) *arg = argi;
      return lo;
    };

    InnerProblem inner;
    inner.objective = [&inst, &fs, b_floor](const Vec& v) {
      double b = b_floor(v, nullptr);
      if (std::isnan(b)) return -std::numeric_limits<double>::max();
      return fs.objective(inst, v, b);
    };
    inner.gradient = [&inst, b_floor, a](const Vec& v) {
      Vec g(inst.cells, 0.0);
      for (int i = 0; i < inst.cells; ++i)
        g[i] = (1.0 - inst.alpha) * inst.x_capacity *
               (inst.q_pkts[i] + inst.gamma_pkts[i]) / inst.lp;
      int argi = -1;
      double b = b_floor(v, &argi);
      if (!std::isnan(b) && argi >= 0 && b > 0) {
        int i = argi;
        double u = (1.0 - inst.alpha) * v[i] * inst.x_capacity + inst.c;
        double kappa = inst.lp * inst.w_pkts[i] + 0.5 * u * u - a[i] * u +
                       0.5 * a[i] * a[i];
        double disc = std::max(a[i] * a[i] - 2.0 * kappa, 1e-12);
        double dkappa_dnu = (u - a[i]) * (1.0 - inst.alpha) * inst.x_capacity;
        double dlo_dnu = dkappa_dnu / std::sqrt(disc);
        g[i] -= inst.v * dlo_dnu;
      }
      return g;
    };
    inner.project = [&inst](Vec& v) {
      Vec ub(inst.cells, 1.0);
      project_capped_simplex(v, ub, 1.0);
    };
    return inner;
  };

  sol.trace = ccp(prob, nu, opt);
  sol.nu = nu;
  sol.b = fs.b_true(inst, nu);
  sol.objective = sol.trace.objectives.back();
  return sol;
}

}  // namespace edgesim
