#pragma once

#include <utility>
#include <vector>

#include "edgesim/convex.hpp"
#include "edgesim/topology.hpp"

namespace edgesim {

struct InterferenceEstimate {
  int S = 0, U = 0, M = 0;
  std::vector<double> w;  // watts, [s][u][m]

  void init(int s, int u, int m) {
    S = s; U = u; M = m;
    w.assign(size_t(s) * u * m, 0.0);
  }
  double& at(int s, int u, int m) { return w[(size_t(s) * U + u) * M + m]; }
  double at(int s, int u, int m) const { return w[(size_t(s) * U + u) * M + m]; }
};

// Eq. (26), stochastic-approximation form: I~ <- I~ + (1 - eta)(I - I~).
void update_interference(InterferenceEstimate& est,
                         const std::vector<double>& measured, double eta);

struct Association {
  int sbs = -1;
  bool hit = false;
};

// Covering SBSs that cache f, minimum total queue, ties by distance then id;
// fallback: nearest covering SBS with the request routed to the cloud.
Association associate_user(int u, int f,
                           const std::vector<int>& covering_sbs,
                           const std::vector<std::vector<int>>& cache_sorted,
                           const std::vector<double>& total_queue,
                           const NetworkState& net);

// Cluster-head split of `rb_ids` among members, proportional to backlog with
// the remainder handed out round-robin in member order.
std::vector<std::vector<int>> partition_rbs(const std::vector<double>& backlogs,
                                            const std::vector<int>& rb_ids);

// One SBS's slot subproblem, Eq. (37), after user association.
struct SbsInstance {
  int sbs = 0;
  std::vector<int> users;   // global user ids
  std::vector<int> rbs;     // global RB ids (the free inventory)
  int nu = 0, nm = 0;
  std::vector<std::pair<int, int>> pairs;  // (ui, f) with backlog
  std::vector<double> wq;        // per pair, (Q + Gamma) packets
  std::vector<double> w_pkts;    // per pair, W transmit slice in packets
  std::vector<double> fixed;     // per pair, Gamma * eps_u * Abar * T_sq
  std::vector<double> zeta_p;    // [ui][mi], CINR * p_max (dimensionless)
  double h = 0;                  // H_s(t)
  double alpha_omega = 0;        // alpha * omega (bits per slot per log2-unit)
  double lp = 1;                 // bits per packet
  double c = 1;                  // cost floor
  double v = 1;                  // Lyapunov V

  double zp(int ui, int mi) const { return zeta_p[size_t(ui) * nm + mi]; }
};

struct RelaxedSbsSolution {
  Vec delta;  // [ui][mi] in [0,1]
  Vec psi;    // per pair in [0,1]
  Vec x;      // [ui][mi] >= 0
  Vec z;      // per pair >= 0 (materialized rate slice, bits/slot)
  double e = 0;
  double objective = 0;
  CcpTrace trace;
};

RelaxedSbsSolution solve_sbs_subproblem(const SbsInstance& inst,
                                        const CcpOptions& opt);

// Greedy integral rounding: (ui, mi) by descending delta, RB-unique, at most
// H grants; each granted user is scheduled on its backlogged content of
// maximal (Q + Gamma) * psi.
struct RoundedSbs {
  std::vector<std::pair<int, int>> grants;  // (ui, mi)
  std::vector<int> content_of_user;         // per ui, -1 when idle
};

RoundedSbs round_decision(const SbsInstance& inst, const RelaxedSbsSolution& rel);

// Eq. (29) with the equal power split over all active RBs of the SBS: the
// per-(u, f) rate in bits/slot. `zeta_um` is indexed like zeta_p but holds
// plain CINR (per watt); power enters via p_max / total active RBs.
std::vector<double> rate_of(int nu, int nf,
                            const std::vector<std::pair<int, int>>& grants,
                            const std::vector<int>& content_of_user,
                            const std::vector<double>& zeta_um, int nm,
                            double p_max, double alpha, double omega);

// Cloud fronthaul program, Eq. (40), over backlogged (s, f) cells.
struct FronthaulInstance {
  int cells = 0;
  std::vector<double> q_pkts;      // cloud backlog per cell
  std::vector<double> gamma_pkts;  // cloud deficit per cell
  std::vector<double> w_pkts;      // W slice per cell
  std::vector<double> fixed;       // per cell, -Gamma * eps_s * T_sq / mu  (constant)
  double alpha = 0.5;
  double x_capacity = 1;  // X bits/slot
  double lp = 1;
  double c = 1;
  double v = 1;
};

struct FronthaulSolution {
  Vec nu;  // per cell, sum <= 1
  double b = 0;
  double objective = 0;
  CcpTrace trace;
};

FronthaulSolution solve_fronthaul(const FronthaulInstance& inst,
                                  const CcpOptions& opt);

}  // namespace edgesim
