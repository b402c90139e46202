#pragma once

#include <vector>

#include "edgesim/config.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

// Physical layer snapshot: node placement, per-slot channel gains, free-RB
// inventory. Gains are power gains (dimensionless), redrawn every slot.
struct NetworkState {
  int num_sbs = 0;
  int num_ue = 0;
  int num_rbs = 0;
  std::vector<double> sbs_x, sbs_y;
  std::vector<double> ue_x, ue_y;
  std::vector<double> gain;      // [s][u][m]
  std::vector<int> rb_inventory; // H[s], free RBs held by each SBS
  long slot = 0;

  double psi(int s, int u, int m) const {
    return gain[(size_t(s) * num_ue + u) * num_rbs + m];
  }
  double& psi(int s, int u, int m) {
    return gain[(size_t(s) * num_ue + u) * num_rbs + m];
  }
  double distance(int s, int u) const;
};

// Per-slot exogenous draw z_s(t) = (A_s, h_s, Psi_s); filled in by the
// simulation loop, kept as a named record for audit dumps.
struct SystemState {
  std::vector<double> arrivals;   // packets per SBS
  std::vector<int> rb_arrival;    // h_s, in [0, M]
};

double pathloss_gain(const SimConfig& cfg, double dist);

// Poisson node counts, uniform placement; H starts as the even cluster-head
// partition (all SBSs in one initial cluster, zero backlog).
NetworkState sample_topology(const SimConfig& cfg, Rng& rng);

// Redraws every gain as pathloss(distance) x unit-mean exponential fading.
void step_channel(const SimConfig& cfg, NetworkState& net, Rng& rng);

// zeta = Psi / (sigma^2 * omega + I~), per-watt CINR of Eq. (29).
double cinr(const SimConfig& cfg, const NetworkState& net, int s, int u, int m,
            double est_interference);

}  // namespace edgesim
