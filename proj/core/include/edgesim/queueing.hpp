#pragma once

#include <vector>

#include "edgesim/config.hpp"

namespace edgesim {

// All queue state of one run. Queues are measured in packets and stored as
// reals: service is a rate divided by l_p, so fractional drain is normal.
struct QueueLedger {
  int S = 0, U = 0, F = 0;
  std::vector<double> q_user;      // [s][u][f] backlog toward user u at SBS s
  std::vector<double> q_cloud;     // [s][f] cloud backlog toward SBS s
  std::vector<double> gamma_user;  // [s][u][f] latency deficit
  std::vector<double> gamma_cloud; // [s][f]
  std::vector<double> abar;        // [s][u][f] running mean arrival rate
  std::vector<double> qbar_user;   // [s][u][f] running mean backlog
  std::vector<double> qbar_cloud;  // [s][f]
  long slots_seen = 0;

  void init(int s, int u, int f) {
    S = s; U = u; F = f;
    size_t suf = size_t(s) * u * f, sf = size_t(s) * f;
    q_user.assign(suf, 0); gamma_user.assign(suf, 0);
    abar.assign(suf, 0); qbar_user.assign(suf, 0);
    q_cloud.assign(sf, 0); gamma_cloud.assign(sf, 0); qbar_cloud.assign(sf, 0);
  }
  size_t iuf(int s, int u, int f) const { return (size_t(s) * U + u) * F + f; }
  size_t isf(int s, int f) const { return size_t(s) * F + f; }

  double& qu(int s, int u, int f) { return q_user[iuf(s, u, f)]; }
  double qu(int s, int u, int f) const { return q_user[iuf(s, u, f)]; }
  double& qc(int s, int f) { return q_cloud[isf(s, f)]; }
  double qc(int s, int f) const { return q_cloud[isf(s, f)]; }
  double& gu(int s, int u, int f) { return gamma_user[iuf(s, u, f)]; }
  double& gc(int s, int f) { return gamma_cloud[isf(s, f)]; }

  double total_at_sbs(int s) const {
    double t = 0;
    for (size_t i = iuf(s, 0, 0); i < iuf(s, 0, 0) + size_t(U) * F; ++i)
      t += q_user[i];
    return t;
  }
};

struct SlotCost {
  std::vector<double> j_user;   // [s][u][f] access latency, slots
  std::vector<double> j_cloud;  // [s][f] fronthaul latency, slots
  std::vector<double> tau;      // [s] cache-update time, slots
};

// Eq. (3): max(Q - served, 0) + arrived.
double step_user_queue(double q, double served, double arrived);

// Eq. (4): service (1-alpha)*nu*X bits -> packets via l_p; arrival is
// size_packets per uncached request.
double step_cloud_queue(double q, double nu, double uncached_requests,
                        double size_packets, double alpha, double fronthaul_x,
                        double bits_per_packet);

// Eq. (5) with our [0, M] clamp; throws std::logic_error on allocated > H.
int step_resource_queue(int h, int allocated, int h_arrival, int m_total);

// Eqs. (23)-(24): max(Gamma + Q(t+1) - bound, 0).
double step_deficit_queue(double gamma, double q_next, double bound);

// Eq. (6) with the rate already summed over RBs (bits/slot).
double access_cost(double w_packets, double rate_sum_bits, double bits_per_packet,
                   double cost_floor);

// Eq. (7).
double fronthaul_cost(double w_packets, double nu, double alpha,
                      double fronthaul_x, double bits_per_packet,
                      double cost_floor);

// Eq. (8). `fetch` lists the contents to be newly cached (already filtered to
// those not in the old cache); throws if more than N. `printed_form` keeps the
// formula exactly as published (size in the denominator); the corrected
// variant charges transfer bits / fronthaul rate.
double cache_update_time(const std::vector<int>& fetch,
                         const std::vector<double>& size_packets,
                         double fronthaul_rate_bits, double bits_per_packet,
                         int max_updates, bool printed_form, bool on_update_grid);

}  // namespace edgesim
