#pragma once

#include <vector>

#include "edgesim/config.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

struct ContentCatalog {
  int size = 0;
  std::vector<double> packets;      // 1/mu_f: content size in packets
  std::vector<double> qos_latency;  // T_sq per content, slots
  double bits_per_packet = 0;

  double bits(int f) const { return packets[f] * bits_per_packet; }
};

ContentCatalog make_catalog(const SimConfig& cfg, Rng& rng);

// Per-user Zipf law over a private rank permutation; the exponent drifts as a
// reflected random walk every T_FIX slots.
struct UserPreference {
  double exponent = 1.0;        // delta_u > 0
  std::vector<int> permutation; // rank -> content id, bijection on [0, F)
  double variance = 0.2;        // phi_u^2
  int epoch_clock = 0;
  std::vector<double> pmf;      // cached zipf_pmf(exponent, F)
};

UserPreference make_preference(const SimConfig& cfg, Rng& rng);

// p_f = f^-delta / sum_i i^-delta over ranks 1..F.
std::vector<double> zipf_pmf(double delta, int F);

// Returns the requested content id, or -1 for "no request this slot".
int sample_request(const SimConfig& cfg, const UserPreference& pref, Rng& rng);

void evolve_preference(const SimConfig& cfg, UserPreference& pref, Rng& rng);

struct DemandMatrix {
  int num_sbs = 0;
  int catalog = 0;
  std::vector<double> d;  // request counts [s][f]

  double& at(int s, int f) { return d[size_t(s) * catalog + f]; }
  double at(int s, int f) const { return d[size_t(s) * catalog + f]; }
  std::vector<double> row(int s) const {
    return std::vector<double>(d.begin() + size_t(s) * catalog,
                               d.begin() + size_t(s + 1) * catalog);
  }
};

// Exact per-SBS counts of this slot's requests over the coverage sets.
DemandMatrix demand_vector(const std::vector<int>& requests,
                           const std::vector<std::vector<int>>& covered_users,
                           int catalog_size);

}  // namespace edgesim
