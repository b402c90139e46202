#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace edgesim {

// Every scalar knob of the simulation, defaulted to the canonical setup
// (Table-I values where the paper gives them; the rest documented here).
// Rates are per slot; one slot is one time unit.
struct SimConfig {
  // geometry / deployment
  double area_side = 10.0;    // meters, square area
  double lambda_sbs = 0.06;   // SBS per m^2
  double lambda_ue = 0.04;    // UE per m^2
  double coverage_radius_frac = 0.4;  // R_cov = frac * area_side
  int topology_retry_cap = 16;

  // radio
  int num_rbs = 10;                    // M
  double bandwidth_per_rb = 1.4e6;     // omega, Hz
  double tx_power_max = 0.1995262315;  // 23 dBm in watts
  double noise_psd = 3.981071706e-21;  // -174 dBm/Hz in W/Hz
  double alpha = 0.5;                  // access-link share of the slot
  double pathloss_exponent = 3.5;
  double pathloss_ref_gain = 1e-3;     // gain at 1 m (-30 dB)
  double min_distance = 1.0;           // meters, clamp below this

  // fronthaul / contents
  double fronthaul_capacity = 1.0e7;  // X, bits/slot
  int catalog_size = 20;              // F
  int cache_size = 5;                 // d
  int max_cache_updates = 3;          // N per T2 epoch
  double bits_per_packet = 16000.0;   // l_p (2000 bytes)
  double mean_content_packets = 200.0;  // mean of 1/mu_f
  double qos_latency_slots = 50.0;      // T_sq per content
  double cost_floor = 100.0;            // c, bits/slot

  // timescales
  int t1 = 300;   // clustering period
  int t2 = 10;    // cache-update period
  int t_fix = 10; // preference drift period

  // learning
  double beta = 0.5;        // local/global popularity tradeoff
  double xi_sbs = 0.02;     // SBS temperature
  double xi_cloud = 0.05;   // cloud temperature
  double gamma1 = 0.75;     // utility rate (fastest)
  double gamma2 = 0.65;     // regret rate
  double gamma3 = 0.55;     // strategy rate
  int action_space_cap = 10000;

  // scheduler
  double lyapunov_v = 10.0;
  double epsilon_u = 0.05;
  double epsilon_s = 0.05;
  double eta_interference = 0.8;  // smoothing coefficient of the estimator
  int ccp_max_outer = 8;          // in-simulation CCP budget
  int ccp_max_inner = 60;
  double ccp_tol = 1e-4;

  // requests
  double request_prob = 0.5;      // rho_req, per user per slot
  double pref_delta_min = 0.05;   // positivity floor for the Zipf exponent
  double pref_delta_lo = 0.5;     // initial exponent range
  double pref_delta_hi = 1.5;
  double pref_variance_lo = 0.1;  // phi_u^2 range
  double pref_variance_hi = 0.3;

  // clustering
  double sigma_c2 = 1.0;      // Eq.-(13) kernel width, relative to a T2 demand window
  int cluster_count = 0;      // 0 = eigengap auto-select
  bool sbs_clustering = true; // false = single all-SBS cluster (the PNC alias)

  // behavior switches
  bool printed_cache_update_time = true;  // Eq. (8) as printed vs corrected form

  uint64_t rng_seed = 1;

  // Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  // Flat key = value text, keys mirror the field names above.
  static SimConfig from_file(const std::string& path);
  static SimConfig from_map(const std::map<std::string, std::string>& kv);
  static SimConfig from_map(const std::map<std::string, std::string>& kv,
                            SimConfig base);
  // EDGESIM_<UPPERCASE_FIELD> overrides, applied on top of *this.
  void apply_env_overrides();

  std::map<std::string, std::string> to_map() const;

  double noise_power_per_rb() const { return noise_psd * bandwidth_per_rb; }
  double coverage_radius() const { return coverage_radius_frac * area_side; }
};

}  // namespace edgesim
