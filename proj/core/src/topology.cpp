#include "edgesim/topology.hpp"

#include <cmath>
#include <stdexcept>

namespace edgesim {

double NetworkState::distance(int s, int u) const {
  double dx = sbs_x[s] - ue_x[u];
  double dy = sbs_y[s] - ue_y[u];
  return std::sqrt(dx * dx + dy * dy);
}

double pathloss_gain(const SimConfig& cfg, double dist) {
  double d = dist < cfg.min_distance ? cfg.min_distance : dist;
  return cfg.pathloss_ref_gain * std::pow(d, -cfg.pathloss_exponent);
}

NetworkState sample_topology(const SimConfig& cfg, Rng& rng) {
  const double area = cfg.area_side * cfg.area_side;
  int s_count = 0, u_count = 0;
  bool ok = false;
  for (int attempt = 0; attempt < cfg.topology_retry_cap; ++attempt) {
    s_count = rng.poisson(cfg.lambda_sbs * area);
    u_count = rng.poisson(cfg.lambda_ue * area);
    if (s_count > 0 && u_count > 0) {
      ok = true;
      break;
    }
  }
  if (!ok) throw std::runtime_error("degenerate topology");

  NetworkState net;
  net.num_sbs = s_count;
  net.num_ue = u_count;
  net.num_rbs = cfg.num_rbs;
  net.sbs_x.resize(s_count);
  net.sbs_y.resize(s_count);
  for (int s = 0; s < s_count; ++s) {
    net.sbs_x[s] = rng.uniform(0.0, cfg.area_side);
    net.sbs_y[s] = rng.uniform(0.0, cfg.area_side);
  }
  net.ue_x.resize(u_count);
  net.ue_y.resize(u_count);
  for (int u = 0; u < u_count; ++u) {
    net.ue_x[u] = rng.uniform(0.0, cfg.area_side);
    net.ue_y[u] = rng.uniform(0.0, cfg.area_side);
  }
  // even split of the M RBs, remainder round-robin by id
  net.rb_inventory.assign(s_count, cfg.num_rbs / s_count);
  for (int s = 0; s < cfg.num_rbs % s_count; ++s) net.rb_inventory[s] += 1;

  net.gain.assign(size_t(s_count) * u_count * cfg.num_rbs, 0.0);
  step_channel(cfg, net, rng);
  return net;
}

void step_channel(const SimConfig& cfg, NetworkState& net, Rng& rng) {
  for (int s = 0; s < net.num_sbs; ++s) {
    for (int u = 0; u < net.num_ue; ++u) {
      const double pl = pathloss_gain(cfg, net.distance(s, u));
      for (int m = 0; m < net.num_rbs; ++m)
        net.psi(s, u, m) = pl * rng.exponential(1.0);
    }
  }
}

double cinr(const SimConfig& cfg, const NetworkState& net, int s, int u, int m,
            double est_interference) {
  return net.psi(s, u, m) / (cfg.noise_power_per_rb() + est_interference);
}

}  // namespace edgesim
