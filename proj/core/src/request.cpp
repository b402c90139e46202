#include "edgesim/request.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace edgesim {

ContentCatalog make_catalog(const SimConfig& cfg, Rng& rng) {
  ContentCatalog cat;
  cat.size = cfg.catalog_size;
  cat.bits_per_packet = cfg.bits_per_packet;
  cat.packets.resize(cat.size);
  cat.qos_latency.assign(cat.size, cfg.qos_latency_slots);
  // sizes drawn once per run, uniform integer in [1, 2*mean - 1]
  int hi = std::max<int>(1, int(2 * cfg.mean_content_packets) - 1);
  for (int f = 0; f < cat.size; ++f)
    cat.packets[f] = double(rng.uniform_int(1, hi));
  return cat;
}

std::vector<double> zipf_pmf(double delta, int F) {
  if (!(delta > 0)) throw std::invalid_argument("zipf_pmf: delta must be > 0");
  if (F < 1) throw std::invalid_argument("zipf_pmf: F must be >= 1");
  std::vector<double> p(F);
  double z = 0;
  for (int f = 1; f <= F; ++f) {
    p[f - 1] = std::pow(double(f), -delta);
    z += p[f - 1];
  }
  for (double& x : p) x /= z;
  return p;
}

UserPreference make_preference(const SimConfig& cfg, Rng& rng) {
  UserPreference pref;
  pref.exponent = rng.uniform(cfg.pref_delta_lo, cfg.pref_delta_hi);
  pref.variance = rng.uniform(cfg.pref_variance_lo, cfg.pref_variance_hi);
  pref.permutation.resize(cfg.catalog_size);
  std::iota(pref.permutation.begin(), pref.permutation.end(), 0);
  rng.shuffle(pref.permutation);
  pref.pmf = zipf_pmf(pref.exponent, cfg.catalog_size);
  return pref;
}

int sample_request(const SimConfig& cfg, const UserPreference& pref, Rng& rng) {
  if (cfg.request_prob <= 0) return -1;
  if (cfg.request_prob < 1 && rng.uniform() >= cfg.request_prob) return -1;
  int rank = rng.sample_pmf(pref.pmf);
  return pref.permutation[rank];
}

void evolve_preference(const SimConfig& cfg, UserPreference& pref, Rng& rng) {
  if (pref.epoch_clock + 1 < cfg.t_fix) {
    pref.epoch_clock += 1;
    return;
  }
  // the preference drift moves the power-law exponent as a reflected walk;
  // the per-user rank ordering is fixed at setup (spatial variation)
  double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  pref.exponent = std::max(cfg.pref_delta_min, pref.exponent + sign * pref.variance);
  pref.pmf = zipf_pmf(pref.exponent, cfg.catalog_size);
  pref.epoch_clock = 0;
}

DemandMatrix demand_vector(const std::vector<int>& requests,
                           const std::vector<std::vector<int>>& covered_users,
                           int catalog_size) {
  DemandMatrix dm;
  dm.num_sbs = int(covered_users.size());
  dm.catalog = catalog_size;
  dm.d.assign(size_t(dm.num_sbs) * catalog_size, 0.0);
  for (int s = 0; s < dm.num_sbs; ++s)
    for (int u : covered_users[s]) {
      int f = requests[u];
      if (f >= 0) dm.at(s, f) += 1.0;
    }
  return dm;
}

}  // namespace edgesim
