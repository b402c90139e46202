#include "edgesim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace edgesim {

namespace {
constexpr double kQEps = 1e-9;

std::vector<int> backlogged_users(const World& w, int s) {
  std::vector<int> users;
  for (int u = 0; u < w.net.num_ue; ++u) {
    for (int f = 0; f < w.catalog.size; ++f)
      if (w.ledger.qu(s, u, f) > kQEps) {
        users.push_back(u);
        break;
      }
  }
  return users;
}

std::vector<int> free_rbs(const World& w, int s) { return w.rb_set[s]; }

std::vector<int> backlogged_contents(const World& w, int s, int u) {
  std::vector<int> fs;
  for (int f = 0; f < w.catalog.size; ++f)
    if (w.ledger.qu(s, u, f) > kQEps) fs.push_back(f);
  return fs;
}

}  // namespace

BaselineDecision baseline_b1(const World& w, Rng& rng) {
  BaselineDecision dec;
  dec.nu.assign(w.nu_alloc.size(), 0.0);
  for (int s = 0; s < w.net.num_sbs; ++s) {
    auto users = backlogged_users(w, s);
    if (users.empty()) continue;
    for (int m : free_rbs(w, s)) {
      int u = users[size_t(rng.uniform_int(0, int64_t(users.size()) - 1))];
      auto fs = backlogged_contents(w, s, u);
      int f = fs[size_t(rng.uniform_int(0, int64_t(fs.size()) - 1))];
      dec.grants.push_back({s, u, f, m});
    }
  }
  double total = 0;
  std::vector<size_t> cells;
  for (size_t i = 0; i < w.ledger.q_cloud.size(); ++i)
    if (w.ledger.q_cloud[i] > kQEps) cells.push_back(i);
  std::vector<double> draw(cells.size());
  for (size_t k = 0; k < cells.size(); ++k) {
    draw[k] = rng.uniform();
    total += draw[k];
  }
  if (total > 0)
    for (size_t k = 0; k < cells.size(); ++k) dec.nu[cells[k]] = draw[k] / total;
  return dec;
}

BaselineDecision baseline_b2(const World& w, Rng& rng) {
  (void)rng;
  BaselineDecision dec;
  dec.nu.assign(w.nu_alloc.size(), 0.0);
  const double noise = w.cfg.noise_power_per_rb();
  for (int s = 0; s < w.net.num_sbs; ++s) {
    auto users = backlogged_users(w, s);
    auto rbs = free_rbs(w, s);
    if (users.empty() || rbs.empty()) continue;

    // proportional-fair ranking: instantaneous over long-run average rate
    std::vector<std::pair<double, int>> ranked;
    for (int u : users) {
      double psi_mean = 0;
      for (int m : rbs) psi_mean += w.net.psi(s, u, m);
      psi_mean /= double(rbs.size());
      double inst = w.cfg.alpha * w.cfg.bandwidth_per_rb *
                    std::log2(1.0 + psi_mean * w.cfg.tx_power_max / noise);
      double weight = inst / std::max(w.pf_avg_rate[u], 1.0);
      ranked.emplace_back(weight, u);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    int take = std::min<int>(int(ranked.size()), int(rbs.size()));
    std::vector<int> sched;
    for (int i = 0; i < take; ++i) sched.push_back(ranked[i].second);

    for (int m : rbs) {
      int best_u = -1;
      double best_rssi = -1;
      for (int u : sched) {
        double rssi = w.cfg.tx_power_max * w.net.psi(s, u, m);
        if (rssi > best_rssi) {
          best_rssi = rssi;
          best_u = u;
        }
      }
      if (best_u < 0) continue;
      int best_f = -1;
      double best_q = 0;
      for (int f = 0; f < w.catalog.size; ++f) {
        double q = w.ledger.qu(s, best_u, f);
        if (q > best_q + 1e-12) {
          best_q = q;
          best_f = f;
        }
      }
      if (best_f >= 0) dec.grants.push_back({s, best_u, best_f, m});
    }
  }
  double total = 0;
  for (size_t i = 0; i < w.ledger.q_cloud.size(); ++i)
    if (w.ledger.q_cloud[i] > kQEps) total += w.ledger.q_cloud[i];
  if (total > 0)
    for (size_t i = 0; i < w.ledger.q_cloud.size(); ++i)
      if (w.ledger.q_cloud[i] > kQEps)
        dec.nu[i] = w.ledger.q_cloud[i] / total;
  return dec;
}

std::vector<int> baseline_b1_cache(const std::vector<int>& old_cache, int catalog,
                                   int cache_size, int max_updates, Rng& rng,
                                   std::vector<int>* fetched) {
  std::vector<int> ids(catalog);
  std::iota(ids.begin(), ids.end(), 0);
  rng.shuffle(ids);
  ids.resize(cache_size);
  std::set<int> old_set(old_cache.begin(), old_cache.end());
  std::set<int> next;
  std::vector<int> fetch;
  for (int f : ids) {
    if (old_set.count(f)) {
      next.insert(f);
    } else if (int(fetch.size()) < max_updates) {
      next.insert(f);
      fetch.push_back(f);
    }
  }
  for (int f : old_cache) {
    if (int(next.size()) >= cache_size) break;
    next.insert(f);
  }
  if (fetched) {
    std::sort(fetch.begin(), fetch.end());
    *fetched = fetch;
  }
  return std::vector<int>(next.begin(), next.end());
}

std::vector<int> baseline_b2_cache(const std::vector<int>& old_cache,
                                   const std::vector<long>& freq, int cache_size,
                                   int max_updates, std::vector<int>* fetched) {
  std::vector<int> ids(freq.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return a < b;
  });
  ids.resize(std::min<size_t>(ids.size(), size_t(cache_size)));
  std::set<int> old_set(old_cache.begin(), old_cache.end());
  std::set<int> next;
  std::vector<int> fetch;
  for (int f : ids) {
    if (old_set.count(f)) {
      next.insert(f);
    } else if (int(fetch.size()) < max_updates) {
      next.insert(f);
      fetch.push_back(f);
    }
  }
  for (int f : old_cache) {
    if (int(next.size()) >= cache_size) break;
    next.insert(f);
  }
  if (fetched) {
    std::sort(fetch.begin(), fetch.end());
    *fetched = fetch;
  }
  return std::vector<int>(next.begin(), next.end());
}

}  // namespace edgesim
