#include "edgesim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "edgesim/baselines.hpp"

namespace edgesim {

namespace {
constexpr double kQEps = 1e-9;  // a queue below this counts as drained
}

std::string method_name(Method m) {
  switch (m) {
    case Method::PC: return "pc";
    case Method::PNC: return "pnc";
    case Method::B1: return "b1";
    case Method::B2: return "b2";
  }
  return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
  if (s == "pc") return Method::PC;
  if (s == "pnc") return Method::PNC;
  if (s == "b1") return Method::B1;
  if (s == "b2") return Method::B2;
  return std::nullopt;
}

World make_world(const SimConfig& cfg, Method method) {
  cfg.validate();
  World w;
  w.cfg = cfg;
  w.method = method;
  if (method == Method::PNC) w.cfg.sbs_clustering = false;

  Rng master(cfg.rng_seed);
  Rng rng_topo = master.fork(Rng::tag("topology"));
  w.rng_channel = master.fork(Rng::tag("channel"));
  w.rng_request = master.fork(Rng::tag("request"));
  w.rng_learner = master.fork(Rng::tag("learner"));
  w.rng_sched = master.fork(Rng::tag("sched"));
  w.rng_cluster = master.fork(Rng::tag("cluster"));
  Rng rng_cache = master.fork(Rng::tag("cache_init"));

  w.net = sample_topology(w.cfg, rng_topo);
  w.catalog = make_catalog(w.cfg, rng_topo);
  const int S = w.net.num_sbs, U = w.net.num_ue, F = w.catalog.size;

  w.prefs.reserve(U);
  for (int u = 0; u < U; ++u) w.prefs.push_back(make_preference(w.cfg, w.rng_request));

  w.cover_sbs_of_user.assign(U, {});
  w.cover_users_of_sbs.assign(S, {});
  const double rcov = w.cfg.coverage_radius();
  for (int s = 0; s < S; ++s)
    for (int u = 0; u < U; ++u)
      if (w.net.distance(s, u) <= rcov) {
        w.cover_sbs_of_user[u].push_back(s);
        w.cover_users_of_sbs[s].push_back(u);
      }

  w.ledger.init(S, U, F);
  w.interference.init(S, U, w.cfg.num_rbs);
  w.nu_alloc.assign(size_t(S) * F, 0.0);
  w.anchor.assign(U, -1);
  w.active_content.assign(U, -1);
  w.pf_avg_rate.assign(U, 0.0);
  w.freq_count.assign(size_t(S) * F, 0);

  // initial caches: uniform random d-subsets (the uniform-popularity prior)
  w.cache.assign(S, {});
  for (int s = 0; s < S; ++s) {
    std::vector<int> ids(F);
    std::iota(ids.begin(), ids.end(), 0);
    rng_cache.shuffle(ids);
    ids.resize(w.cfg.cache_size);
    std::sort(ids.begin(), ids.end());
    w.cache[s] = ids;
  }

  w.content_class_of.assign(S, std::vector<int>(F, 0));
  w.spaces.resize(S);
  w.learners.resize(S);
  w.rb_set.assign(S, {});
  w.cloud_space = enumerate_actions(F, 1, std::max(F + 1, w.cfg.action_space_cap));
  w.cloud_learner.reset(F);

  w.demand_accum.num_sbs = S;
  w.demand_accum.catalog = F;
  w.demand_accum.d.assign(size_t(S) * F, 0.0);
  w.demand_last = w.demand_accum;
  return w;
}

namespace {

struct SlotScratch {
  std::vector<int> requests;                  // per u, -1 = none
  std::vector<double> arr_user;               // [s][u][f] packets arriving
  std::vector<double> cloud_arrivals;         // [s][f] request counts
  std::vector<double> served_bits;            // [s][u][f]
  std::vector<double> j_cloud;                // [s][f]
  std::vector<double> tau;                    // per s
  std::vector<int> granted;                   // per s, new RBs this slot
  long ccp_iters = 0;
  int requests_seen = 0, hits = 0, drops = 0;
};

void contract(bool ok, long slot, const char* what) {
  if (!ok) {
    std::ostringstream os;
    os << "contract violation at slot " << slot << ": " << what;
    throw std::runtime_error(os.str());
  }
}

std::vector<double> member_backlogs(const World& w, const std::vector<int>& members) {
  std::vector<double> b;
  b.reserve(members.size());
  for (int s : members) b.push_back(w.ledger.total_at_sbs(s));
  return b;
}

// Full RB repartition at a clustering epoch: leases dissolve, every cluster
// reuses the whole band, members split it by backlog.
void repartition_all(World& w) {
  w.leases.clear();
  std::vector<int> all_rbs(w.cfg.num_rbs);
  std::iota(all_rbs.begin(), all_rbs.end(), 0);
  for (const auto& members : w.cluster_members) {
    auto split = partition_rbs(member_backlogs(w, members), all_rbs);
    for (size_t i = 0; i < members.size(); ++i) {
      w.rb_set[members[i]] = split[i];
      w.net.rb_inventory[members[i]] = int(split[i].size());
    }
  }
}

void recluster(World& w) {
  const int S = w.net.num_sbs, F = w.catalog.size;
  const DemandMatrix& dm =
      std::accumulate(w.demand_last.d.begin(), w.demand_last.d.end(), 0.0) > 0
          ? w.demand_last
          : w.demand_accum;

  if (!w.cfg.sbs_clustering || S == 1) {
    w.sbs_clusters.k = 1;
    w.sbs_clusters.labels.assign(S, 0);
    w.sbs_clusters.heads = {0};
  } else {
    SimilarityMatrix sim = sbs_similarity(dm);
    sim.check_valid(1e-9);
    w.sbs_clusters = spectral_cluster(sim, w.cfg.cluster_count, w.rng_cluster);
    select_cluster_heads(sim, w.sbs_clusters);
  }
  w.cluster_members = w.sbs_clusters.members();

  for (int s = 0; s < S; ++s) {
    std::vector<double> pop(F, 1.0 / F);
    if (!w.learners[s].strategy.empty() && !w.spaces[s].actions.empty()) {
      PopularityProfile prof =
          blend_popularity(w.learners[s].strategy, w.spaces[s],
                           w.cloud_learner.strategy, w.content_class_of[s],
                           w.cfg.beta);
      if (!prof.content_blend.empty()) pop = prof.content_blend;
    }
    SimilarityMatrix sim = content_similarity(dm.row(s), pop, w.cfg.sigma_c2);
    sim.check_valid(1e-9);
    ClusterAssignment cc = spectral_cluster(sim, w.cfg.cluster_count, w.rng_cluster);
    bool changed = (cc.k != w.spaces[s].num_classes) ||
                   (cc.labels != w.content_class_of[s]) ||
                   w.learners[s].strategy.empty();
    w.content_class_of[s] = cc.labels;
    if (changed) {
      w.spaces[s] =
          enumerate_actions(cc.k, w.cfg.max_cache_updates, w.cfg.action_space_cap);
      w.learners[s].reset(w.spaces[s].size());
      w.learners[s].committed_action = 0;
    }
  }
  repartition_all(w);

  if (!w.trace.cluster_dump_path.empty()) {
    nlohmann::json j;
    j["slot"] = w.slot;
    j["sbs_labels"] = w.sbs_clusters.labels;
    j["heads"] = w.sbs_clusters.heads;
    j["content_classes"] = w.content_class_of;
    std::ofstream out(w.trace.cluster_dump_path, std::ios::app);
    out << j.dump() << "\n";
  }
}

void commit_caches(World& w, SlotScratch& sc) {
  const int S = w.net.num_sbs;
  const double x_share = w.cfg.fronthaul_capacity / std::max(1, S);
  for (int s = 0; s < S; ++s) {
    std::vector<int> fetched;
    std::vector<int> next;
    if (w.method == Method::B1) {
      next = baseline_b1_cache(w.cache[s], w.catalog.size, w.cfg.cache_size,
                               w.cfg.max_cache_updates, w.rng_sched, &fetched);
    } else if (w.method == Method::B2) {
      std::vector<long> freq(w.freq_count.begin() + size_t(s) * w.catalog.size,
                             w.freq_count.begin() + size_t(s + 1) * w.catalog.size);
      next = baseline_b2_cache(w.cache[s], freq, w.cfg.cache_size,
                               w.cfg.max_cache_updates, &fetched);
    } else {
      PopularityProfile prof =
          blend_popularity(w.learners[s].strategy, w.spaces[s],
                           w.cloud_learner.strategy, w.content_class_of[s],
                           w.cfg.beta);
      CacheCommit commit =
          commit_cache(prof, w.spaces[s], w.content_class_of[s], w.cache[s],
                       w.cfg.cache_size, w.cfg.max_cache_updates, w.rng_learner);
      w.learners[s].committed_action = commit.action;
      next = commit.cache;
      fetched = commit.fetched;
    }
    contract(int(next.size()) <= w.cfg.cache_size, w.slot, "cache exceeds d");
    w.cache[s] = next;
    sc.tau[s] = cache_update_time(fetched, w.catalog.packets, x_share,
                                  w.cfg.bits_per_packet, w.cfg.max_cache_updates,
                                  w.cfg.printed_cache_update_time, true);
  }
  if (!w.trace.learner_checkpoint_path.empty() && w.method != Method::B1 &&
      w.method != Method::B2) {
    nlohmann::json j;
    j["slot"] = w.slot;
    for (int s = 0; s < S; ++s) {
      j["sbs"].push_back({{"strategy", w.learners[s].strategy},
                          {"regret", w.learners[s].regret_est},
                          {"util", w.learners[s].util_est},
                          {"cache", w.cache[s]}});
    }
    j["cloud_strategy"] = w.cloud_learner.strategy;
    std::ofstream out(w.trace.learner_checkpoint_path, std::ios::app);
    out << j.dump() << "\n";
  }
}

bool user_busy(const World& w, int u) {
  int s = w.anchor[u], f = w.active_content[u];
  if (s < 0 || f < 0) return false;
  if (w.ledger.qu(s, u, f) > kQEps) return true;
  auto it = w.pending.find({s, f});
  if (it != w.pending.end())
    for (const auto& pd : it->second)
      if (pd.u == u && pd.remaining > kQEps) return true;
  return false;
}

void handle_requests(World& w, SlotScratch& sc) {
  const int U = w.net.num_ue, F = w.catalog.size;
  for (int u = 0; u < U; ++u) {
    int f = sc.requests[u];
    if (f < 0) continue;
    contract(f < F, w.slot, "request outside catalog");
    if (w.cover_sbs_of_user[u].empty()) {
      sc.drops += 1;
      continue;
    }
    sc.requests_seen += 1;

    int s;
    bool hit;
    if (user_busy(w, u)) {
      s = w.anchor[u];
      hit = std::binary_search(w.cache[s].begin(), w.cache[s].end(), f);
    } else if (w.method == Method::B1) {
      const auto& cov = w.cover_sbs_of_user[u];
      s = cov[size_t(w.rng_sched.uniform_int(0, int64_t(cov.size()) - 1))];
      hit = std::binary_search(w.cache[s].begin(), w.cache[s].end(), f);
    } else if (w.method == Method::B2) {
      // nearest SBS with the content cached, else nearest covering
      s = -1;
      double best = 0;
      for (int cand : w.cover_sbs_of_user[u]) {
        if (!std::binary_search(w.cache[cand].begin(), w.cache[cand].end(), f))
          continue;
        double d = w.net.distance(cand, u);
        if (s < 0 || d < best - 1e-12) {
          s = cand;
          best = d;
        }
      }
      hit = s >= 0;
      if (s < 0) {
        for (int cand : w.cover_sbs_of_user[u]) {
          double d = w.net.distance(cand, u);
          if (s < 0 || d < best - 1e-12) {
            s = cand;
            best = d;
          }
        }
      }
    } else {
      std::vector<double> totals(w.net.num_sbs);
      for (int si = 0; si < w.net.num_sbs; ++si)
        totals[si] = w.ledger.total_at_sbs(si);
      Association a =
          associate_user(u, f, w.cover_sbs_of_user[u], w.cache, totals, w.net);
      s = a.sbs;
      hit = a.hit;
    }

    w.anchor[u] = s;
    w.active_content[u] = f;
    w.freq_count[size_t(s) * F + f] += 1;
    const double size = w.catalog.packets[f];
    if (hit) {
      sc.hits += 1;
      sc.arr_user[w.ledger.iuf(s, u, f)] += size;
    } else {
      sc.cloud_arrivals[w.ledger.isf(s, f)] += 1;
      w.pending[{s, f}].push_back({u, size});
    }
  }
}

std::vector<double> measure_interference(const World& w) {
  const int S = w.net.num_sbs, U = w.net.num_ue, M = w.cfg.num_rbs;
  std::vector<double> meas(size_t(S) * U * M, 0.0);
  std::vector<int> active_count(S, 0);
  for (const auto& l : w.prev_leases) active_count[l.s] += 1;
  for (const auto& l : w.prev_leases) {
    double p = w.cfg.tx_power_max / double(active_count[l.s]);
    for (int s = 0; s < S; ++s) {
      if (s == l.s) continue;
      for (int u = 0; u < U; ++u)
        meas[(size_t(s) * U + u) * M + l.m] += p * w.net.psi(l.s, u, l.m);
    }
  }
  return meas;
}

void dpp_decide(World& w, SlotScratch& sc) {
  const int S = w.net.num_sbs, F = w.catalog.size;
  CcpOptions opt;
  opt.max_outer = w.cfg.ccp_max_outer;
  opt.max_inner = w.cfg.ccp_max_inner;
  opt.tol = w.cfg.ccp_tol;

  for (int s = 0; s < S; ++s) {
    const std::vector<int>& free = w.rb_set[s];
    contract(int(free.size()) == w.net.rb_inventory[s], w.slot,
             "RB inventory out of sync");
    if (free.empty()) continue;  // H_s = 0: no matching is possible

    SbsInstance inst;
    inst.sbs = s;
    inst.rbs = free;
    inst.nm = int(free.size());
    inst.h = double(free.size());
    inst.alpha_omega = w.cfg.alpha * w.cfg.bandwidth_per_rb;
    inst.lp = w.cfg.bits_per_packet;
    inst.c = w.cfg.cost_floor;
    inst.v = w.cfg.lyapunov_v;
    // any backlog buffered at s is s's to serve, whatever the user's current
    // anchor (deliveries may land after the user re-anchored)
    for (int u = 0; u < w.net.num_ue; ++u) {
      bool backlog = false;
      for (int f = 0; f < F; ++f)
        if (w.ledger.qu(s, u, f) > kQEps) backlog = true;
      if (backlog) inst.users.push_back(u);
    }
    inst.nu = int(inst.users.size());
    if (inst.nu == 0) continue;

    inst.zeta_p.resize(size_t(inst.nu) * inst.nm);
    std::vector<double> mean_zeta(inst.nu, 0.0);
    for (int ui = 0; ui < inst.nu; ++ui) {
      for (int mi = 0; mi < inst.nm; ++mi) {
        double zeta = cinr(w.cfg, w.net, s, inst.users[ui], free[mi],
                           w.interference.at(s, inst.users[ui], free[mi]));
        inst.zeta_p[size_t(ui) * inst.nm + mi] = zeta * w.cfg.tx_power_max;
        mean_zeta[ui] += zeta;
      }
      mean_zeta[ui] /= inst.nm;
    }
    for (int ui = 0; ui < inst.nu; ++ui) {
      int u = inst.users[ui];
      double cap_pkts = inst.alpha_omega *
                        std::log2(1.0 + mean_zeta[ui] * w.cfg.tx_power_max) *
                        inst.h / inst.lp;
      for (int f = 0; f < F; ++f) {
        double q = w.ledger.qu(s, u, f);
        if (q <= kQEps) continue;
        inst.pairs.emplace_back(ui, f);
        inst.wq.push_back(q + w.ledger.gu(s, u, f));
        inst.w_pkts.push_back(std::min(q, std::max(cap_pkts, 1e-3)));
        double abar = std::max(w.ledger.abar[w.ledger.iuf(s, u, f)], 1e-6);
        inst.fixed.push_back(w.ledger.gu(s, u, f) * w.cfg.epsilon_u * abar *
                             w.catalog.qos_latency[f]);
      }
    }
    if (inst.pairs.empty()) continue;

    RelaxedSbsSolution rel = solve_sbs_subproblem(inst, opt);
    double scale = 1.0;
    for (double v : rel.trace.objectives) scale = std::max(scale, std::abs(v));
    contract(rel.trace.is_monotone(1e-9 * scale), w.slot,
             "CCP trace not monotone (SBS subproblem)");
    sc.ccp_iters += rel.trace.iterations;
    if (!w.trace.ccp_log_path.empty()) {
      std::ofstream out(w.trace.ccp_log_path, std::ios::app);
      out << w.slot << ",sbs" << s;
      for (double v : rel.trace.objectives) out << "," << v;
      out << "\n";
    }

    RoundedSbs rd = round_decision(inst, rel);
    contract(int(rd.grants.size()) <= w.net.rb_inventory[s], w.slot,
             "rounding exceeded RB inventory");
    for (const auto& [ui, mi] : rd.grants) {
      int f = rd.content_of_user[ui];
      contract(f >= 0, w.slot, "granted user without scheduled content");
      w.leases.push_back({s, inst.users[ui], f, free[mi]});
      sc.granted[s] += 1;
    }
  }

  // cloud fronthaul program over backlogged cells
  FronthaulInstance fin;
  std::vector<std::pair<int, int>> cells;
  for (int s = 0; s < S; ++s)
    for (int f = 0; f < F; ++f) {
      double q = w.ledger.qc(s, f), g = w.ledger.gc(s, f);
      if (q > kQEps || g > kQEps) {
        cells.emplace_back(s, f);
        fin.q_pkts.push_back(q);
        fin.gamma_pkts.push_back(g);
        fin.w_pkts.push_back(q);
        fin.fixed.push_back(-g * w.cfg.epsilon_s * w.catalog.qos_latency[f] *
                            w.catalog.packets[f]);
      }
    }
  fin.cells = int(cells.size());
  fin.alpha = w.cfg.alpha;
  fin.x_capacity = w.cfg.fronthaul_capacity;
  fin.lp = w.cfg.bits_per_packet;
  fin.c = w.cfg.cost_floor;
  fin.v = w.cfg.lyapunov_v;

  std::fill(w.nu_alloc.begin(), w.nu_alloc.end(), 0.0);
  if (fin.cells > 0) {
    FronthaulSolution fs = solve_fronthaul(fin, opt);
    double scale = 1.0;
    for (double v : fs.trace.objectives) scale = std::max(scale, std::abs(v));
    contract(fs.trace.is_monotone(1e-9 * scale), w.slot,
             "CCP trace not monotone (fronthaul)");
    sc.ccp_iters += fs.trace.iterations;
    for (int i = 0; i < fin.cells; ++i)
      w.nu_alloc[w.ledger.isf(cells[i].first, cells[i].second)] = fs.nu[i];
    if (!w.trace.ccp_log_path.empty()) {
      std::ofstream out(w.trace.ccp_log_path, std::ios::app);
      out << w.slot << ",fronthaul";
      for (double v : fs.trace.objectives) out << "," << v;
      out << "\n";
    }
  }
}

void apply_baseline(World& w, SlotScratch& sc, const BaselineDecision& dec) {
  for (const auto& l : dec.grants) {
    w.leases.push_back(l);
    sc.granted[l.s] += 1;
  }
  w.nu_alloc = dec.nu;
}

void check_slot_decision(const World& w, const SlotScratch& sc) {
  const int S = w.net.num_sbs;
  // (12e): new grants within the pre-grant inventory
  for (int s = 0; s < S; ++s)
    contract(sc.granted[s] <= w.net.rb_inventory[s], w.slot,
             "(12e) grants exceed inventory");
  // Definition 1 / (12g): an RB serves one user queue per SBS; ownership holds
  std::set<std::pair<int, int>> used;
  for (const auto& l : w.leases) {
    contract(used.insert({l.s, l.m}).second, w.slot, "(12g) RB double matched");
    contract(std::find(w.rb_set[l.s].begin(), w.rb_set[l.s].end(), l.m) !=
                 w.rb_set[l.s].end(),
             w.slot, "lease on RB not owned by SBS");
    contract(l.f >= 0, w.slot, "(12f) matched RB without scheduled content");
  }
  // (40b): unit fronthaul budget
  double nu_sum = 0;
  for (double v : w.nu_alloc) {
    contract(v >= -1e-12 && v <= 1.0 + 1e-9, w.slot, "nu outside [0,1]");
    nu_sum += v;
  }
  contract(nu_sum <= 1.0 + 1e-9, w.slot, "(40b) fronthaul budget exceeded");
  // (12b)
  for (int s = 0; s < S; ++s)
    contract(int(w.cache[s].size()) <= w.cfg.cache_size, w.slot,
             "(12b) cache over capacity");
}

void transmit_and_update(World& w, SlotScratch& sc, SlotRecord& rec) {
  const int S = w.net.num_sbs, U = w.net.num_ue, F = w.catalog.size;
  const int M = w.cfg.num_rbs;
  const double lp = w.cfg.bits_per_packet;
  const double noise = w.cfg.noise_power_per_rb();

  // equal power split over each SBS's active RBs
  std::vector<int> active_count(S, 0);
  for (const auto& l : w.leases) active_count[l.s] += 1;
  std::vector<std::vector<std::pair<int, double>>> on_rb(M);  // (sbs, power)
  for (const auto& l : w.leases)
    on_rb[l.m].emplace_back(l.s, w.cfg.tx_power_max / active_count[l.s]);

  for (const auto& l : w.leases) {
    double p = w.cfg.tx_power_max / active_count[l.s];
    double interf = 0;
    for (const auto& [s2, p2] : on_rb[l.m])
      if (s2 != l.s) interf += p2 * w.net.psi(s2, l.u, l.m);
    double sinr = p * w.net.psi(l.s, l.u, l.m) / (noise + interf);
    sc.served_bits[w.ledger.iuf(l.s, l.u, l.f)] +=
        w.cfg.alpha * w.cfg.bandwidth_per_rb * std::log2(1.0 + sinr);
  }

  // pre-update costs (zeroed at global clustering instants)
  const bool clustering_slot = (w.slot % w.cfg.t1 == 0);
  for (int s = 0; s < S; ++s) {
    double jmax = 0;
    for (int u = 0; u < U; ++u)
      for (int f = 0; f < F; ++f) {
        double q = w.ledger.qu(s, u, f);
        if (q <= kQEps) continue;
        double j = access_cost(q, sc.served_bits[w.ledger.iuf(s, u, f)], lp,
                               w.cfg.cost_floor);
        jmax = std::max(jmax, j);
      }
    rec.jmax_sbs[s] = clustering_slot ? 0.0 : jmax;
  }
  double jc_max = 0;
  for (int s = 0; s < S; ++s)
    for (int f = 0; f < F; ++f) {
      double q = w.ledger.qc(s, f);
      if (q <= kQEps) continue;
      double j = fronthaul_cost(q, w.nu_alloc[w.ledger.isf(s, f)], w.cfg.alpha,
                                w.cfg.fronthaul_capacity, lp, w.cfg.cost_floor);
      sc.j_cloud[w.ledger.isf(s, f)] = clustering_slot ? 0.0 : j;
      jc_max = std::max(jc_max, j);
    }
  rec.jmax_cloud = clustering_slot ? 0.0 : jc_max;

  // cloud service + fronthaul deliveries into the SBS queues
  for (int s = 0; s < S; ++s)
    for (int f = 0; f < F; ++f) {
      size_t i = w.ledger.isf(s, f);
      double q_old = w.ledger.q_cloud[i];
      double nu = w.nu_alloc[i];
      double service_pkts =
          (1.0 - w.cfg.alpha) * nu * w.cfg.fronthaul_capacity / lp;
      double drained = std::min(q_old, service_pkts);
      if (drained > 0) {
        auto it = w.pending.find({s, f});
        if (it != w.pending.end()) {
          double left = drained;
          auto& dq = it->second;
          while (left > kQEps && !dq.empty()) {
            double take = std::min(left, dq.front().remaining);
            dq.front().remaining -= take;
            left -= take;
            sc.arr_user[w.ledger.iuf(s, dq.front().u, f)] += take;
            if (dq.front().remaining <= kQEps) dq.pop_front();
          }
          if (dq.empty()) w.pending.erase(it);
        }
      }
      double q_new = step_cloud_queue(q_old, nu, sc.cloud_arrivals[i],
                                      w.catalog.packets[f], w.cfg.alpha,
                                      w.cfg.fronthaul_capacity, lp);
      contract(q_new >= 0, w.slot, "cloud queue negative");
      w.ledger.q_cloud[i] = q_new;
      double bound = w.cfg.epsilon_s * w.catalog.qos_latency[f] * w.catalog.packets[f];
      w.ledger.gamma_cloud[i] = step_deficit_queue(w.ledger.gamma_cloud[i], q_new, bound);
      w.ledger.qbar_cloud[i] +=
          (q_new - w.ledger.qbar_cloud[i]) / double(w.ledger.slots_seen + 1);
    }

  // user queues, arrival averages, deficits
  for (int s = 0; s < S; ++s)
    for (int u = 0; u < U; ++u)
      for (int f = 0; f < F; ++f) {
        size_t i = w.ledger.iuf(s, u, f);
        double served_pkts = sc.served_bits[i] / lp;
        double q_new = step_user_queue(w.ledger.q_user[i], served_pkts, sc.arr_user[i]);
        contract(q_new >= 0, w.slot, "user queue negative");
        w.ledger.q_user[i] = q_new;
        w.ledger.abar[i] += (sc.arr_user[i] - w.ledger.abar[i]) /
                            double(w.ledger.slots_seen + 1);
        w.ledger.qbar_user[i] +=
            (q_new - w.ledger.qbar_user[i]) / double(w.ledger.slots_seen + 1);
        double bound = w.cfg.epsilon_u * std::max(w.ledger.abar[i], 1e-6) *
                       w.catalog.qos_latency[f];
        w.ledger.gamma_user[i] = step_deficit_queue(w.ledger.gamma_user[i], q_new, bound);
      }
  w.ledger.slots_seen += 1;

  // PF memory for B2 (kept for every method so traces stay comparable)
  for (int u = 0; u < U; ++u) {
    double got = 0;
    for (int s = 0; s < S; ++s)
      for (int f = 0; f < F; ++f) got += sc.served_bits[w.ledger.iuf(s, u, f)];
    w.pf_avg_rate[u] = 0.99 * w.pf_avg_rate[u] + 0.01 * got;
  }

  // transmissions complete within the slot: every matched RB returns to the
  // cluster pool and is re-dealt by backlog; each cluster reuses the full
  // band, so ownership is per (cluster, RB) and the match holder cedes it
  std::vector<std::vector<int>> released(w.cluster_members.size());
  for (const auto& l : w.leases) {
    released[w.sbs_clusters.labels[l.s]].push_back(l.m);
    auto& set = w.rb_set[l.s];
    set.erase(std::remove(set.begin(), set.end(), l.m), set.end());
  }

  std::vector<int> h_arrival(S, 0);
  for (size_t c = 0; c < w.cluster_members.size(); ++c) {
    if (released[c].empty()) continue;
    std::sort(released[c].begin(), released[c].end());
    const auto& members = w.cluster_members[c];
    auto split = partition_rbs(member_backlogs(w, members), released[c]);
    for (size_t i = 0; i < members.size(); ++i) {
      for (int m : split[i]) w.rb_set[members[i]].push_back(m);
      std::sort(w.rb_set[members[i]].begin(), w.rb_set[members[i]].end());
      h_arrival[members[i]] = int(split[i].size());
    }
  }
  for (int s = 0; s < S; ++s) {
    w.net.rb_inventory[s] = step_resource_queue(
        w.net.rb_inventory[s], sc.granted[s], h_arrival[s], w.cfg.num_rbs);
    contract(int(w.rb_set[s].size()) == w.net.rb_inventory[s], w.slot,
             "rb_set / inventory mismatch");
  }
}

void learner_feedback(World& w, SlotScratch& sc, const SlotRecord& rec) {
  const int S = w.net.num_sbs, F = w.catalog.size;
  LearnRates sbs_rates{w.cfg.gamma1, w.cfg.gamma2, w.cfg.gamma3, w.cfg.xi_sbs};
  LearnRates cloud_rates{w.cfg.gamma1, w.cfg.gamma2, w.cfg.gamma3, w.cfg.xi_cloud};
  for (int s = 0; s < S; ++s) {
    double feedback = -(rec.jmax_sbs[s] + rec.qmax_sbs[s]);
    learn_step(w.learners[s], w.learners[s].committed_action, feedback, sbs_rates);
  }
  int played = w.rng_learner.sample_pmf(w.cloud_learner.strategy);
  double jmax = 0, qmax = 0;
  for (int s = 0; s < S; ++s) {
    jmax = std::max(jmax, sc.j_cloud[w.ledger.isf(s, played)]);
    qmax = std::max(qmax, w.ledger.qc(s, played));
  }
  cloud_learn_step(w.cloud_learner, played, -(jmax + qmax), cloud_rates);
  (void)F;
}

}  // namespace

void run_slot(World& w) {
  const int S = w.net.num_sbs, U = w.net.num_ue, F = w.catalog.size;
  w.leases.clear();  // matchings last one slot
  SlotScratch sc;
  sc.requests.assign(U, -1);
  sc.arr_user.assign(w.ledger.q_user.size(), 0.0);
  sc.cloud_arrivals.assign(w.ledger.q_cloud.size(), 0.0);
  sc.served_bits.assign(w.ledger.q_user.size(), 0.0);
  sc.j_cloud.assign(w.ledger.q_cloud.size(), 0.0);
  sc.tau.assign(S, 0.0);
  sc.granted.assign(S, 0);

  // (1) channel
  step_channel(w.cfg, w.net, w.rng_channel);

  // (2) requests + preference drift
  if (!w.trace_in.empty()) {
    if (w.slot < long(w.trace_in.size())) sc.requests = w.trace_in[w.slot];
  } else {
    for (int u = 0; u < U; ++u) {
      sc.requests[u] = sample_request(w.cfg, w.prefs[u], w.rng_request);
      evolve_preference(w.cfg, w.prefs[u], w.rng_request);
    }
  }
  w.trace_out.push_back(sc.requests);
  for (int s = 0; s < S; ++s)
    for (int u : w.cover_users_of_sbs[s])
      if (sc.requests[u] >= 0) w.demand_accum.at(s, sc.requests[u]) += 1;

  // demand window rolls over at cache-update boundaries
  if (w.slot > 0 && w.slot % w.cfg.t2 == 0) {
    w.demand_last = w.demand_accum;
    w.demand_accum.d.assign(w.demand_accum.d.size(), 0.0);
  }

  // (3) slow-timescale clustering
  if (w.slot % w.cfg.t1 == 0) recluster(w);

  // (4) cache commits
  if (w.slot % w.cfg.t2 == 0) commit_caches(w, sc);

  // (5) association + arrivals
  handle_requests(w, sc);

  // (6) interference estimator (input to the DPP solves)
  if (w.method == Method::PC || w.method == Method::PNC)
    update_interference(w.interference, measure_interference(w),
                        w.cfg.eta_interference);

  // (7)+(8) slot decisions
  if (w.method == Method::PC || w.method == Method::PNC) {
    dpp_decide(w, sc);
  } else if (w.method == Method::B1) {
    apply_baseline(w, sc, baseline_b1(w, w.rng_sched));
  } else {
    apply_baseline(w, sc, baseline_b2(w, w.rng_sched));
  }
  check_slot_decision(w, sc);

  // (9) transmission, queue and deficit dynamics, RB bookkeeping
  SlotRecord rec;
  rec.slot = w.slot;
  rec.jmax_sbs.assign(S, 0.0);
  rec.qmax_sbs.assign(S, 0.0);
  rec.tau = sc.tau;
  transmit_and_update(w, sc, rec);

  for (int s = 0; s < S; ++s) {
    double qmax = 0;
    for (int u = 0; u < U; ++u)
      for (int f = 0; f < F; ++f)
        qmax = std::max(qmax, w.ledger.qu(s, u, f));
    rec.qmax_sbs[s] = qmax;
  }
  double qc_max = 0;
  for (double v : w.ledger.q_cloud) qc_max = std::max(qc_max, v);
  rec.qmax_cloud = qc_max;

  // (10) learner feedback
  if (w.method == Method::PC || w.method == Method::PNC)
    learner_feedback(w, sc, rec);

  // (11) metrics
  rec.requests = sc.requests_seen;
  rec.hits = sc.hits;
  rec.drops = sc.drops;
  rec.ccp_iterations = sc.ccp_iters;
  double qtotal = 0;
  for (double v : w.ledger.q_user) qtotal += v;
  for (double v : w.ledger.q_cloud) qtotal += v;
  rec.queue_total = qtotal;
  long viol_u = 0, tot_u = 0, viol_c = 0, tot_c = 0;
  for (int s = 0; s < S; ++s)
    for (int u = 0; u < U; ++u)
      for (int f = 0; f < F; ++f) {
        size_t i = w.ledger.iuf(s, u, f);
        if (w.ledger.abar[i] <= 1e-9 && w.ledger.qbar_user[i] <= kQEps) continue;
        tot_u += 1;
        double bound = w.cfg.epsilon_u * std::max(w.ledger.abar[i], 1e-6) *
                       w.catalog.qos_latency[f];
        if (w.ledger.qbar_user[i] > bound) viol_u += 1;
      }
  for (int s = 0; s < S; ++s)
    for (int f = 0; f < F; ++f) {
      size_t i = w.ledger.isf(s, f);
      if (w.ledger.qbar_cloud[i] <= kQEps) continue;
      tot_c += 1;
      double bound =
          w.cfg.epsilon_s * w.catalog.qos_latency[f] * w.catalog.packets[f];
      if (w.ledger.qbar_cloud[i] > bound) viol_c += 1;
    }
  rec.qbar_user_viol = tot_u > 0 ? double(viol_u) / tot_u : 0.0;
  rec.qbar_cloud_viol = tot_c > 0 ? double(viol_c) / tot_c : 0.0;
  w.records.push_back(rec);

  if (!w.trace.queue_snapshot_path.empty()) {
    std::ofstream out(w.trace.queue_snapshot_path, std::ios::app);
    for (int s = 0; s < S; ++s)
      for (int u = 0; u < U; ++u)
        for (int f = 0; f < F; ++f) {
          double q = w.ledger.qu(s, u, f);
          if (q > kQEps)
            out << w.slot << ",qu_" << s << "_" << u << "_" << f << "," << q << "\n";
        }
    for (int s = 0; s < S; ++s)
      for (int f = 0; f < F; ++f) {
        double q = w.ledger.qc(s, f);
        if (q > kQEps) out << w.slot << ",qc_" << s << "_" << f << "," << q << "\n";
      }
  }
  if (!w.trace.decision_trace_path.empty()) {
    std::ofstream out(w.trace.decision_trace_path, std::ios::app);
    for (const auto& l : w.leases)
      out << w.slot << "," << l.s << "," << l.u << "," << l.f << "," << l.m << "\n";
  }

  w.prev_leases = w.leases;
  w.slot += 1;
}

RunResult run_horizon(World& w, long horizon) {
  for (long t = 0; t < horizon; ++t) run_slot(w);
  RunResult res;
  const long t1 = w.cfg.t1;
  for (size_t b = 0; b + size_t(t1) <= w.records.size(); b += size_t(t1)) {
    std::vector<SlotRecord> window(w.records.begin() + b,
                                   w.records.begin() + b + size_t(t1));
    res.frames.push_back(aggregate_metrics(window, w.sbs_clusters.labels,
                                           w.sbs_clusters.k, w.cfg.t2));
  }
  auto collect = [&](const char* name, auto&& get) {
    std::vector<double> vals;
    for (const auto& fr : res.frames) vals.push_back(get(fr));
    res.summary[name] = mean_ci95(vals);
  };
  if (!res.frames.empty()) {
    collect("worst_case_delay", [](const MetricsFrame& f) { return f.upsilon_total; });
    collect("cloud_cost", [](const MetricsFrame& f) { return f.upsilon_cloud; });
    collect("cluster_cost", [](const MetricsFrame& f) {
      double m = 0;
      for (double v : f.upsilon_cluster) m += v;
      return f.upsilon_cluster.empty() ? 0.0 : m / double(f.upsilon_cluster.size());
    });
    collect("hit_rate", [](const MetricsFrame& f) { return f.hit_rate; });
    collect("drop_count", [](const MetricsFrame& f) { return f.drop_count; });
    collect("mean_queue", [](const MetricsFrame& f) { return f.mean_queue; });
    collect("ccp_iterations", [](const MetricsFrame& f) { return f.ccp_iterations; });
    collect("constraint_violations", [](const MetricsFrame& f) { return f.violations; });
    collect("qbar_user_violation", [](const MetricsFrame& f) { return f.qbar_user_viol; });
    collect("qbar_cloud_violation", [](const MetricsFrame& f) { return f.qbar_cloud_viol; });
  }
  res.request_trace = w.trace_out;
  return res;
}

SimConfig apply_sweep_axis(SimConfig cfg, const std::string& axis, double value) {
  if (axis.empty() || axis == "none") return cfg;
  if (axis == "lambda_sbs") cfg.lambda_sbs = value;
  else if (axis == "lambda_ue") cfg.lambda_ue = value;
  else if (axis == "fronthaul") cfg.fronthaul_capacity = value;
  else if (axis == "request_prob") cfg.request_prob = value;
  else if (axis == "cache_size") cfg.cache_size = int(value);
  else if (axis == "beta") cfg.beta = value;
  else if (axis == "alpha") cfg.alpha = value;
  else if (axis == "epsilon") { cfg.epsilon_u = value; cfg.epsilon_s = value; }
  else throw std::invalid_argument("unknown sweep axis: " + axis);
  return cfg;
}

void export_request_trace(const std::string& path,
                          const std::vector<std::vector<int>>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  out << "slot,user,content\n";
  for (size_t t = 0; t < trace.size(); ++t)
    for (size_t u = 0; u < trace[t].size(); ++u)
      if (trace[t][u] >= 0) out << t << "," << u << "," << trace[t][u] << "\n";
}

std::vector<std::vector<int>> import_request_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::tuple<long, int, int>> rows;
  long max_slot = -1;
  int max_user = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long t;
    int u, f;
    if (std::sscanf(line.c_str(), "%ld,%d,%d", &t, &u, &f) != 3)
      throw std::runtime_error("bad trace line: " + line);
    rows.emplace_back(t, u, f);
    max_slot = std::max(max_slot, t);
    max_user = std::max(max_user, u);
  }
  std::vector<std::vector<int>> trace(size_t(max_slot + 1),
                                      std::vector<int>(size_t(max_user + 1), -1));
  for (auto& [t, u, f] : rows) trace[t][u] = f;
  return trace;
}

std::string topology_json(const World& w) {
  nlohmann::json j;
  j["seed"] = w.cfg.rng_seed;
  j["area_side"] = w.cfg.area_side;
  for (int s = 0; s < w.net.num_sbs; ++s)
    j["sbs"].push_back({w.net.sbs_x[s], w.net.sbs_y[s]});
  for (int u = 0; u < w.net.num_ue; ++u)
    j["ue"].push_back({w.net.ue_x[u], w.net.ue_y[u]});
  return j.dump();
}

void run_sweep(const RunPlan& plan, const SimConfig& base) {
  namespace fs = std::filesystem;
  fs::create_directories(plan.out_dir);
  const std::string results_path = plan.out_dir + "/results.csv";
  const std::string manifest_path = plan.out_dir + "/manifest.jsonl";

  std::set<std::string> done;
  if (plan.resume && fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      done.insert(j.at("run_id").get<std::string>());
    }
  }
  bool csv_exists = fs::exists(results_path) && plan.resume;

  std::vector<double> values = plan.values;
  if (values.empty()) values.push_back(0.0);
  const std::string axis = plan.sweep_axis.empty() ? "none" : plan.sweep_axis;

  for (Method m : plan.methods) {
    for (double value : values) {
      for (uint64_t seed : plan.seeds) {
        std::ostringstream id;
        id << method_name(m) << "_" << axis << "_" << value << "_" << seed;
        const std::string run_id = id.str();
        if (done.count(run_id)) continue;

        SimConfig cfg = apply_sweep_axis(base, axis, value);
        cfg.rng_seed = seed;
        cfg.validate();
        World w = make_world(cfg, m);
        RunResult res = run_horizon(w, plan.horizon);

        std::vector<MetricRow> rows;
        for (const auto& [metric, mc] : res.summary)
          rows.push_back({run_id, method_name(m), axis, value, metric, mc.first,
                          mc.second});
        write_metrics_csv(results_path, rows, csv_exists);
        csv_exists = true;

        nlohmann::json man;
        man["run_id"] = run_id;
        man["method"] = method_name(m);
        man["sweep_param"] = axis;
        man["value"] = value;
        man["seed"] = seed;
        man["horizon"] = plan.horizon;
        man["config"] = base.to_map();
        man["topology"] = nlohmann::json::parse(topology_json(w));
        std::ofstream mout(manifest_path, std::ios::app);
        mout << man.dump() << "\n";

        if (plan.trace_export) {
          std::ostringstream tp;
          tp << plan.out_dir << "/requests_" << axis << "_" << value << "_"
             << seed << ".csv";
          if (!fs::exists(tp.str()))
            export_request_trace(tp.str(), res.request_trace);
        }
      }
    }
  }
}

}  // namespace edgesim
