#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/clustering.hpp"
#include "edgesim/config.hpp"
#include "edgesim/metrics.hpp"
#include "edgesim/queueing.hpp"
#include "edgesim/regret.hpp"
#include "edgesim/request.hpp"
#include "edgesim/scheduler.hpp"
#include "edgesim/topology.hpp"

namespace edgesim {

enum class Method { PC, PNC, B1, B2 };

std::string method_name(Method m);
std::optional<Method> method_from_string(const std::string& s);

// An RB held by SBS s serving (u, f); released once that backlog drains.
struct Lease {
  int s, u, f, m;
};

struct PendingDelivery {
  int u;
  double remaining;  // packets still to cross the fronthaul
};

// Debug/trace sinks, all off by default.
struct TraceOptions {
  std::string queue_snapshot_path;      // per-slot queue CSV
  std::string cluster_dump_path;        // JSON per T1 epoch
  std::string learner_checkpoint_path;  // JSON per T2 epoch
  std::string ccp_log_path;             // per-solve iteration log
  std::string decision_trace_path;      // per-slot committed decision CSV
};

struct World {
  SimConfig cfg;
  Method method = Method::PC;

  ContentCatalog catalog;
  NetworkState net;
  std::vector<UserPreference> prefs;
  std::vector<std::vector<int>> cover_sbs_of_user;
  std::vector<std::vector<int>> cover_users_of_sbs;

  QueueLedger ledger;

  // slow timescale
  ClusterAssignment sbs_clusters;
  std::vector<std::vector<int>> cluster_members;
  std::vector<std::vector<int>> content_class_of;  // per s, class per content
  std::vector<ActionSpace> spaces;                 // per s
  std::vector<CacheLearnerState> learners;         // per s
  ActionSpace cloud_space;
  CacheLearnerState cloud_learner;
  std::vector<std::vector<int>> cache;             // per s, sorted content ids
  std::vector<std::vector<int>> rb_set;            // per s, owned RB ids
  std::vector<long> freq_count;                    // [s][f] request tallies (B2)

  // fast timescale
  InterferenceEstimate interference;
  std::vector<Lease> leases;
  std::vector<Lease> prev_leases;
  std::map<std::pair<int, int>, std::deque<PendingDelivery>> pending;  // (s,f)
  std::vector<double> nu_alloc;  // [s][f]
  std::vector<int> anchor;          // per user, -1 = none
  std::vector<int> active_content;  // per user, -1 = idle
  std::vector<double> pf_avg_rate;  // per user, B2's PF memory

  // demand bookkeeping (Eq. 13 window = last completed T2 block)
  DemandMatrix demand_accum, demand_last;

  Rng rng_channel, rng_request, rng_learner, rng_sched, rng_cluster;

  std::vector<SlotRecord> records;
  long slot = 0;

  // optional request trace: replayed when set, recorded otherwise
  std::vector<std::vector<int>> trace_in;   // [slot][user] -> content or -1
  std::vector<std::vector<int>> trace_out;

  TraceOptions trace;

  World() : rng_channel(0), rng_request(0), rng_learner(0), rng_sched(0), rng_cluster(0) {}
};

World make_world(const SimConfig& cfg, Method method);

// One slot of the two-timescale loop; throws on any contract violation,
// naming the slot.
void run_slot(World& w);

struct RunResult {
  std::vector<MetricsFrame> frames;  // one per full T1 window
  std::map<std::string, std::pair<double, double>> summary;  // metric -> (mean, ci95)
  std::vector<std::vector<int>> request_trace;
};

RunResult run_horizon(World& w, long horizon);

struct RunPlan {
  std::vector<Method> methods;
  std::string sweep_axis;        // one of: lambda_sbs, lambda_ue, fronthaul,
                                 // request_prob, cache_size, beta, alpha, epsilon
  std::vector<double> values;    // empty = single run at the base config
  std::vector<uint64_t> seeds;
  long horizon = 1000;
  std::string out_dir;
  bool resume = false;
  bool trace_export = false;
};

SimConfig apply_sweep_axis(SimConfig cfg, const std::string& axis, double value);

// Runs every (method, value, seed) cell, appends results.csv + manifest.jsonl
// under plan.out_dir; request traces are shared across methods per seed.
void run_sweep(const RunPlan& plan, const SimConfig& base);

// Serialization helpers for the CLI and tests.
void export_request_trace(const std::string& path,
                          const std::vector<std::vector<int>>& trace);
std::vector<std::vector<int>> import_request_trace(const std::string& path);
std::string topology_json(const World& w);

}  // namespace edgesim
