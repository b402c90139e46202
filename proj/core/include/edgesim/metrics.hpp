#pragma once

#include <string>
#include <vector>

namespace edgesim {

// One slot's worth of recorded costs and counters.
struct SlotRecord {
  long slot = 0;
  std::vector<double> jmax_sbs;  // per s, max_{u,f} J_su^f
  std::vector<double> qmax_sbs;  // per s, max_{u,f} Q_su^f at slot end
  double jmax_cloud = 0;         // max_{s,f} J_cs^f
  double qmax_cloud = 0;         // max_{s,f} Q_cs^f at slot end
  std::vector<double> tau;       // per s, cache-update time charged this slot
  int requests = 0, hits = 0, drops = 0;
  double queue_total = 0;        // all queues, packets
  long ccp_iterations = 0;
  int violations = 0;
  double qbar_user_viol = 0;     // share of (s,u,f) violating (22c)
  double qbar_cloud_viol = 0;    // share of (s,f) violating (22d)
};

// Windowed aggregates, Eqs. (9)-(11): nested (1/T1)(1/T2) means of max-norm
// costs plus mean max-norm queues; tau_s joins the per-cluster cost.
struct MetricsFrame {
  long first_slot = 0, last_slot = 0;
  bool partial = false;
  std::vector<double> upsilon_sbs;      // per s
  std::vector<double> upsilon_cluster;  // per cluster
  double upsilon_cloud = 0;
  double upsilon_total = 0;
  double hit_rate = 0;
  double drop_count = 0;
  double mean_queue = 0;
  double ccp_iterations = 0;
  double violations = 0;
  double qbar_user_viol = 0;
  double qbar_cloud_viol = 0;
};

MetricsFrame aggregate_metrics(const std::vector<SlotRecord>& window,
                               const std::vector<int>& sbs_cluster_label,
                               int num_clusters, int t2, bool partial = false);

struct MetricRow {
  std::string run_id, method, sweep_param;
  double sweep_value = 0;
  std::string metric;
  double mean = 0, ci95 = 0;
};

// mean and normal-approximation ci95 half-width over samples
std::pair<double, double> mean_ci95(const std::vector<double>& samples);

// Deterministic formatting (%.9e) so identical runs are byte-identical.
void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows,
                       bool append);

}  // namespace edgesim
