#include "edgesim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace edgesim {

MetricsFrame aggregate_metrics(const std::vector<SlotRecord>& window,
                               const std::vector<int>& sbs_cluster_label,
                               int num_clusters, int t2, bool partial) {
  if (window.empty()) throw std::invalid_argument("aggregate_metrics: empty window");
  const int S = int(window.front().jmax_sbs.size());
  MetricsFrame fr;
  fr.first_slot = window.front().slot;
  fr.last_slot = window.back().slot;
  fr.partial = partial || (int(window.size()) % t2 != 0);

  // nested means: slots grouped into T2 blocks (coarse cache epochs)
  auto nested_mean = [&](auto&& per_slot) {
    double outer = 0;
    int blocks = 0;
    for (size_t b = 0; b < window.size(); b += size_t(t2)) {
      size_t e = std::min(window.size(), b + size_t(t2));
      double inner = 0;
      for (size_t i = b; i < e; ++i) inner += per_slot(window[i]);
      outer += inner / double(e - b);
      ++blocks;
    }
    return outer / double(blocks);
  };

  fr.upsilon_sbs.resize(S);
  std::vector<double> tau_mean(S, 0.0);
  for (int s = 0; s < S; ++s) {
    double j = nested_mean([s](const SlotRecord& r) { return r.jmax_sbs[s]; });
    double q = nested_mean([s](const SlotRecord& r) { return r.qmax_sbs[s]; });
    fr.upsilon_sbs[s] = j + q;
    tau_mean[s] = nested_mean([s](const SlotRecord& r) { return r.tau[s]; });
  }
  fr.upsilon_cloud =
      nested_mean([](const SlotRecord& r) { return r.jmax_cloud; }) +
      nested_mean([](const SlotRecord& r) { return r.qmax_cloud; });

  fr.upsilon_cluster.assign(num_clusters, 0.0);
  std::vector<int> cluster_size(num_clusters, 0);
  for (int s = 0; s < S; ++s) {
    int c = sbs_cluster_label[s];
    fr.upsilon_cluster[c] += fr.upsilon_sbs[s] + tau_mean[s];
    cluster_size[c] += 1;
  }
  double cluster_mean = 0;
  for (int c = 0; c < num_clusters; ++c) {
    if (cluster_size[c] > 0) fr.upsilon_cluster[c] /= cluster_size[c];
    cluster_mean += fr.upsilon_cluster[c];
  }
  cluster_mean /= std::max(1, num_clusters);
  fr.upsilon_total = fr.upsilon_cloud + cluster_mean;

  long req = 0, hit = 0;
  for (const auto& r : window) {
    req += r.requests;
    hit += r.hits;
    fr.drop_count += r.drops;
    fr.mean_queue += r.queue_total;
    fr.ccp_iterations += double(r.ccp_iterations);
    fr.violations += r.violations;
    fr.qbar_user_viol += r.qbar_user_viol;
    fr.qbar_cloud_viol += r.qbar_cloud_viol;
  }
  fr.hit_rate = req > 0 ? double(hit) / double(req) : 0.0;
  fr.mean_queue /= double(window.size());
  fr.ccp_iterations /= double(window.size());
  fr.qbar_user_viol /= double(window.size());
  fr.qbar_cloud_viol /= double(window.size());
  return fr;
}

std::pair<double, double> mean_ci95(const std::vector<double>& samples) {
  if (samples.empty()) return {0.0, 0.0};
  double mean = 0;
  for (double v : samples) mean += v;
  mean /= double(samples.size());
  if (samples.size() < 2) return {mean, 0.0};
  double var = 0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= double(samples.size() - 1);
  double half = 1.959963985 * std::sqrt(var / double(samples.size()));
  return {mean, half};
}

void write_metrics_csv(const std::string& path, const std::vector<MetricRow>& rows,
                       bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("write_metrics_csv: cannot open " + path);
  if (!append)
    out << "run_id,method,sweep_param,value,metric,mean,ci95\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.run_id << ',' << r.method << ',' << r.sweep_param << ',';
    std::snprintf(buf, sizeof buf, "%.9e", r.sweep_value);
    out << buf << ',' << r.metric << ',';
    std::snprintf(buf, sizeof buf, "%.9e", r.mean);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.9e", r.ci95);
    out << buf << '\n';
  }
}

}  // namespace edgesim
