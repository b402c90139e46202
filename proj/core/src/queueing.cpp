#include "edgesim/queueing.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgesim {

double step_user_queue(double q, double served, double arrived) {
  return std::max(q - served, 0.0) + arrived;
}

double step_cloud_queue(double q, double nu, double uncached_requests,
                        double size_packets, double alpha, double fronthaul_x,
                        double bits_per_packet) {
  double service_pkts = (1.0 - alpha) * nu * fronthaul_x / bits_per_packet;
  return std::max(q - service_pkts, 0.0) + size_packets * uncached_requests;
}

int step_resource_queue(int h, int allocated, int h_arrival, int m_total) {
  if (allocated > h)
    throw std::logic_error("step_resource_queue: allocated RBs exceed inventory");
  int next = h - allocated + h_arrival;
  return std::clamp(next, 0, m_total);
}

double step_deficit_queue(double gamma, double q_next, double bound) {
  return std::max(gamma + q_next - bound, 0.0);
}

double access_cost(double w_packets, double rate_sum_bits, double bits_per_packet,
                   double cost_floor) {
  return bits_per_packet * w_packets / (rate_sum_bits + cost_floor);
}

double fronthaul_cost(double w_packets, double nu, double alpha,
                      double fronthaul_x, double bits_per_packet,
                      double cost_floor) {
  return bits_per_packet * w_packets /
         ((1.0 - alpha) * nu * fronthaul_x + cost_floor);
}

double cache_update_time(const std::vector<int>& fetch,
                         const std::vector<double>& size_packets,
                         double fronthaul_rate_bits, double bits_per_packet,
                         int max_updates, bool printed_form, bool on_update_grid) {
  if (!on_update_grid) return 0.0;
  if (int(fetch.size()) > max_updates)
    throw std::logic_error("cache_update_time: more than N updates requested");
  double tau = 0;
  for (int f : fetch) {
    if (printed_form)
      tau += bits_per_packet / (size_packets[f] * fronthaul_rate_bits);
    else
      tau += bits_per_packet * size_packets[f] / fronthaul_rate_bits;
  }
  return tau;
}

}  // namespace edgesim
