#include "edgesim/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace edgesim {

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SimConfig: ") + what);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void SimConfig::validate() const {
  check(area_side > 0, "area_side must be positive");
  check(lambda_sbs >= 0 && lambda_ue >= 0, "densities must be non-negative");
  check(coverage_radius_frac > 0, "coverage_radius_frac must be positive");
  check(num_rbs >= 1, "M >= 1");
  check(bandwidth_per_rb > 0, "bandwidth_per_rb must be positive");
  check(tx_power_max > 0, "tx_power_max must be positive");
  check(noise_psd > 0, "noise_psd must be positive");
  check(alpha >= 0 && alpha <= 1, "0 <= alpha <= 1");
  check(fronthaul_capacity > 0, "fronthaul_capacity must be positive");
  check(catalog_size >= 1, "F >= 1");
  check(cache_size >= 1 && cache_size <= catalog_size, "d <= F");
  check(max_cache_updates >= 1, "N >= 1");
  check(bits_per_packet > 0, "bits_per_packet must be positive");
  check(mean_content_packets >= 1, "mean content size >= 1 packet");
  check(qos_latency_slots > 0, "T_sq > 0");
  check(cost_floor > 0, "cost floor c must be positive");
  check(t1 > t2 && t2 >= 1, "T1 > T2 >= 1");
  check(t_fix >= 1, "T_FIX >= 1");
  check(beta >= 0 && beta <= 1, "0 <= beta <= 1");
  check(xi_sbs > 0 && xi_cloud > 0, "temperatures must be positive");
  check(gamma1 > gamma2 && gamma2 > gamma3 && gamma3 > 0,
        "gamma1 > gamma2 > gamma3 > 0");
  check(lyapunov_v >= 1, "V >= 1");
  check(epsilon_u > 0 && epsilon_u <= 1, "epsilon_u in (0,1]");
  check(epsilon_s > 0 && epsilon_s <= 1, "epsilon_s in (0,1]");
  check(eta_interference > 0 && eta_interference < 1, "eta_I in (0,1)");
  check(request_prob >= 0 && request_prob <= 1, "rho_req in [0,1]");
  check(sigma_c2 > 0, "sigma_c2 must be positive");
  check(cluster_count >= 0, "cluster_count >= 0");
  check(action_space_cap >= 1, "action_space_cap >= 1");
  check(ccp_max_outer >= 1 && ccp_max_inner >= 1, "CCP budgets >= 1");
  check(pref_delta_min > 0, "delta_min > 0");
}

#define EDGESIM_CONFIG_FIELDS(X)                   \
  X(area_side, double)                             \
  X(lambda_sbs, double)                            \
  X(lambda_ue, double)                             \
  X(coverage_radius_frac, double)                  \
  X(topology_retry_cap, int)                       \
  X(num_rbs, int)                                  \
  X(bandwidth_per_rb, double)                      \
  X(tx_power_max, double)                          \
  X(noise_psd, double)                             \
  X(alpha, double)                                 \
  X(pathloss_exponent, double)                     \
  X(pathloss_ref_gain, double)                     \
  X(min_distance, double)                          \
  X(fronthaul_capacity, double)                    \
  X(catalog_size, int)                             \
  X(cache_size, int)                               \
  X(max_cache_updates, int)                        \
  X(bits_per_packet, double)                       \
  X(mean_content_packets, double)                  \
  X(qos_latency_slots, double)                     \
  X(cost_floor, double)                            \
  X(t1, int)                                       \
  X(t2, int)                                       \
  X(t_fix, int)                                    \
  X(beta, double)                                  \
  X(xi_sbs, double)                                \
  X(xi_cloud, double)                              \
  X(gamma1, double)                                \
  X(gamma2, double)                                \
  X(gamma3, double)                                \
  X(action_space_cap, int)                         \
  X(lyapunov_v, double)                            \
  X(epsilon_u, double)                             \
  X(epsilon_s, double)                             \
  X(eta_interference, double)                      \
  X(ccp_max_outer, int)                            \
  X(ccp_max_inner, int)                            \
  X(ccp_tol, double)                               \
  X(request_prob, double)                          \
  X(pref_delta_min, double)                        \
  X(pref_delta_lo, double)                         \
  X(pref_delta_hi, double)                         \
  X(pref_variance_lo, double)                      \
  X(pref_variance_hi, double)                      \
  X(sigma_c2, double)                              \
  X(cluster_count, int)                            \
  X(sbs_clustering, bool)                          \
  X(printed_cache_update_time, bool)               \
  X(rng_seed, uint64_t)

namespace {

double parse_double(const std::string& v) { return std::stod(v); }
int parse_int(const std::string& v) { return std::stoi(v); }
uint64_t parse_uint64_t(const std::string& v) { return std::stoull(v); }
bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument("SimConfig: boolean expected, got '" + v + "'");
}

}  // namespace

SimConfig SimConfig::from_map(const std::map<std::string, std::string>& kv) {
  return from_map(kv, SimConfig{});
}

SimConfig SimConfig::from_map(const std::map<std::string, std::string>& kv,
                              SimConfig cfg) {
  for (const auto& [key, value] : kv) {
    bool known = false;
#define EDGESIM_SET(name, type)          \
  if (key == #name) {                    \
    cfg.name = parse_##type(value);      \
    known = true;                        \
  }
    EDGESIM_CONFIG_FIELDS(EDGESIM_SET)
#undef EDGESIM_SET
    if (!known)
      throw std::invalid_argument("SimConfig: unknown key '" + key + "'");
  }
  return cfg;
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("SimConfig: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("SimConfig: bad line '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return from_map(kv);
}

void SimConfig::apply_env_overrides() {
  std::map<std::string, std::string> kv;
#define EDGESIM_ENV(name, type)                          \
  {                                                      \
    std::string env_key = "EDGESIM_";                    \
    for (const char* p = #name; *p; ++p)                 \
      env_key += char(std::toupper(*p));                 \
    if (const char* v = std::getenv(env_key.c_str()))    \
      kv[#name] = v;                                     \
  }
  EDGESIM_CONFIG_FIELDS(EDGESIM_ENV)
#undef EDGESIM_ENV
  *this = from_map(kv, *this);
}

std::map<std::string, std::string> SimConfig::to_map() const {
  std::map<std::string, std::string> kv;
  std::ostringstream os;
  os.precision(17);
#define EDGESIM_GET(name, type) \
  os.str("");                   \
  os << name;                   \
  kv[#name] = os.str();
  EDGESIM_CONFIG_FIELDS(EDGESIM_GET)
#undef EDGESIM_GET
  return kv;
}

}  // namespace edgesim
