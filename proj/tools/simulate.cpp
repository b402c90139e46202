// Batch front end: runs the two-timescale loop for pc/pnc/b1/b2, sweeps one
// parameter axis over seeds, writes metric CSVs plus a JSON manifest.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgesim/sim.hpp"

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cloud-aided small cell network simulator"};

  std::string config_path, methods_arg = "pc", sweep_arg, seeds_arg = "1";
  std::string out_dir = "out";
  long horizon = 1000;
  bool resume = false, trace_export = false;
  std::string trace_import, topology_out;
  edgesim::TraceOptions trace;

  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--method", methods_arg, "comma list of pc|pnc|b1|b2");
  app.add_option("--sweep", sweep_arg, "axis=v1,v2,... (lambda_sbs, lambda_ue, "
                 "fronthaul, request_prob, cache_size, beta, alpha, epsilon)");
  app.add_option("--seeds", seeds_arg, "comma list of RNG seeds");
  app.add_option("--horizon", horizon, "slots per run")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--resume", resume, "skip cells already in the manifest");
  app.add_flag("--trace-export", trace_export, "write per-seed request traces");
  app.add_option("--trace-import", trace_import, "replay a request trace CSV");
  app.add_option("--topology-out", topology_out, "write the topology snapshot JSON");
  app.add_option("--queue-snapshots", trace.queue_snapshot_path,
                 "per-slot queue length CSV");
  app.add_option("--cluster-dump", trace.cluster_dump_path,
                 "cluster assignment JSON lines per T1 epoch");
  app.add_option("--learner-checkpoints", trace.learner_checkpoint_path,
                 "learner state JSON lines per T2 epoch");
  app.add_option("--ccp-log", trace.ccp_log_path, "CCP iteration log CSV");
  app.add_option("--decision-trace", trace.decision_trace_path,
                 "per-slot matching trace CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    edgesim::SimConfig cfg;
    if (!config_path.empty()) cfg = edgesim::SimConfig::from_file(config_path);
    cfg.apply_env_overrides();
    cfg.validate();

    edgesim::RunPlan plan;
    for (const auto& name : split(methods_arg, ',')) {
      auto m = edgesim::method_from_string(name);
      if (!m) {
        std::cerr << "unknown method: " << name << "\n";
        return 2;
      }
      plan.methods.push_back(*m);
    }
    if (!sweep_arg.empty()) {
      auto eq = sweep_arg.find('=');
      if (eq == std::string::npos) {
        std::cerr << "--sweep expects axis=v1,v2,...\n";
        return 2;
      }
      plan.sweep_axis = sweep_arg.substr(0, eq);
      for (const auto& v : split(sweep_arg.substr(eq + 1), ','))
        plan.values.push_back(std::stod(v));
    }
    for (const auto& s : split(seeds_arg, ','))
      plan.seeds.push_back(std::stoull(s));
    plan.horizon = horizon;
    plan.out_dir = out_dir;
    plan.resume = resume;
    plan.trace_export = trace_export;

    const bool single_cell = plan.methods.size() == 1 && plan.values.empty() &&
                             plan.seeds.size() == 1;
    const bool wants_aux = !trace_import.empty() || !topology_out.empty() ||
                           !trace.queue_snapshot_path.empty() ||
                           !trace.cluster_dump_path.empty() ||
                           !trace.learner_checkpoint_path.empty() ||
                           !trace.ccp_log_path.empty() ||
                           !trace.decision_trace_path.empty();
    if (single_cell && wants_aux) {
      // direct single-run path so debug sinks and trace replay can attach
      cfg.rng_seed = plan.seeds[0];
      edgesim::World w = edgesim::make_world(cfg, plan.methods[0]);
      w.trace = trace;
      if (!trace_import.empty())
        w.trace_in = edgesim::import_request_trace(trace_import);
      if (!topology_out.empty()) {
        std::ofstream out(topology_out);
        out << edgesim::topology_json(w) << "\n";
      }
      edgesim::RunResult res = edgesim::run_horizon(w, plan.horizon);
      std::filesystem::create_directories(plan.out_dir);
      std::vector<edgesim::MetricRow> rows;
      const std::string run_id =
          edgesim::method_name(plan.methods[0]) + "_single_" +
          std::to_string(plan.seeds[0]);
      for (const auto& [metric, mc] : res.summary)
        rows.push_back({run_id, edgesim::method_name(plan.methods[0]), "none",
                        0.0, metric, mc.first, mc.second});
      edgesim::write_metrics_csv(plan.out_dir + "/results.csv", rows, false);
      if (trace_export)
        edgesim::export_request_trace(plan.out_dir + "/requests.csv",
                                      res.request_trace);
    } else {
      edgesim::run_sweep(plan, cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
