#pragma once

// Solve/bench orchestration: instance loading, run records, the CSV results
// schema, and manifest-driven benchmarking with optional thread fan-out.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "isdp/instances.hpp"
#include "isdp/qtsp.hpp"

namespace isdp {

struct RunRecord {
  std::string instance_id;
  std::string setting;
  std::optional<double> objective;  // present iff optimal or limit with incumbent
  long node_count = 0;
  long cuts_added = 0;
  double wall_ms = 0.0;
  std::string status;  // optimal | infeasible | limit
};

inline constexpr const char* kCsvHeader = "instance,setting,objective,nodes,cuts,wall_ms";

inline std::string csv_line(const RunRecord& r) {
  std::ostringstream os;
  os << r.instance_id << ',' << r.setting << ',';
  if (r.objective) {
    os.precision(12);
    os << *r.objective;
  }
  os << ',' << r.node_count << ',' << r.cuts_added << ',' << r.wall_ms;
  return os.str();
}

inline void append_csv(const std::string& path, const std::vector<RunRecord>& records) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("append_csv: cannot open " + path);
  if (fresh) out << kCsvHeader << "\n";
  for (const auto& r : records) out << csv_line(r) << "\n";
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Loads .tsp (EUC_2D, complete angle-cost instance) or native .json files.
inline QtspInstance load_instance(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".tsp") return build_angle_instance(parse_tsplib(slurp(path)));
  if (ext == ".json") return instance_from_json(nlohmann::json::parse(slurp(path)));
  throw std::invalid_argument("load_instance: unknown extension '" + ext + "'");
}

inline std::string instance_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

inline RunRecord record_of(const std::string& id, QtspSetting setting, const QtspRun& run) {
  RunRecord r;
  r.instance_id = id;
  r.setting = setting_name(setting);
  r.node_count = run.stats.node_count;
  r.cuts_added = run.cuts_added;
  r.wall_ms = run.stats.wall_time_sec * 1000.0;
  switch (run.status) {
    case IsdpSolveResult::Status::kOptimal:
      r.status = "optimal";
      r.objective = run.objective;
      break;
    case IsdpSolveResult::Status::kInfeasible:
      r.status = "infeasible";
      break;
    case IsdpSolveResult::Status::kLimit:
      r.status = "limit";
      if (!run.tour.empty() || run.objective != 0.0) r.objective = run.objective;
      break;
  }
  return r;
}

struct BenchItem {
  std::string instance_path;
  std::string setting;
};

struct BenchManifest {
  std::vector<BenchItem> items;
  SolveLimits limits;
};

/// Manifest formats: {"runs":[{"instance":..,"setting":..}..]} or the cross
/// product {"instances":[..],"settings":[..]}, optionally with
/// "time_limit_sec" / "node_limit".
inline BenchManifest parse_manifest(const nlohmann::json& j) {
  BenchManifest m;
  if (j.contains("time_limit_sec")) m.limits.time_limit_sec = j.at("time_limit_sec");
  if (j.contains("node_limit")) m.limits.node_limit = j.at("node_limit");
  if (j.contains("runs")) {
    for (const auto& r : j.at("runs"))
      m.items.push_back({r.at("instance").get<std::string>(),
                         r.at("setting").get<std::string>()});
  } else {
    for (const auto& inst : j.at("instances"))
      for (const auto& s : j.at("settings"))
        m.items.push_back({inst.get<std::string>(), s.get<std::string>()});
  }
  return m;
}

inline int bench_thread_cap() {
  if (const char* env = std::getenv("ISDP_BC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return static_cast<int>(std::thread::hardware_concurrency());
}

/// Runs every manifest row; per-row failures are recorded and the run
/// continues. Records come back in manifest order regardless of parallelism
/// (each solve stays single-threaded).
inline std::vector<RunRecord> run_bench(const BenchManifest& manifest, bool parallel) {
  std::vector<RunRecord> records(manifest.items.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t at = next.fetch_add(1);
      if (at >= manifest.items.size()) break;
      const BenchItem& item = manifest.items[at];
      RunRecord rec;
      rec.instance_id = instance_stem(item.instance_path);
      rec.setting = item.setting;
      try {
        const QtspInstance inst = load_instance(item.instance_path);
        const QtspSetting setting = parse_setting(item.setting);
        const QtspRun run = solve_qtsp(inst, setting, manifest.limits);
        rec = record_of(rec.instance_id, setting, run);
      } catch (const std::exception& e) {
        rec.status = std::string("error: ") + e.what();
      }
      records[at] = std::move(rec);
    }
  };
  const int threads =
      parallel ? std::max(1, std::min<int>(bench_thread_cap(),
                                           static_cast<int>(manifest.items.size())))
               : 1;
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

}  // namespace isdp
