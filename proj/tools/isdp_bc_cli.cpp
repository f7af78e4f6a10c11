// isdp-bc: branch-and-cut for integer SDPs with Chvatal-Gomory cuts, plus the
// QTSP application. Subcommands: solve, generate, closure, bench.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "isdp/harness.hpp"
#include "isdp/model_json.hpp"

namespace {

int cmd_solve(const std::string& instance_path, const std::string& model_path,
              const std::string& setting_id, const std::string& routine,
              double time_limit, long node_limit, const std::string& out_csv,
              const std::string& cut_log_path, const std::string& lp_dump) {
  isdp::SolveLimits limits;
  if (time_limit > 0) limits.time_limit_sec = time_limit;
  if (node_limit > 0) limits.node_limit = node_limit;

  if (!model_path.empty()) {
    // generic ISDP model in the JSON interchange format
    const auto model =
        isdp::model_from_json(nlohmann::json::parse(isdp::slurp(model_path)));
    isdp::BcConfig cfg;
    cfg.routine = routine;
    cfg.limits = limits;
    if (!lp_dump.empty()) {
      std::ofstream os(lp_dump);
      isdp::write_lp_format(isdp::build_root_relaxation(model), os);
    }
    const auto r = isdp::solve_isdp(model, cfg);
    if (!cut_log_path.empty()) {
      std::ofstream os(cut_log_path);
      for (const auto& rec : r.cut_log) os << isdp::cut_log_json_line(rec) << "\n";
    }
    switch (r.status) {
      case isdp::IsdpSolveResult::Status::kOptimal:
        std::cout << "objective: " << r.value << "\nstatus: optimal  nodes: "
                  << r.stats.node_count << "  cuts: " << r.cuts.size()
                  << "  wall_ms: " << r.stats.wall_time_sec * 1000.0 << "\n";
        return 0;
      case isdp::IsdpSolveResult::Status::kInfeasible:
        std::cout << "status: infeasible\n";
        return 4;
      case isdp::IsdpSolveResult::Status::kLimit:
        if (r.x.empty()) {
          std::cout << "status: limit (no incumbent)\n";
          return 3;
        }
        std::cout << "objective: " << r.value << " (incumbent)\nstatus: limit  bound: "
                  << r.bound << "\n";
        return 0;
    }
    return 1;
  }

  const isdp::QtspInstance inst = isdp::load_instance(instance_path);
  const isdp::QtspSetting setting = isdp::parse_setting(setting_id);
  const isdp::QtspRun run = isdp::solve_qtsp(inst, setting, limits);
  const isdp::RunRecord rec =
      isdp::record_of(isdp::instance_stem(instance_path), setting, run);
  if (!out_csv.empty()) isdp::append_csv(out_csv, {rec});
  if (!cut_log_path.empty()) {
    std::ofstream os(cut_log_path);
    for (const auto& lr : run.cut_log) os << isdp::cut_log_json_line(lr) << "\n";
  }

  switch (run.status) {
    case isdp::IsdpSolveResult::Status::kOptimal: {
      std::cout << "objective: " << run.objective << "\n";
      std::cout << "tour:";
      for (int v : run.tour) std::cout << " " << (v + 1);
      std::cout << "\nstatus: optimal  nodes: " << run.stats.node_count
                << "  cuts: " << run.cuts_added
                << "  wall_ms: " << run.stats.wall_time_sec * 1000.0 << "\n";
      return 0;
    }
    case isdp::IsdpSolveResult::Status::kInfeasible:
      std::cout << "status: infeasible\n";
      return 4;
    case isdp::IsdpSolveResult::Status::kLimit:
      if (run.tour.empty()) {
        std::cout << "status: limit (no incumbent)\n";
        return 3;
      }
      std::cout << "objective: " << run.objective
                << " (incumbent)\nstatus: limit  best_bound: " << run.best_bound
                << "  nodes: " << run.stats.node_count << "\n";
      return 0;
  }
  return 1;
}

int cmd_closure(const std::string& model_path, const std::string& check_cut_path) {
  const auto model = isdp::model_from_json(nlohmann::json::parse(isdp::slurp(model_path)));
  if (!check_cut_path.empty()) {
    const auto j = nlohmann::json::parse(isdp::slurp(check_cut_path));
    std::vector<std::vector<double>> urows;
    for (const auto& r : j.at("U")) urows.push_back(r.get<std::vector<double>>());
    const isdp::SymMatrix u = isdp::SymMatrix::from_rows(urows, 1e-9);
    const auto coeffs = j.at("coeffs").get<std::vector<double>>();
    const double rhs = j.at("rhs").get<double>();
    isdp::LinearCut cut;
    try {
      cut = isdp::cut_from_dual_matrix(model, u, /*round_rhs=*/true);
    } catch (const std::invalid_argument& e) {
      std::cout << "cut validation failed: " << e.what() << "\n";
      return 1;
    }
    std::vector<double> dense(model.num_vars, 0.0);
    for (auto [c, v] : cut.terms) dense[c] = v;
    for (int i = 0; i < model.num_vars; ++i)
      if (std::abs(dense[i] - coeffs[i]) > 1e-6) {
        std::cout << "cut validation failed: coefficient " << i << " is " << dense[i]
                  << ", cut file has " << coeffs[i] << "\n";
        return 1;
      }
    if (std::abs(cut.rhs - rhs) > 1e-9) {
      std::cout << "cut validation failed: CG rhs is " << cut.rhs << ", cut file has "
                << rhs << "\n";
      return 1;
    }
    std::cout << "cut verified: CG-derivable from the given PSD dual matrix\n";
    return 0;
  }
  const auto closure = isdp::tdi_closure(model);
  for (size_t r = 0; r < closure.B.size(); ++r) {
    bool first = true;
    for (int i = 0; i < closure.m; ++i) {
      const long long c = closure.B[r][i];
      if (c == 0) continue;
      if (!first) std::cout << (c > 0 ? " + " : " - ");
      else if (c < 0)
        std::cout << "-";
      if (std::abs(c) != 1) std::cout << std::abs(c) << " ";
      std::cout << "x" << (i + 1);
      first = false;
    }
    if (first) std::cout << "0";
    std::cout << " <= " << closure.d[r] << "\n";
  }
  return 0;
}

int cmd_generate(const std::string& kind, int n, double p, int colors, int reload_class,
                 int n1, int n2, int n_target, uint64_t seed, bool ensure_tour,
                 const std::string& tsp_path, const std::string& out) {
  isdp::QtspInstance inst;
  if (kind == "reload") {
    isdp::ReloadSpec spec;
    spec.n = n;
    spec.p = p;
    spec.colors = colors;
    spec.reload_class = reload_class;
    spec.seed = seed;
    spec.ensure_tour = ensure_tour;
    inst = isdp::gen_reload(spec);
  } else if (kind == "grid") {
    inst = isdp::gen_grid(n1, n2, n_target, seed, ensure_tour);
  } else if (kind == "tsplib-angle") {
    inst = isdp::build_angle_instance(isdp::parse_tsplib(isdp::slurp(tsp_path)));
  } else {
    std::cerr << "unknown generator kind '" << kind << "'\n";
    return 2;
  }
  const std::string text = isdp::instance_to_string(inst);
  if (out.empty() || out == "-") {
    std::cout << text << "\n";
  } else {
    std::ofstream os(out);
    os << text << "\n";
    std::cout << "wrote " << out << " (n=" << inst.n << ", arcs=" << inst.arcs.size()
              << ", q entries=" << inst.q.size() << ")\n";
  }
  return 0;
}

int cmd_bench(const std::string& manifest_path, const std::string& out_csv,
              bool parallel, double time_limit) {
  auto manifest = isdp::parse_manifest(nlohmann::json::parse(isdp::slurp(manifest_path)));
  if (time_limit > 0) manifest.limits.time_limit_sec = time_limit;
  const auto records = isdp::run_bench(manifest, parallel);
  if (!out_csv.empty()) isdp::append_csv(out_csv, records);
  std::cout << isdp::kCsvHeader << "\n";
  for (const auto& r : records) std::cout << isdp::csv_line(r) << "\n";
  long failures = 0;
  for (const auto& r : records)
    if (r.status.rfind("error", 0) == 0) ++failures;
  if (failures > 0) std::cerr << failures << " row(s) failed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branch-and-cut for integer SDPs with CG cuts, and a QTSP solver"};
  app.require_subcommand(1);

  // solve
  std::string instance_path, model_path, setting_id = "sec", routine = "kt";
  std::string out_csv, cut_log_path, lp_dump;
  double time_limit = 0;
  long node_limit = 0;
  auto* solve = app.add_subcommand("solve", "solve a QTSP instance or an ISDP model");
  solve->add_option("--instance", instance_path, "QTSP instance (.tsp or .json)");
  solve->add_option("--model", model_path, "ISDP model (.json interchange format)");
  solve->add_option("--setting", setting_id,
                    "separation setting: kt|cg1|cg2|sec-simple|sec|sec-cg");
  solve->add_option("--routine", routine, "ISDP model routine: kt|cg");
  solve->add_option("--time-limit", time_limit, "wall time limit in seconds");
  solve->add_option("--node-limit", node_limit, "branch-and-bound node limit");
  solve->add_option("--out", out_csv, "append a RunRecord row to this CSV");
  solve->add_option("--cut-log", cut_log_path, "write the JSON-lines cut log here");
  solve->add_option("--lp-dump", lp_dump, "write the root LP in CPLEX-LP format");

  // generate
  std::string kind, tsp_path, gen_out;
  int n = 10, colors = 5, reload_class = 1, n1 = 4, n2 = 4, n_target = 12;
  double p = 1.0;
  uint64_t seed = 1;
  bool ensure_tour = false;
  auto* gen = app.add_subcommand("generate", "generate a QTSP instance");
  gen->add_option("--kind", kind, "reload | grid | tsplib-angle")->required();
  gen->add_option("--n", n, "reload: node count");
  gen->add_option("--p", p, "reload: arc probability");
  gen->add_option("--colors", colors, "reload: color count");
  gen->add_option("--class", reload_class, "reload: 1 (unit) or 2 (uniform 1..10)");
  gen->add_option("--n1", n1, "grid: lattice width");
  gen->add_option("--n2", n2, "grid: lattice height");
  gen->add_option("--n-target", n_target, "grid: connected cell count");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_flag("--ensure-tour", ensure_tour, "resample until a tour exists");
  gen->add_option("--tsp", tsp_path, "tsplib-angle: input .tsp file");
  gen->add_option("--out", gen_out, "output .json path (default stdout)");

  // closure
  std::string closure_model, check_cut;
  auto* closure = app.add_subcommand("closure", "print the TDI closure of a model");
  closure->add_option("--model", closure_model, "ISDP model (.json)")->required();
  closure->add_option("--check-cut", check_cut, "validate a cut file instead");

  // bench
  std::string manifest_path, bench_out;
  bool parallel = false;
  double bench_time_limit = 0;
  auto* bench = app.add_subcommand("bench", "run a manifest of instance x setting rows");
  bench->add_option("--manifest", manifest_path, "manifest .json")->required();
  bench->add_option("--out", bench_out, "results CSV path");
  bench->add_flag("--parallel", parallel, "one solve per thread (ISDP_BC_THREADS caps)");
  bench->add_option("--time-limit", bench_time_limit, "per-run wall limit in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) {
      if (instance_path.empty() == model_path.empty()) {
        std::cerr << "solve: provide exactly one of --instance or --model\n";
        return 2;
      }
      return cmd_solve(instance_path, model_path, setting_id, routine, time_limit,
                       node_limit, out_csv, cut_log_path, lp_dump);
    }
    if (gen->parsed())
      return cmd_generate(kind, n, p, colors, reload_class, n1, n2, n_target, seed,
                          ensure_tour, tsp_path, gen_out);
    if (closure->parsed()) return cmd_closure(closure_model, check_cut);
    if (bench->parsed()) return cmd_bench(manifest_path, bench_out, parallel,
                                          bench_time_limit);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
