#include "dualsrc/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

#include "dualsrc/bounds.hpp"
#include "dualsrc/config.hpp"
#include "dualsrc/dp_oracle.hpp"
#include "dualsrc/errors.hpp"
#include "dualsrc/experiments.hpp"
#include "dualsrc/simulator.hpp"
#include "dualsrc/testbed.hpp"

namespace dualsrc {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> grid_fallback;
  bool trace = false;
};

// Effective run settings after command-line overrides.
struct Run {
  Json config;
  std::string hash;
  fs::path out_dir;
  SimulationConfig sim;
  OptimizerSettings optimizer;
  int workers = 1;
};

const std::set<std::string> kTopLevelKeys{"seed",  "out_dir",  "workers",  "instance", "policy",
                                          "families", "simulation", "optimizer", "testbed",
                                          "longlead", "sweep",  "dp"};

Run prepare(const Flags& flags) {
  Run run;
  run.config = load_json_file(flags.config);
  if (!run.config.is_object()) throw ValidationError("config root must be a JSON object");
  for (const auto& [k, v] : run.config.items())
    if (!kTopLevelKeys.count(k)) throw ValidationError("unknown top-level key '" + k + "'");

  Json sim = run.config.value("simulation", Json::object());
  if (run.config.contains("seed")) sim["seed"] = run.config["seed"];
  if (flags.seed) sim["seed"] = *flags.seed;
  run.config["simulation"] = sim;
  run.config.erase("seed");
  Json opt = run.config.value("optimizer", Json::object());
  if (flags.grid_fallback) opt["grid_points"] = *flags.grid_fallback;
  run.config["optimizer"] = opt;
  run.workers = flags.workers.value_or(run.config.value("workers", 1));
  run.config.erase("workers");

  run.sim = simulation_from_json(sim);
  run.optimizer = optimizer_from_json(opt, run.sim);
  if (!flags.out_dir.empty())
    run.out_dir = flags.out_dir;
  else
    run.out_dir = run.config.value("out_dir", std::string("out"));
  run.config.erase("out_dir");
  // Hash the effective settings, not the output location or worker count.
  run.hash = config_hash(run.config);
  fs::create_directories(run.out_dir);
  return run;
}

std::ofstream open_output(const Run& run, const std::string& name) {
  std::ofstream f(run.out_dir / name);
  if (!f) throw ValidationError("cannot write " + (run.out_dir / name).string());
  return f;
}

const Json& section(const Run& run, const char* key) {
  if (!run.config.contains(key))
    throw ValidationError(std::string("config is missing the '") + key + "' section");
  return run.config.at(key);
}

std::vector<PolicyFamily> families_of(const Run& run, std::vector<PolicyFamily> fallback) {
  if (!run.config.contains("families")) return fallback;
  std::vector<PolicyFamily> out;
  for (const auto& f : run.config.at("families")) {
    if (!f.is_string()) throw ValidationError("families must be a list of names");
    out.push_back(policy_family_from_string(f.get<std::string>()));
  }
  if (out.empty()) throw ValidationError("families must not be empty");
  return out;
}

std::string num(double x) { return format_number(x); }

std::string params_json(const PolicyParams& p) { return to_json(p).dump(); }

const char* kEstimateHeader =
    "family,policy,cost,halfwidth,expedite_cost,regular_cost,holding_cost,backlog_cost,periods,"
    "batches,converged,var_q_r,mean_q_r,mean_q_e,violations,lower_bound,gap,seed,config_hash";

void write_estimate_row(std::ostream& out, const PolicyParams& p, const CostEstimate& e,
                        const Instance& inst, const Run& run) {
  std::string policy = params_json(p);
  // Quote the JSON so commas inside stay in one CSV field.
  std::string quoted = "\"";
  for (char c : policy) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  quoted += '"';
  const auto gap = gap_certificate(e, inst);
  out << to_string(p.family) << ',' << quoted << ',' << num(e.mean) << ',' << num(e.halfwidth)
      << ',' << num(e.components.expedite) << ',' << num(e.components.regular) << ','
      << num(e.components.holding) << ',' << num(e.components.backlog) << ',' << e.periods_used
      << ',' << e.batches << ',' << (e.converged ? 1 : 0) << ',' << num(e.order_variance_regular)
      << ',' << num(e.mean_regular_order) << ',' << num(e.mean_expedited_order) << ','
      << e.attainability_violations << ',' << num(lower_bound(inst)) << ','
      << (gap ? num(*gap) : std::string()) << ',' << run.sim.seed << ',' << run.hash << '\n';
}

int cmd_evaluate(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const Instance inst = instance_from_json(section(run, "instance"));
  const PolicyParams policy = policy_from_json(section(run, "policy"));
  CostEstimate e;
  if (flags.trace) {
    auto trace = open_output(run, "trace.csv");
    e = simulate(policy, inst, run.sim, &trace);
  } else {
    e = simulate(policy, inst, run.sim);
  }
  auto csv = open_output(run, "results.csv");
  csv << kEstimateHeader << '\n';
  write_estimate_row(csv, policy, e, inst, run);
  out << "cost " << num(e.mean) << " +- " << num(e.halfwidth)
      << (e.converged ? "" : " (not converged)") << '\n';
  return 0;
}

int cmd_optimize(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const Instance inst = instance_from_json(section(run, "instance"));
  const auto families = families_of(run, {PolicyFamily::Peip});
  const auto results = optimize_paired(families, inst, run.optimizer);
  auto csv = open_output(run, "results.csv");
  csv << kEstimateHeader << '\n';
  Json best = Json::array();
  for (const auto& r : results) {
    write_estimate_row(csv, r.params, r.estimate, inst, run);
    best.push_back({{"policy", to_json(r.params)},
                    {"cost", r.estimate.mean},
                    {"halfwidth", r.estimate.halfwidth},
                    {"candidate_cost", r.candidate_cost},
                    {"evaluations", r.evaluations},
                    {"budget_exhausted", r.budget_exhausted},
                    {"degenerate", r.degenerate},
                    {"attainability_violations", r.attainability_violations}});
    out << to_string(r.params.family) << ' ' << params_json(r.params) << " cost "
        << num(r.estimate.mean) << " +- " << num(r.estimate.halfwidth) << '\n';
  }
  auto js = open_output(run, "best.json");
  js << Json{{"results", best}, {"seed", run.sim.seed}, {"config_hash", run.hash}}.dump(2) << '\n';
  return 0;
}

int cmd_testbed(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const auto tb = generate_testbed(testbed_from_json(run.config.value("testbed", Json::object())));
  auto csv = open_output(run, "instances.csv");
  write_instances_csv(csv, tb);
  out << tb.size() << " instances\n";
  return 0;
}

int cmd_benchmark(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const auto tb = generate_testbed(testbed_from_json(run.config.value("testbed", Json::object())));
  {
    auto csv = open_output(run, "instances.csv");
    write_instances_csv(csv, tb);
  }
  const auto families = families_of(
      run, {PolicyFamily::Peip, PolicyFamily::Tbs, PolicyFamily::Si, PolicyFamily::Di,
            PolicyFamily::Cdi});
  const BenchmarkReport report = run_benchmark(tb, families, run.optimizer, run.workers);
  {
    auto csv = open_output(run, "results.csv");
    write_results_csv(csv, report, run.sim.seed, run.hash);
  }
  const auto agg = aggregate(report);
  auto csv = open_output(run, "aggregates.csv");
  write_aggregates_csv(csv, agg, run.sim.seed, run.hash);
  int failed = 0;
  for (const auto& i : report.instances) failed += !i.error.empty();
  for (const auto& r : agg)
    if (r.slice == "all")
      out << to_string(r.family) << " avg gap " << num(r.avg_gap_pct) << "% peip wins "
          << num(r.pct_peip_wins) << "%\n";
  if (failed) out << failed << " instances failed; see results.csv\n";
  return failed ? 1 : 0;
}

int cmd_longlead(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const Instance inst = instance_from_json(section(run, "instance"));
  std::vector<int> l_values{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  if (run.config.contains("longlead")) {
    const Json& ll = run.config.at("longlead");
    if (!ll.is_object()) throw ValidationError("longlead must be a JSON object");
    for (const auto& [k, v] : ll.items())
      if (k != "l_values") throw ValidationError("unknown key '" + k + "' in longlead");
    if (ll.contains("l_values")) l_values = ll.at("l_values").get<std::vector<int>>();
  }
  const auto families = families_of(run, {PolicyFamily::Tbs, PolicyFamily::Peip, PolicyFamily::Di});
  const auto rows = run_longlead(inst, l_values, families, run.optimizer, run.workers);
  auto csv = open_output(run, "results.csv");
  write_longlead_csv(csv, rows, run.sim.seed, run.hash);
  for (const auto& r : rows)
    out << "l=" << r.l << ' ' << to_string(r.family) << " %RED " << num(r.red_pct) << " Var[Q^r] "
        << num(r.order_variance_regular) << '\n';
  return 0;
}

int cmd_bounds(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const Instance inst = instance_from_json(section(run, "instance"));
  const BaseStockSolution reg = backlog_base_stock_cost(inst.p, inst.h, inst.l_r, inst.demand);
  const BaseStockSolution exp = backlog_base_stock_cost(inst.p, inst.h, inst.l_e, inst.demand);
  const double mu = inst.demand.pmf_mean();
  const Json j{{"lower_bound", lower_bound(inst)},
               {"single_regular_level", reg.S_star},
               {"single_regular_cost", inst.c_r * mu + reg.cost},
               {"single_expedited_level", exp.S_star},
               {"single_expedited_cost", inst.c_e * mu + exp.cost},
               {"single_source_mode", inst.single_source_mode()},
               {"seed", run.sim.seed},
               {"config_hash", run.hash}};
  out << j.dump() << '\n';
  auto f = open_output(run, "bounds.json");
  f << j.dump() << '\n';
  return 0;
}

int cmd_sweep(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const Instance inst = instance_from_json(section(run, "instance"));
  std::vector<int> scales{1, 4, 16, 64};
  if (run.config.contains("sweep")) {
    const Json& sw = run.config.at("sweep");
    if (!sw.is_object()) throw ValidationError("sweep must be a JSON object");
    for (const auto& [k, v] : sw.items())
      if (k != "scales") throw ValidationError("unknown key '" + k + "' in sweep");
    if (sw.contains("scales")) scales = sw.at("scales").get<std::vector<int>>();
  }
  const auto families = families_of(run, {PolicyFamily::Peip});
  auto csv = open_output(run, "sweep.csv");
  csv << "n,p_n,c_e_n,family,cost,halfwidth,lower_bound,ratio,gap,violations,seed,config_hash\n";
  for (PolicyFamily f : families) {
    for (const auto& pt : asymptotic_sweep(inst, scales, f, run.optimizer)) {
      csv << pt.n << ',' << num(pt.p) << ',' << num(pt.c_e) << ',' << to_string(f) << ','
          << num(pt.cost) << ',' << num(pt.halfwidth) << ',' << num(pt.lower_bound) << ','
          << (pt.ratio ? num(*pt.ratio) : std::string()) << ','
          << (pt.gap ? num(*pt.gap) : std::string()) << ',' << pt.attainability_violations << ','
          << run.sim.seed << ',' << run.hash << '\n';
      out << to_string(f) << " n=" << pt.n << " ratio "
          << (pt.ratio ? num(*pt.ratio) : std::string("undefined")) << '\n';
    }
  }
  return 0;
}

int cmd_dp_solve(const Flags& flags, std::ostream& out) {
  const Run run = prepare(flags);
  const Instance inst = instance_from_json(section(run, "instance"));
  Truncation tr = default_truncation(inst);
  double tol = 1e-9;
  int max_iter = 100000;
  long state_limit = 2'000'000;
  bool dump_policy = false;
  if (run.config.contains("dp")) {
    const Json& dp = run.config.at("dp");
    if (!dp.is_object()) throw ValidationError("dp must be a JSON object");
    for (const auto& [k, v] : dp.items()) {
      if (k == "I_min") tr.I_min = v.get<int>();
      else if (k == "I_max") tr.I_max = v.get<int>();
      else if (k == "q_max") tr.q_max = v.get<int>();
      else if (k == "tol") tol = v.get<double>();
      else if (k == "max_iter") max_iter = v.get<int>();
      else if (k == "state_limit") state_limit = v.get<long>();
      else if (k == "dump_policy") dump_policy = v.get<bool>();
      else throw ValidationError("unknown key '" + k + "' in dp");
    }
  }
  const TruncatedMdp mdp = build_mdp(inst, tr.I_min, tr.I_max, tr.q_max, state_limit);
  const RviResult res = relative_value_iteration(mdp, tol, max_iter);
  Json j{{"g_star", res.g_star},
         {"g_lower", res.g_lower},
         {"g_upper", res.g_upper},
         {"states", mdp.state_count()},
         {"actions", mdp.action_count()},
         {"iterations", res.iterations},
         {"converged", res.converged},
         {"clamped_transitions", res.clamped_transitions},
         {"truncation", {{"I_min", tr.I_min}, {"I_max", tr.I_max}, {"q_max", tr.q_max}}},
         {"seed", run.sim.seed},
         {"config_hash", run.hash}};
  if (dump_policy) {
    Json table = Json::array();
    for (long s = 0; s < mdp.state_count(); ++s) {
      const SystemState st = mdp.state(s);
      const auto [q_e, q_r] = res.policy[static_cast<std::size_t>(s)];
      table.push_back({{"inventory", st.inventory},
                       {"regular_pipeline", st.regular_pipeline},
                       {"expedited_pipeline", st.expedited_pipeline},
                       {"q_e", q_e},
                       {"q_r", q_r}});
    }
    j["policy"] = table;
  }
  auto f = open_output(run, "dp.json");
  f << j.dump(2) << '\n';
  out << "g* " << num(res.g_star) << (res.converged ? "" : " (not converged)") << '\n';
  return res.converged ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-sourcing inventory simulation and optimization"};
  app.require_subcommand(1);
  Flags flags;

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Flags&, std::ostream&);
  };
  const std::vector<Command> commands{
      {"evaluate", "Simulate one policy", cmd_evaluate},
      {"optimize", "Optimize policy families on one instance", cmd_optimize},
      {"benchmark", "Optimize families over the test bed", cmd_benchmark},
      {"longlead", "Cost reduction versus TBS as the lead-time gap grows", cmd_longlead},
      {"bounds", "Lower bound and single-source costs", cmd_bounds},
      {"sweep", "Cost over lower bound as p and c_e scale up", cmd_sweep},
      {"dp-solve", "Exact optimum of a small instance", cmd_dp_solve},
      {"testbed", "Write the test-bed instance list", cmd_testbed},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", flags.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", flags.out_dir, "Output directory (default: config out_dir or ./out)");
    sub->add_option("--seed", flags.seed, "Override the simulation seed");
    sub->add_option("--workers", flags.workers, "Parallel instances")->check(CLI::PositiveNumber);
    sub->add_option("--grid-fallback", flags.grid_fallback,
                    "Also grid-scan each search with this many points");
    if (std::string(c.name) == "evaluate") sub->add_flag("--trace", flags.trace, "Write trace.csv");
    subs.push_back(sub);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      return commands[i].fn(flags, out);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }
  err << app.help();
  return 2;
}

}  // namespace dualsrc
