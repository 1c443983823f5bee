#include "dualsrc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "dualsrc/errors.hpp"

namespace dualsrc {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

void ensure_front(std::vector<PolicyFamily>& families, PolicyFamily f) {
  families.erase(std::remove(families.begin(), families.end(), f), families.end());
  families.insert(families.begin(), f);
}

std::string params_columns(const PolicyParams& p) {
  auto num = [](double x) { return format_number(x); };
  const bool cdi = p.family == PolicyFamily::Cdi;
  const bool idx = cdi || p.family == PolicyFamily::Di || p.family == PolicyFamily::Si;
  std::string s;
  s += (p.family == PolicyFamily::SingleRegular ? "" : num(p.S_e)) + ',';
  s += (p.family == PolicyFamily::Peip ? num(p.V) : "") + ',';
  s += (p.family == PolicyFamily::Tbs ? num(p.r) : "") + ',';
  s += (idx ? num(p.delta) : "") + ',';
  s += (cdi ? num(p.cap) : "") + ',';
  s += (p.family == PolicyFamily::SingleRegular ? num(p.S_r) : "");
  return s;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<TestbedInstance>& testbed,
                              std::vector<PolicyFamily> families, const OptimizerSettings& settings,
                              int workers) {
  ensure_front(families, PolicyFamily::Peip);
  BenchmarkReport report;
  report.families = families;
  report.instances.resize(testbed.size());
  parallel_for(testbed.size(), workers, [&](std::size_t i) {
    InstanceOutcome& out = report.instances[i];
    out.instance = testbed[i];
    try {
      const auto results = optimize_paired(families, testbed[i].instance, settings);
      const CostEstimate& peip = results.front().estimate;
      for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        FamilyOutcome fo;
        fo.family = families[k];
        fo.params = r.params;
        fo.cost = r.estimate.mean;
        fo.halfwidth = r.estimate.halfwidth;
        fo.converged = r.estimate.converged;
        fo.order_variance_regular = r.estimate.order_variance_regular;
        fo.attainability_violations = r.attainability_violations;
        const PairedDifference d = paired_difference(r.estimate, peip, settings.sim.ci_level);
        fo.gap_pct = 100.0 * d.mean / peip.mean;
        fo.gap_halfwidth_pct = 100.0 * d.halfwidth / peip.mean;
        fo.peip_wins = d.mean + d.halfwidth >= 0.0;
        out.families.push_back(std::move(fo));
      }
    } catch (const std::exception& e) {
      out.error = e.what();
      out.families.clear();
    }
  });
  return report;
}

std::vector<AggregateRow> aggregate(const BenchmarkReport& report) {
  std::vector<AggregateRow> rows;
  struct Acc {
    int n = 0;
    double sum = 0.0;
    double max = -INFINITY;
    double min = INFINITY;
    int wins = 0;
  };
  auto emit = [&](const std::string& slice, const std::map<double, std::vector<Acc>>& groups) {
    for (const auto& [level, accs] : groups)
      for (std::size_t k = 0; k < accs.size(); ++k) {
        const Acc& a = accs[k];
        if (a.n == 0) continue;
        AggregateRow r;
        r.slice = slice;
        r.level = level;
        r.family = report.families[k];
        r.instances = a.n;
        r.avg_gap_pct = a.sum / a.n;
        r.max_gap_pct = a.max;
        r.min_gap_pct = a.min;
        r.pct_peip_wins = 100.0 * a.wins / a.n;
        rows.push_back(r);
      }
  };
  const std::vector<std::pair<std::string, std::function<double(const TestbedInstance&)>>> slices{
      {"all", [](const TestbedInstance&) { return 0.0; }},
      {"p", [](const TestbedInstance& t) { return t.p; }},
      {"l_r", [](const TestbedInstance& t) { return static_cast<double>(t.l_r); }},
      {"cov", [](const TestbedInstance& t) { return t.cov; }},
      {"delta", [](const TestbedInstance& t) { return t.delta; }}};
  for (const auto& [name, key] : slices) {
    std::map<double, std::vector<Acc>> groups;
    for (const auto& inst : report.instances) {
      if (!inst.error.empty()) continue;
      auto& accs = groups[key(inst.instance)];
      accs.resize(report.families.size());
      for (std::size_t k = 0; k < inst.families.size(); ++k) {
        const auto& f = inst.families[k];
        Acc& a = accs[k];
        ++a.n;
        a.sum += f.gap_pct;
        a.max = std::max(a.max, f.gap_pct);
        a.min = std::min(a.min, f.gap_pct);
        a.wins += f.peip_wins;
      }
    }
    emit(name, groups);
  }
  return rows;
}

void write_results_csv(std::ostream& out, const BenchmarkReport& report, std::uint64_t seed,
                       const std::string& hash) {
  out << "instance_id,p,l_r,cov,delta,c_e,family,S_e,V,r,delta_param,cap,S_r,cost,halfwidth,"
         "gap_pct,gap_halfwidth_pct,peip_wins,converged,var_q_r,violations,error,seed,config_hash\n";
  for (const auto& inst : report.instances) {
    const auto& ti = inst.instance;
    const std::string prefix = std::to_string(ti.id) + ',' + format_number(ti.p) + ',' +
                               std::to_string(ti.l_r) + ',' + format_number(ti.cov) + ',' +
                               format_number(ti.delta) + ',' + format_number(ti.instance.c_e) + ',';
    const std::string suffix = std::to_string(seed) + ',' + hash;
    if (!inst.error.empty()) {
      std::string msg = inst.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << prefix << ",,,,,,,,,,,,,,," << msg << ',' << suffix << '\n';
      continue;
    }
    for (const auto& f : inst.families) {
      out << prefix << to_string(f.family) << ',' << params_columns(f.params) << ','
          << format_number(f.cost) << ',' << format_number(f.halfwidth) << ','
          << format_number(f.gap_pct) << ',' << format_number(f.gap_halfwidth_pct) << ','
          << (f.peip_wins ? 1 : 0) << ',' << (f.converged ? 1 : 0) << ','
          << format_number(f.order_variance_regular) << ',' << f.attainability_violations << ",,"
          << suffix << '\n';
    }
  }
}

void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                          std::uint64_t seed, const std::string& hash) {
  out << "slice,level,family,instances,avg_gap_pct,max_gap_pct,min_gap_pct,pct_peip_wins,seed,"
         "config_hash\n";
  for (const auto& r : rows)
    out << r.slice << ',' << (r.slice == "all" ? std::string() : format_number(r.level)) << ','
        << to_string(r.family) << ',' << r.instances << ',' << format_number(r.avg_gap_pct) << ','
        << format_number(r.max_gap_pct) << ',' << format_number(r.min_gap_pct) << ','
        << format_number(r.pct_peip_wins) << ',' << seed << ',' << hash << '\n';
}

std::vector<LongleadRow> run_longlead(const Instance& base, const std::vector<int>& l_values,
                                      std::vector<PolicyFamily> families,
                                      const OptimizerSettings& settings, int workers) {
  if (l_values.empty()) throw ValidationError("no lead-time differences given");
  ensure_front(families, PolicyFamily::Tbs);
  std::vector<std::vector<LongleadRow>> per_l(l_values.size());
  parallel_for(l_values.size(), workers, [&](std::size_t i) {
    const int l = l_values[i];
    if (l < 1) throw ValidationError("lead-time differences must be positive");
    const Instance inst =
        Instance::make(base.p, base.h, base.c_e, base.c_r, base.l_e, base.l_e + l, base.demand);
    const auto results = optimize_paired(families, inst, settings);
    const double tbs = results.front().estimate.mean;
    for (std::size_t k = 0; k < results.size(); ++k) {
      const auto& r = results[k];
      LongleadRow row;
      row.l = l;
      row.family = families[k];
      row.params = r.params;
      row.cost = r.estimate.mean;
      row.halfwidth = r.estimate.halfwidth;
      row.red_pct = 100.0 * (tbs - r.estimate.mean) / tbs;
      row.order_variance_regular = r.estimate.order_variance_regular;
      row.mean_regular_order = r.estimate.mean_regular_order;
      row.converged = r.estimate.converged;
      row.attainability_violations = r.attainability_violations;
      per_l[i].push_back(std::move(row));
    }
  });
  std::vector<LongleadRow> rows;
  for (auto& v : per_l) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

void write_longlead_csv(std::ostream& out, const std::vector<LongleadRow>& rows, std::uint64_t seed,
                        const std::string& hash) {
  out << "l,family,S_e,V,r,delta_param,cap,S_r,cost,halfwidth,red_pct,var_q_r,mean_q_r,converged,"
         "violations,seed,config_hash\n";
  for (const auto& r : rows)
    out << r.l << ',' << to_string(r.family) << ',' << params_columns(r.params) << ','
        << format_number(r.cost) << ',' << format_number(r.halfwidth) << ','
        << format_number(r.red_pct) << ',' << format_number(r.order_variance_regular) << ','
        << format_number(r.mean_regular_order) << ',' << (r.converged ? 1 : 0) << ','
        << r.attainability_violations << ',' << seed << ',' << hash << '\n';
}

}  // namespace dualsrc
