#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <sstream>

#include "dualsrc/errors.hpp"
#include "dualsrc/experiments.hpp"

using namespace dualsrc;

namespace {

FamilyOutcome outcome(PolicyFamily f, double gap, bool wins = true) {
  FamilyOutcome o;
  o.family = f;
  o.gap_pct = gap;
  o.peip_wins = wins;
  return o;
}

InstanceOutcome instance(int id, double p, std::vector<FamilyOutcome> fams) {
  InstanceOutcome io;
  io.instance.id = id;
  io.instance.p = p;
  io.instance.l_r = 2;
  io.instance.cov = 0.5;
  io.instance.delta = 0.2;
  io.families = std::move(fams);
  return io;
}

std::size_t columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(Aggregate, SyntheticReport) {
  BenchmarkReport r;
  r.families = {PolicyFamily::Peip, PolicyFamily::Tbs};
  r.instances.push_back(instance(0, 9, {outcome(PolicyFamily::Peip, 0), outcome(PolicyFamily::Tbs, 10)}));
  r.instances.push_back(instance(1, 49, {outcome(PolicyFamily::Peip, 0), outcome(PolicyFamily::Tbs, 30, false)}));
  auto bad = instance(2, 49, {});
  bad.error = "failed";
  r.instances.push_back(bad);

  const auto rows = aggregate(r);
  auto find = [&](const std::string& slice, double level, PolicyFamily f) {
    for (const auto& row : rows)
      if (row.slice == slice && row.level == level && row.family == f) return row;
    ADD_FAILURE() << "missing row " << slice << ' ' << level;
    return AggregateRow{};
  };
  const auto all_tbs = find("all", 0, PolicyFamily::Tbs);
  EXPECT_EQ(all_tbs.instances, 2);
  EXPECT_DOUBLE_EQ(all_tbs.avg_gap_pct, 20);
  EXPECT_DOUBLE_EQ(all_tbs.max_gap_pct, 30);
  EXPECT_DOUBLE_EQ(all_tbs.min_gap_pct, 10);
  EXPECT_DOUBLE_EQ(all_tbs.pct_peip_wins, 50);
  const auto peip = find("all", 0, PolicyFamily::Peip);
  EXPECT_EQ(peip.avg_gap_pct, 0);
  EXPECT_EQ(peip.pct_peip_wins, 100);
  EXPECT_DOUBLE_EQ(find("p", 49, PolicyFamily::Tbs).avg_gap_pct, 30);
  EXPECT_EQ(find("l_r", 2, PolicyFamily::Tbs).instances, 2);
}

TEST(ResultsCsv, ErrorRowsKeepColumns) {
  BenchmarkReport r;
  r.families = {PolicyFamily::Peip};
  r.instances.push_back(instance(0, 9, {outcome(PolicyFamily::Peip, 0)}));
  auto bad = instance(1, 9, {});
  bad.error = "no, good";
  r.instances.push_back(bad);
  std::ostringstream out;
  write_results_csv(out, r, 5, "abc");
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(columns(line), columns(header)) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 2);
  EXPECT_NE(out.str().find("no; good,5,abc"), std::string::npos);
}

TEST(Benchmark, PeipFirstAndZeroGap) {
  TestbedSpec grid;
  grid.p = {9};
  grid.l_r = {2};
  grid.cov = {0.5};
  grid.delta = {0.2};
  grid.mean = 10;
  OptimizerSettings s;
  s.sim.rel_halfwidth_target = 0.03;
  const auto report = run_benchmark(generate_testbed(grid), {PolicyFamily::Tbs}, s);
  ASSERT_EQ(report.families.size(), 2u);
  EXPECT_EQ(report.families[0], PolicyFamily::Peip);
  ASSERT_EQ(report.instances.size(), 1u);
  const auto& fams = report.instances[0].families;
  ASSERT_EQ(fams.size(), 2u);
  EXPECT_EQ(fams[0].gap_pct, 0);
  EXPECT_EQ(fams[0].gap_halfwidth_pct, 0);
  EXPECT_GT(fams[1].gap_pct, 0);
  std::ostringstream a;
  write_aggregates_csv(a, aggregate(report), 1, "h");
  EXPECT_NE(a.str().find("all,,tbs,1,"), std::string::npos);
}

TEST(Longlead, TbsReference) {
  const auto base = Instance::make(19, 1, 5, 0, 0, 1, DemandModel::make(DemandFamily::NegativeBinomial, 10, 0.5));
  OptimizerSettings s;
  s.sim.rel_halfwidth_target = 0.03;
  const auto rows = run_longlead(base, {2}, {PolicyFamily::Peip}, s);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].family, PolicyFamily::Tbs);
  EXPECT_EQ(rows[0].red_pct, 0);
  EXPECT_EQ(rows[0].order_variance_regular, 0);
  EXPECT_GT(rows[1].red_pct, 0);
  EXPECT_EQ(rows[1].l, 2);
  std::ostringstream out;
  write_longlead_csv(out, rows, 1, "h");
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  while (std::getline(in, line)) EXPECT_EQ(columns(line), columns(header));
  EXPECT_THROW(run_longlead(base, {}, {PolicyFamily::Peip}, s), ValidationError);
}
