#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "dualsrc/errors.hpp"
#include "dualsrc/testbed.hpp"

using namespace dualsrc;

TEST(Testbed, FullGrid) {
  const auto tb = generate_testbed({});
  ASSERT_EQ(tb.size(), 360u);
  std::set<int> ids;
  for (const auto& t : tb) {
    ids.insert(t.id);
    EXPECT_NEAR(t.instance.c_e, t.delta * t.p * t.l_r, 1e-12);
    EXPECT_EQ(t.instance.l_e, 0);
    EXPECT_EQ(t.instance.h, 1);
    EXPECT_NEAR(t.instance.demand.mean(), 50, 1e-12);
    EXPECT_FALSE(t.instance.single_source_mode());
  }
  EXPECT_EQ(ids.size(), 360u);
  EXPECT_EQ(tb.front().p, 4);
  EXPECT_EQ(tb.front().delta, 0.1);
  EXPECT_EQ(tb[1].delta, 0.2);
  EXPECT_EQ(tb[144].p, 19);
  EXPECT_EQ(tb[144].l_r, 2);
  EXPECT_NEAR(tb[144].instance.c_e, 3.8, 1e-12);
}

TEST(Testbed, SubsetFromJson) {
  const auto grid = testbed_from_json(Json::parse(R"({"p": [9, 49], "cov": [0.25, 1], "l_r": [2, 3, 4]})"));
  EXPECT_EQ(generate_testbed(grid).size(), 36u);
  TestbedSpec empty;
  empty.cov.clear();
  EXPECT_THROW(generate_testbed(empty), ValidationError);
  EXPECT_THROW(testbed_from_json(Json::parse(R"({"q": [1]})")), ValidationError);
  EXPECT_THROW(testbed_from_json(Json::parse(R"({"p": 9})")), ValidationError);
}

TEST(Testbed, InstancesCsv) {
  const auto tb = generate_testbed({});
  std::ostringstream out;
  write_instances_csv(out, tb);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, instances_csv_header());
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
    ++rows;
  }
  EXPECT_EQ(rows, 360);
}
