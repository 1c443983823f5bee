#pragma once

#include <iosfwd>
#include <vector>

#include "dualsrc/config.hpp"
#include "dualsrc/model.hpp"

namespace dualsrc {

/// Levels of the full factorial test bed. c_e = delta * p * (l_r - l_e).
struct TestbedSpec {
  std::vector<double> p{4, 9, 19, 49, 99};
  std::vector<int> l_r{2, 3, 4, 5};
  std::vector<double> cov{0.15, 0.25, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> delta{0.1, 0.2, 0.4};
  int l_e = 0;
  double h = 1.0;
  double c_r = 0.0;
  double mean = 50.0;
  DemandFamily family = DemandFamily::NegativeBinomial;
  double tail_epsilon = DemandModel::kDefaultTailEpsilon;
};

struct TestbedInstance {
  int id = 0;
  double p = 0.0;
  int l_r = 0;
  double cov = 0.0;
  double delta = 0.0;
  Instance instance;
};

/// Full factorial grid, p outermost and delta innermost.
std::vector<TestbedInstance> generate_testbed(const TestbedSpec& grid);

TestbedSpec testbed_from_json(const Json& j);

const char* instances_csv_header();
void write_instances_csv(std::ostream& out, const std::vector<TestbedInstance>& instances);

}  // namespace dualsrc
