#include "dualsrc/testbed.hpp"

#include <ostream>

#include "dualsrc/errors.hpp"

namespace dualsrc {

std::vector<TestbedInstance> generate_testbed(const TestbedSpec& grid) {
  if (grid.p.empty() || grid.l_r.empty() || grid.cov.empty() || grid.delta.empty())
    throw ValidationError("every test-bed level list must be nonempty");
  std::vector<TestbedInstance> out;
  int id = 0;
  for (double p : grid.p)
    for (int l_r : grid.l_r)
      for (double cov : grid.cov) {
        const DemandModel demand = DemandModel::make(grid.family, grid.mean, cov, grid.tail_epsilon);
        for (double delta : grid.delta) {
          const double c_e = delta * p * (l_r - grid.l_e);
          TestbedInstance ti;
          ti.id = id++;
          ti.p = p;
          ti.l_r = l_r;
          ti.cov = cov;
          ti.delta = delta;
          ti.instance = Instance::make(p, grid.h, c_e, grid.c_r, grid.l_e, l_r, demand);
          out.push_back(std::move(ti));
        }
      }
  return out;
}

TestbedSpec testbed_from_json(const Json& j) {
  TestbedSpec s;
  if (!j.is_object()) throw ValidationError("testbed must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "p") s.p = v.get<std::vector<double>>();
      else if (k == "l_r") s.l_r = v.get<std::vector<int>>();
      else if (k == "cov") s.cov = v.get<std::vector<double>>();
      else if (k == "delta") s.delta = v.get<std::vector<double>>();
      else if (k == "l_e") s.l_e = v.get<int>();
      else if (k == "h") s.h = v.get<double>();
      else if (k == "c_r") s.c_r = v.get<double>();
      else if (k == "mean") s.mean = v.get<double>();
      else if (k == "family") s.family = demand_family_from_string(v.get<std::string>());
      else if (k == "tail_epsilon") s.tail_epsilon = v.get<double>();
      else throw ValidationError("unknown key '" + k + "' in testbed");
    } catch (const Json::exception&) {
      throw ValidationError("key '" + k + "' in testbed has the wrong type");
    }
  }
  return s;
}

const char* instances_csv_header() { return "instance_id,p,h,c_e,c_r,l_e,l_r,l,family,mean,cov,delta"; }

void write_instances_csv(std::ostream& out, const std::vector<TestbedInstance>& instances) {
  out << instances_csv_header() << '\n';
  for (const auto& ti : instances) {
    const Instance& in = ti.instance;
    out << ti.id << ',' << format_number(in.p) << ',' << format_number(in.h) << ','
        << format_number(in.c_e) << ',' << format_number(in.c_r) << ',' << in.l_e << ',' << in.l_r
        << ',' << in.lead_time_difference() << ',' << to_string(in.demand.family()) << ','
        << format_number(in.demand.mean()) << ',' << format_number(ti.cov) << ','
        << format_number(ti.delta) << '\n';
  }
}

}  // namespace dualsrc
