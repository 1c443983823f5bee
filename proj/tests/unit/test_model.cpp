#include <gtest/gtest.h>

#include "dualsrc/errors.hpp"
#include "dualsrc/model.hpp"

using namespace dualsrc;

namespace {

Instance make_instance(int l_e, int l_r, double p = 9, double h = 1) {
  return Instance::make(p, h, 5, 0, l_e, l_r, DemandModel::make(DemandFamily::Poisson, 5, std::nullopt));
}

}  // namespace

TEST(Model, ExpeditedInventoryPositionEmptyPipelines) {
  const auto inst = make_instance(0, 2);
  SystemState s = SystemState::initial(inst);
  s.inventory = 10;
  EXPECT_DOUBLE_EQ(expedited_inventory_position(s, inst), 10);
}

TEST(Model, ExpeditedInventoryPositionCountsOrdersWithinHorizon) {
  const auto inst = make_instance(1, 3);
  SystemState s = SystemState::initial(inst);
  s.inventory = 10;
  s.regular_pipeline = {4, 7};
  EXPECT_DOUBLE_EQ(expedited_inventory_position(s, inst), 14);
  EXPECT_DOUBLE_EQ(regular_inventory_position(s), 21);
  EXPECT_DOUBLE_EQ(regular_orders_beyond_horizon(s, inst), 7);
}

TEST(Model, ExpeditedInventoryPositionTwoPipelines) {
  const auto inst = make_instance(2, 4);
  SystemState s = SystemState::initial(inst);
  s.inventory = -5;
  s.expedited_pipeline = {3};
  s.regular_pipeline = {2, 6, 1};
  EXPECT_DOUBLE_EQ(expedited_inventory_position(s, inst), 6);
}

TEST(Model, StepHolding) {
  const auto inst = Instance::make(9, 1, 5, 0, 0, 1, DemandModel::make(DemandFamily::Poisson, 5, std::nullopt));
  SystemState s = SystemState::initial(inst);
  s.inventory = 10;
  const auto r = step(s, inst, 0, 0, 8);
  EXPECT_DOUBLE_EQ(r.cost.holding, 2);
  EXPECT_DOUBLE_EQ(r.cost.backlog, 0);
  EXPECT_DOUBLE_EQ(r.next.inventory, 2);
}

TEST(Model, StepBacklog) {
  const auto inst = Instance::make(9, 1, 5, 0, 0, 1, DemandModel::make(DemandFamily::Poisson, 5, std::nullopt));
  SystemState s = SystemState::initial(inst);
  s.inventory = 5;
  const auto r = step(s, inst, 0, 0, 8);
  EXPECT_DOUBLE_EQ(r.cost.backlog, 27);
  EXPECT_DOUBLE_EQ(r.next.inventory, -3);
}

TEST(Model, StepPipelineTrace) {
  const auto inst = make_instance(0, 2);
  SystemState s = SystemState::initial(inst);
  s.regular_pipeline = {6};
  const auto r = step(s, inst, 0, 2, 5);
  EXPECT_DOUBLE_EQ(r.cost.backlog, 9 * 5);
  EXPECT_DOUBLE_EQ(r.next.inventory, 1);
  ASSERT_EQ(r.next.regular_pipeline.size(), 1u);
  EXPECT_DOUBLE_EQ(r.next.regular_pipeline[0], 2);
}

TEST(Model, ZeroLeadTimeExpediteArrivesBeforeDemand) {
  const auto inst = make_instance(0, 2);
  SystemState s = SystemState::initial(inst);
  const auto r = step(s, inst, 7, 0, 5);
  EXPECT_DOUBLE_EQ(r.cost.expedite, 35);
  EXPECT_DOUBLE_EQ(r.cost.holding, 2);
  EXPECT_DOUBLE_EQ(r.next.inventory, 2);
}

TEST(Model, NegativeOrderRejected) {
  const auto inst = make_instance(0, 2);
  SystemState s = SystemState::initial(inst);
  EXPECT_THROW(step(s, inst, -1, 0, 3), ValidationError);
  EXPECT_THROW(step(s, inst, 0, -1, 3), ValidationError);
}

TEST(Model, InstanceValidation) {
  const auto d = DemandModel::make(DemandFamily::Poisson, 5, std::nullopt);
  EXPECT_THROW(Instance::make(0, 1, 5, 0, 0, 2, d), ValidationError);
  EXPECT_THROW(Instance::make(9, 0, 5, 0, 0, 2, d), ValidationError);
  EXPECT_THROW(Instance::make(9, 1, 5, 6, 0, 2, d), ValidationError);
  EXPECT_THROW(Instance::make(9, 1, 5, 0, 2, 2, d), ValidationError);
  EXPECT_THROW(Instance::make(9, 1, 5, 0, -1, 2, d), ValidationError);
  EXPECT_FALSE(Instance::make(9, 1, 5, 0, 0, 2, d).single_source_mode());
  EXPECT_TRUE(Instance::make(2, 1, 5, 0, 0, 2, d).single_source_mode());
}

TEST(Model, FlowConservationAndExclusiveCosts) {
  const auto inst = make_instance(1, 4);
  SystemState s = SystemState::initial(inst);
  RandomStream rng(5);
  double arrivals = 0.0;
  double demand = 0.0;
  std::vector<double> placed_r;
  std::vector<double> placed_e;
  const int T = 500;
  for (int t = 0; t < T; ++t) {
    const double q_e = 10 * rng.uniform();
    const double q_r = 10 * rng.uniform();
    const int d = inst.demand.sample(rng);
    placed_e.push_back(q_e);
    placed_r.push_back(q_r);
    demand += d;
    const auto c = advance(s, inst, q_e, q_r, d);
    EXPECT_FALSE(c.holding > 0 && c.backlog > 0);
    EXPECT_GE(c.total(), 0.0);
  }
  // Orders placed in t arrive at the start of t + lead.
  for (int t = 0; t < T; ++t) {
    if (t + inst.l_e <= T) arrivals += placed_e[static_cast<std::size_t>(t)];
    if (t + inst.l_r <= T) arrivals += placed_r[static_cast<std::size_t>(t)];
  }
  EXPECT_NEAR(s.inventory, arrivals - demand, 1e-9);
  EXPECT_TRUE(s.valid_for(inst));
}

TEST(Model, StepIsDeterministic) {
  const auto inst = make_instance(1, 3);
  SystemState s = SystemState::initial(inst);
  s.regular_pipeline = {3, 4};
  s.inventory = 2;
  const auto a = step(s, inst, 1.5, 2.5, 4);
  const auto b = step(s, inst, 1.5, 2.5, 4);
  EXPECT_EQ(a.next.inventory, b.next.inventory);
  EXPECT_EQ(a.next.regular_pipeline, b.next.regular_pipeline);
  EXPECT_EQ(a.cost.total(), b.cost.total());
}
