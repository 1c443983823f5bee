#include <gtest/gtest.h>

#include "dualsrc/atoms.hpp"

using namespace dualsrc;

TEST(Atoms, MergesCloseValuesAtWeightedMean) {
  const auto d = AtomDistribution::from_atoms({{1.0, 0.25}, {1.0 + 1e-12, 0.25}, {3.0, 0.5}});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_NEAR(d.atoms()[0].value, 1.0, 1e-11);
  EXPECT_DOUBLE_EQ(d.atoms()[0].mass, 0.5);
  EXPECT_NEAR(d.mean(), 2.0, 1e-11);
  EXPECT_NEAR(d.variance(), 1.0, 1e-11);
}

TEST(Atoms, SortsAndDropsZeroMass) {
  const auto d = AtomDistribution::from_atoms({{5.0, 0.5}, {2.0, 0.0}, {-1.0, 0.5}});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d.min_value(), -1.0);
  EXPECT_DOUBLE_EQ(d.max_value(), 5.0);
  EXPECT_DOUBLE_EQ(d.cdf(0.0), 0.5);
  EXPECT_DOUBLE_EQ(d.cdf(5.0), 1.0);
}

TEST(Atoms, ConvolveTwoCoins) {
  const auto coin = AtomDistribution::from_atoms({{0.0, 0.5}, {1.0, 0.5}});
  const auto two = coin.convolve(coin);
  EXPECT_DOUBLE_EQ(two.mass_at(1.0), 0.5);
  EXPECT_DOUBLE_EQ(two.mean(), 1.0);
}

TEST(Atoms, FromSamples) {
  const std::vector<double> s{1, 1, 2, 4};
  const auto d = AtomDistribution::from_samples(s);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_DOUBLE_EQ(d.mass_at(1.0), 0.5);
  EXPECT_DOUBLE_EQ(d.mean(), 2.0);
}
