#include <gtest/gtest.h>

#include <cmath>

#include <numeric>

#include "gridflex/repression.hpp"
#include "gridflex/testdata.hpp"
#include "support/networks.hpp"

namespace gridflex {
namespace {

const Network& pjm5() {
  static const Network n = bundled_case("pjm5").network;
  return n;
}

TEST(AlphaGrid, Validation) {
  EXPECT_EQ(AlphaGrid::uniform().size(), 21u);
  EXPECT_EQ(AlphaGrid::uniform(41).points()[1], 0.025);
  EXPECT_THROW(AlphaGrid({0.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(AlphaGrid({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(AlphaGrid::uniform(1), std::invalid_argument);
}

TEST(Repression, TwoBusClosedForm) {
  // Max demand min(310, 300 + 30(1 - a)): gap 20 - 30a on [0, 2/3], area 20/3.
  const auto r = compute_repression(testing::two_bus(), {}, AlphaGrid::uniform(4), {});
  ASSERT_TRUE(r.defined());
  EXPECT_NEAR(r.total_lr, 20.0 / 3.0, 1e-6);
  EXPECT_EQ(r.total_lr_down, 0.0);
  const BusRepression& b = r.buses[1];
  EXPECT_TRUE(b.degree_max.repressed);
  EXPECT_NEAR(b.degree_max.degree, 2.0 / 3.0, 1e-3);
  EXPECT_FALSE(b.degree_min.repressed);
  EXPECT_EQ(b.degree_min.degree, 1.0);
  EXPECT_FALSE(r.buses[0].has_demand);
}

TEST(Repression, NoBindingConstraintsMeansNoRepression) {
  Network n = pjm5();
  for (Line& l : n.lines) l.limit = 1e6;
  const auto r = compute_repression(n, {}, AlphaGrid::uniform(), {});
  EXPECT_EQ(r.total_lr, 0.0);
  EXPECT_EQ(r.worst_bus(), -1);
  for (const BusRepression& b : r.buses) {
    EXPECT_EQ(b.degree_max.degree, 1.0);
    EXPECT_FALSE(b.degree_max.repressed);
  }
}

TEST(Repression, FiveBusBaseTarget) {
  const auto r = compute_repression(pjm5(), {}, AlphaGrid::uniform(), {});
  ASSERT_TRUE(r.defined());
  EXPECT_NEAR(r.total_lr, 17.427, 0.1 * 17.427);
  EXPECT_EQ(r.total_lr_down, 0.0);
  EXPECT_NEAR(r.buses[pjm5().bus_index(4)].degree_max.degree, 0.80, 0.05);
}

TEST(Repression, FiveBusStrategyOrdering) {
  SolverSettings s;
  const auto grid = AlphaGrid::uniform();
  const double c1 = compute_repression(pjm5(), {StrategyKind::Base, 0.2}, grid, s).total_lr;
  const double c2 = compute_repression(pjm5(), {StrategyKind::Inductive, 0.2}, grid, s).total_lr;
  const double c3 = compute_repression(pjm5(), {StrategyKind::Capacitive, 0.2}, grid, s).total_lr;
  const double c4 = compute_repression(pjm5(), {StrategyKind::Smart, 0.2}, grid, s).total_lr;
  EXPECT_LT(c2, c1);
  EXPECT_LT(c3, c1);
  EXPECT_LE(c4, std::min(c2, c3) + 1e-3);
}

TEST(Repression, InvariantsOnRandomNetworks) {
  std::uint64_t seed = 100;
  for (int t = 0; t < 12; ++t) {
    const Network n = testing::repressed_network(seed, 5, 2);
    const auto grid = AlphaGrid::uniform(11);
    const auto r = compute_repression(n, {StrategyKind::Smart, 0.2}, grid, {});
    if (!r.defined()) {
      EXPECT_TRUE(std::isnan(r.total_lr));
      continue;
    }
    double sum = 0.0;
    for (const BusRepression& b : r.buses) {
      sum += b.lr();
      EXPECT_GE(b.lr_up, 0.0);
      EXPECT_GE(b.lr_down, 0.0);
      for (const EnvelopePoint& e : b.envelope) {
        EXPECT_GE(e.achieved.lower, e.forecast.lower - 1e-6);
        EXPECT_LE(e.achieved.upper, e.forecast.upper + 1e-6);
      }
      // The degree never exceeds the last grid level that still has a gap.
      if (b.degree_max.repressed) {
        double last = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k)
          if (b.envelope[k].forecast.upper - b.envelope[k].achieved.upper > kRepressionTol) last = grid.points()[k];
        EXPECT_GE(b.degree_max.degree, last - 1e-12);
        EXPECT_LE(b.degree_max.degree, 1.0);
      }
    }
    EXPECT_NEAR(r.total_lr, sum, 1e-9);
  }
}

TEST(Repression, UniformWeightScalingLeavesLrUnchanged) {
  Network scaled = pjm5();
  for (Bus& b : scaled.buses) b.weight = 3.0;
  const auto grid = AlphaGrid::uniform(11);
  const auto a = compute_repression(pjm5(), {}, grid, {});
  const auto b = compute_repression(scaled, {}, grid, {});
  EXPECT_NEAR(a.total_lr, b.total_lr, 1e-6);
}

TEST(Repression, InfeasibleLevelsFlagged) {
  Network n = testing::two_bus();
  n.generators[0].p_max = 280;  // covers the lower bound only for alpha <= 1/3
  const auto r = compute_repression(n, {}, AlphaGrid::uniform(4), {});
  EXPECT_FALSE(r.defined());
  EXPECT_EQ(r.infeasible_alphas, (std::vector<double>{2.0 / 3.0, 1.0}));
  EXPECT_TRUE(std::isnan(r.total_lr));
}

TEST(Repression, ThreadCountDoesNotChangeResults) {
  SolverSettings one, many;
  many.threads = 4;
  const auto a = compute_repression(pjm5(), {StrategyKind::Smart, 0.2}, AlphaGrid::uniform(), one);
  const auto b = compute_repression(pjm5(), {StrategyKind::Smart, 0.2}, AlphaGrid::uniform(), many);
  EXPECT_EQ(a.total_lr, b.total_lr);
  for (std::size_t i = 0; i < a.buses.size(); ++i) EXPECT_EQ(a.buses[i].degree_max.degree, b.buses[i].degree_max.degree);
}

TEST(Sweep, ZeroCapacityEqualsBaseAndRowsMonotone) {
  const auto cells = capacity_sweep(pjm5(), {StrategyKind::Base, StrategyKind::Inductive, StrategyKind::Smart},
                                    {0.0, 0.1, 0.2, 0.3, 0.4}, AlphaGrid::uniform(11), {});
  ASSERT_EQ(cells.size(), 15u);
  const double base = cells[0].total_lr;
  for (std::size_t row = 0; row < 3; ++row) {
    EXPECT_NEAR(cells[row * 5].total_lr, base, 1e-9);
    for (std::size_t c = 1; c < 5; ++c)
      EXPECT_LE(cells[row * 5 + c].total_lr, cells[row * 5 + c - 1].total_lr + 1e-3);
  }
  for (std::size_t c = 0; c < 5; ++c) EXPECT_LE(cells[10 + c].total_lr, cells[5 + c].total_lr + 1e-3);
}

TEST(Sweep, ZeroRepressionCapacity) {
  const Network n = testing::parallel_paths();
  // Smart needs beta_A = -b, beta_B = +b with 110 / ((1 - b) / 2) >= 260.
  const auto cap = zero_repression_capacity(n, StrategyKind::Smart, AlphaGrid::uniform(5), {}, 0.0, 0.2);
  ASSERT_TRUE(cap);
  EXPECT_NEAR(*cap, 1.0 - 220.0 / 260.0, 2e-3);
  EXPECT_FALSE(zero_repression_capacity(n, StrategyKind::Inductive, AlphaGrid::uniform(5), {}, 0.0, 0.1));
}

}  // namespace
}  // namespace gridflex
