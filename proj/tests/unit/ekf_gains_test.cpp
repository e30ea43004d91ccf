#include <gtest/gtest.h>

#include <vector>

#include "mfr/ekf_gains.hpp"

namespace mfr {
namespace {

struct Fixture : ::testing::Test {
  std::vector<RadarSite> sites = {{0, -10, 0}, {1, 3, 0}, {2, 10, 0}};
  NoiseModel noise;
  MotionModel motion{0.25, 2.5e-5};
  std::vector<std::vector<TrackEstimate>> predicted;

  Fixture() {
    noise.range_coeff = (Eigen::MatrixXd(3, 2) << 1.0, 2.0, 4.5, 1.5, 2.5, 1.0).finished();
    const StateVector xs[] = {(StateVector() << 1.0, 6.0, 0.5, 0.1).finished(),
                              (StateVector() << 2.0, 4.0, -0.2, 0.1).finished()};
    predicted.resize(3);
    for (auto& row : predicted) {
      for (std::size_t j = 0; j < 2; ++j) {
        TrackEstimate t;
        t.target_id = j;
        t.state = xs[j];
        t.cov = StateMatrix::Identity() * 0.01;
        row.push_back(predict(t, motion));
      }
    }
  }
};

TEST_F(Fixture, GainEqualsLadderTotalInAscendingRadarOrder) {
  const FilterGainProvider g(predicted, noise, sites);
  const std::vector<int> beams = {2, 0, 1};
  const std::vector<BeamAllocation> alloc = {{0, 2}, {2, 1}};
  EXPECT_DOUBLE_EQ(g.gain(1, 0, beams), gain_ladder(predicted[1][0], alloc, noise, sites).total);
  EXPECT_EQ(g.ladder(1, 0, beams).increments.size(), 3u);
  EXPECT_EQ(g.gain(1, 0, std::vector<int>{0, 0, 0}), 0.0);
}

TEST_F(Fixture, SingleBeamGainAndMaximum) {
  const FilterGainProvider g(predicted, noise, sites);
  double best = 0.0;
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<int> b(3, 0);
      b[l] = 1;
      EXPECT_DOUBLE_EQ(g.single_beam_gain(0, j, l), g.gain(0, j, b));
      best = std::max(best, g.single_beam_gain(0, j, l));
    }
  }
  const TopologySpec full = TopologySpec::full(3, 2);
  EXPECT_DOUBLE_EQ(g.max_single_beam_gain(full, 0), best);
  EXPECT_GE(g.max_single_beam_gain(full), best);
}

TEST_F(Fixture, MoreAccurateRadarGivesLargerGain) {
  const FilterGainProvider g(predicted, noise, sites);
  // Target 1: radar 2 has b = 1.0 and is closest.
  EXPECT_GT(g.single_beam_gain(0, 1, 2), g.single_beam_gain(0, 1, 0));
}

TEST_F(Fixture, HorizonOneMatchesSingleScanGain) {
  const FilterGainProvider one(predicted, noise, sites);
  const HorizonGainProvider h1(predicted, motion, noise, sites, 1);
  const std::vector<int> beams = {1, 1, 0};
  EXPECT_NEAR(h1.gain(0, 0, beams), one.gain(0, 0, beams), 1e-15);
}

TEST_F(Fixture, HorizonGainGrowsWithHorizon) {
  const HorizonGainProvider h1(predicted, motion, noise, sites, 1);
  const HorizonGainProvider h5(predicted, motion, noise, sites, 5);
  const std::vector<int> beams = {0, 1, 1};
  EXPECT_GT(h5.gain(2, 1, beams), h1.gain(2, 1, beams));
  EXPECT_EQ(h5.gain(2, 1, std::vector<int>{0, 0, 0}), 0.0);
}

}  // namespace
}  // namespace mfr
