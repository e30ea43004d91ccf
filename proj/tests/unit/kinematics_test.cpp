#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mfr/errors.hpp"
#include "mfr/kinematics.hpp"

namespace mfr {
namespace {

TargetState state(double x, double y, double vx = 0.0, double vy = 0.0) {
  TargetState s;
  s.x << x, y, vx, vy;
  return s;
}

TEST(MotionModel, TransitionAndProcessCovarianceClosedForm) {
  const double t = 0.25;
  const double q = 2.5e-5;
  const MotionModel m(t, q);
  Eigen::Matrix2d f1;
  f1 << 1, t, 0, 1;
  Eigen::Matrix2d q1;
  q1 << t * t * t / 3, t * t / 2, t * t / 2, t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          const double kron_f = f1(a, b) * (c == d ? 1.0 : 0.0);
          const double kron_q = q * q1(a, b) * (c == d ? 1.0 : 0.0);
          EXPECT_DOUBLE_EQ(m.transition()(2 * a + c, 2 * b + d), kron_f);
          EXPECT_DOUBLE_EQ(m.process_covariance()(2 * a + c, 2 * b + d), kron_q);
        }
      }
    }
  }
}

TEST(MotionModel, ProcessCovarianceEntries) {
  const MotionModel m(0.25, 2.5e-5);
  EXPECT_NEAR(m.process_covariance()(2, 2), 6.25e-6, 1e-18);
  EXPECT_NEAR(m.process_covariance()(0, 2), 7.8125e-7, 1e-18);
}

TEST(Propagate, NoiseFreeStep) {
  const MotionModel m(0.25, 2.5e-5);
  const TargetState next = propagate(state(1.0, 6.0, 0.5, 0.1), m);
  EXPECT_DOUBLE_EQ(next.x(0), 1.125);
  EXPECT_DOUBLE_EQ(next.x(2), 0.5);
  EXPECT_EQ(propagate(TargetState{}, m).x, StateVector::Zero());
}

TEST(Propagate, SeededNoiseIsReproducibleAndHasCovarianceQ) {
  const MotionModel m(0.25, 1.0);
  Substream a(StreamDomain::process_noise, {3});
  Substream b(StreamDomain::process_noise, {3});
  EXPECT_EQ(propagate(state(1, 2, 3, 4), m, a).x, propagate(state(1, 2, 3, 4), m, b).x);

  Substream rng(StreamDomain::test, {17});
  const int n = 100000;
  StateMatrix acc = StateMatrix::Zero();
  for (int k = 0; k < n; ++k) {
    const StateVector w = propagate(TargetState{}, m, rng).x;
    acc += w * w.transpose();
  }
  acc /= n;
  const StateMatrix& q = m.process_covariance();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(acc(r, c), q(r, c), 0.03 * q.diagonal().maxCoeff());
  }
}

TEST(Observe, ExactRangeAndAzimuth) {
  const RadarSite radar{0, -10.0, 0.0};
  const Measurement z = observe(radar, 0, state(1.0, 6.0), 0);
  EXPECT_NEAR(z.range, std::sqrt(157.0), 1e-12);
  EXPECT_NEAR(z.range, 12.5300, 1e-4);
  EXPECT_NEAR(z.azimuth, 0.49935, 1e-5);
  EXPECT_NEAR(observe(RadarSite{}, 0, state(0.0, -1.0), 0).azimuth, -std::numbers::pi / 2, 1e-15);
}

TEST(Observe, CoLocatedTargetIsDegenerate) {
  EXPECT_THROW(observe(RadarSite{0, 3.0, 4.0}, 0, state(3.0, 4.0), 0), DegenerateGeometryError);
  EXPECT_THROW(linearize(RadarSite{0, 3.0, 4.0}, state(3.0, 4.0).x), DegenerateGeometryError);
}

TEST(Observe, NoisyMeasurementScatterMatchesR) {
  NoiseModel noise;
  noise.range_coeff = Eigen::MatrixXd::Constant(1, 1, 2.0);
  const RadarSite site{0, 0.0, 0.0};
  Substream rng(StreamDomain::test, {9});
  const int n = 50000;
  double sr = 0.0;
  double sa = 0.0;
  for (int k = 0; k < n; ++k) {
    const Measurement z = observe(site, 0, state(10.0, 0.0), noise, 0, rng);
    sr += (z.range - 10.0) * (z.range - 10.0);
    sa += z.azimuth * z.azimuth;
    ASSERT_GT(z.azimuth, -std::numbers::pi);
    ASSERT_LE(z.azimuth, std::numbers::pi);
  }
  EXPECT_NEAR(std::sqrt(sr / n), 2.0 * 0.015, 0.001);
  EXPECT_NEAR(std::sqrt(sa / n), 0.002, 0.0001);
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(0.3 + 4 * std::numbers::pi), 0.3, 1e-12);
}

TEST(Linearize, AxisCases) {
  MeasurementJacobian expect;
  expect << 1, 0, 0, 0, 0, 1, 0, 0;
  EXPECT_TRUE(linearize(RadarSite{}, state(1, 0).x).isApprox(expect));
  expect << 0, 1, 0, 0, -0.5, 0, 0, 0;
  EXPECT_TRUE(linearize(RadarSite{}, state(0, 2).x).isApprox(expect));
}

TEST(Linearize, MatchesCentralDifferencesAtScenarioGeometry) {
  const RadarSite radars[] = {{0, -10, 0}, {1, 3, 0}, {2, 10, 0}};
  const StateVector targets[] = {state(1.0, 6, 0.5, 0.1).x, state(0.5, 7, 0.35, -0.1).x, state(1.5, 3, -0.3, 0).x,
                                 state(2.0, 4, -0.2, 0.1).x, state(2.5, 5, 0.3, 0.2).x};
  const double h = 1e-6;
  for (const auto& site : radars) {
    for (const auto& x : targets) {
      const MeasurementJacobian jac = linearize(site, x);
      for (int c = 0; c < 4; ++c) {
        StateVector up = x;
        StateVector dn = x;
        up(c) += h;
        dn(c) -= h;
        const Eigen::Vector2d fd = (measure_exact(site, up) - measure_exact(site, dn)) / (2 * h);
        for (int r = 0; r < 2; ++r) {
          const double scale = std::max(std::abs(jac(r, c)), 1e-3);
          EXPECT_LE(std::abs(fd(r) - jac(r, c)) / scale, 1e-5);
        }
      }
    }
  }
}

}  // namespace
}  // namespace mfr
