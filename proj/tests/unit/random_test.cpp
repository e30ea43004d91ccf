#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mfr/random.hpp"

namespace mfr {
namespace {

TEST(Substream, SameKeyRepeatsSequence) {
  Substream a(StreamDomain::measurement_noise, {1, 2, 3});
  Substream b(StreamDomain::measurement_noise, {1, 2, 3});
  for (int n = 0; n < 100; ++n) EXPECT_EQ(a(), b());
}

TEST(Substream, DomainAndKeySeparateStreams) {
  Substream a(StreamDomain::measurement_noise, {1, 2, 3});
  Substream b(StreamDomain::process_noise, {1, 2, 3});
  Substream c(StreamDomain::measurement_noise, {1, 2, 4});
  Substream d(StreamDomain::measurement_noise, {1, 3, 2});
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Substream, UniformAndBelowStayInRange) {
  Substream s(StreamDomain::test, {0});
  for (int n = 0; n < 10000; ++n) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(s.below(7), 7u);
  }
}

TEST(Substream, NormalHasUnitMoments) {
  Substream s(StreamDomain::test, {42});
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(Substream, BelowIsRoughlyUniform) {
  Substream s(StreamDomain::test, {5});
  std::vector<int> hist(5, 0);
  for (int n = 0; n < 50000; ++n) ++hist[s.below(5)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 400);
}

}  // namespace
}  // namespace mfr
