#include "intersim/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

namespace intersim {
namespace {

TEST(SteeringAngles, StraightMotionIsZero) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.5 * i, 0.25 * i});
  for (double a : steering_angles(pts)) EXPECT_NEAR(a, 0.0, 1e-9);
  EXPECT_EQ(steering_angles(pts).size(), 8u);
}

TEST(SteeringAngles, RightAngleTurn) {
  const std::vector<Vec2> pts{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
  const auto angles = steering_angles(pts);
  ASSERT_EQ(angles.size(), 1u);
  EXPECT_NEAR(angles[0], 90.0, 1e-12);
}

TEST(SteeringAngles, QuarterArcHasUniformRate) {
  const int n = 31;
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double ang = kPi / 2.0 * i / (n - 1);
    pts.push_back({20.0 * std::cos(ang), 20.0 * std::sin(ang)});
  }
  const auto angles = steering_angles(pts);
  ASSERT_EQ(angles.size(), static_cast<std::size_t>(n - 2));
  for (double a : angles) EXPECT_NEAR(a, 90.0 / (n - 1), 1e-6);
}

TEST(SteeringAngles, TooFewPositionsIsEmpty) {
  EXPECT_TRUE(steering_angles(std::vector<Vec2>{{0.0, 0.0}, {1.0, 0.0}}).empty());
}

TEST(SteeringAngles, NearZeroSpeedFramesSkipped) {
  const std::vector<Vec2> pts{{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
  const auto angles = steering_angles(pts);
  // The stationary frame is skipped; both remaining velocities are east.
  ASSERT_EQ(angles.size(), 1u);
  EXPECT_NEAR(angles[0], 0.0, 1e-12);
}

TEST(MakeHistogram, SpecValues) {
  const std::vector<double> tight{0.1, 0.1, 0.1};
  Histogram h = make_histogram(tight, 0.5);
  ASSERT_EQ(h.mass.size(), 1u);
  EXPECT_DOUBLE_EQ(h.mass.at(0), 1.0);

  const std::vector<double> split{0.1, 0.6};
  h = make_histogram(split, 0.5);
  ASSERT_EQ(h.mass.size(), 2u);
  EXPECT_DOUBLE_EQ(h.mass.at(0), 0.5);
  EXPECT_DOUBLE_EQ(h.mass.at(1), 0.5);

  EXPECT_DOUBLE_EQ(make_histogram({}, 0.5).total(), 0.0);
  EXPECT_THROW(make_histogram(split, 0.0), Error);
}

TEST(MakeHistogram, UniformSamplesAreFlat) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(u(rng));
  const Histogram h = make_histogram(samples, 0.1);
  ASSERT_EQ(h.mass.size(), 10u);
  for (const auto& [bin, mass] : h.mass) EXPECT_NEAR(mass, 0.1, 0.02);
  EXPECT_NEAR(h.total(), 1.0, 1e-9);
}

TEST(MakeHistogram, NegativeSamplesUseFloor) {
  const std::vector<double> samples{-0.1, 0.1};
  const Histogram h = make_histogram(samples, 0.5);
  EXPECT_DOUBLE_EQ(h.mass.at(-1), 0.5);
  EXPECT_DOUBLE_EQ(h.mass.at(0), 0.5);
}

TEST(DistributionDifference, SpecValues) {
  const std::vector<double> a{0.2, 0.7, 1.3};
  const Histogram h = make_histogram(a, 0.5);
  EXPECT_DOUBLE_EQ(distribution_difference(h, h), 0.0);

  const Histogram lo = make_histogram(std::vector<double>{0.1, 0.2}, 0.5);
  const Histogram hi = make_histogram(std::vector<double>{5.1, 5.2}, 0.5);
  EXPECT_DOUBLE_EQ(distribution_difference(lo, hi), 2.0);

  Histogram h1;
  h1.bin_width = 1.0;
  h1.mass[0] = 1.0;
  Histogram h2;
  h2.bin_width = 1.0;
  h2.mass[0] = 0.5;
  h2.mass[1] = 0.5;
  EXPECT_DOUBLE_EQ(distribution_difference(h1, h2), 1.0);
}

TEST(DistributionDifference, SymmetricAndBounded) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> n1(2.0, 1.0), n2(3.5, 0.7);
  std::vector<double> a, b;
  for (int i = 0; i < 500; ++i) {
    a.push_back(n1(rng));
    b.push_back(n2(rng));
  }
  const Histogram ha = make_histogram(a, 0.5);
  const Histogram hb = make_histogram(b, 0.5);
  EXPECT_DOUBLE_EQ(distribution_difference(ha, hb), distribution_difference(hb, ha));
  EXPECT_LE(distribution_difference(ha, hb), 2.0 + 1e-12);
  EXPECT_GT(distribution_difference(ha, hb), 0.0);
}

TEST(DistributionDifference, WidthMismatchThrows) {
  const Histogram a = make_histogram(std::vector<double>{1.0}, 0.5);
  const Histogram b = make_histogram(std::vector<double>{1.0}, 0.4);
  EXPECT_THROW(distribution_difference(a, b), Error);
}

TEST(DistributionDifference, SampleOrderInvariant) {
  std::vector<double> samples{3.0, 1.0, 2.0, 1.5, 0.5, 2.5};
  const Histogram a = make_histogram(samples, 0.5);
  std::reverse(samples.begin(), samples.end());
  const Histogram b = make_histogram(samples, 0.5);
  EXPECT_DOUBLE_EQ(distribution_difference(a, b), 0.0);
}

TEST(DistributionDifference, DuplicatingBothSampleSetsKeepsScore) {
  std::vector<double> a{1.0, 2.0, 2.5, 4.0};
  std::vector<double> b{1.5, 2.0, 3.5, 3.5};
  const double before =
      distribution_difference(make_histogram(a, 0.5), make_histogram(b, 0.5));
  std::vector<double> a2 = a;
  a2.insert(a2.end(), a.begin(), a.end());
  std::vector<double> b2 = b;
  b2.insert(b2.end(), b.begin(), b.end());
  const double after =
      distribution_difference(make_histogram(a2, 0.5), make_histogram(b2, 0.5));
  EXPECT_DOUBLE_EQ(before, after);
}

MotionData motion_of(const std::vector<std::vector<Vec2>>& agents) {
  MotionData m;
  int id = 0;
  for (const auto& vel : agents) m.velocities["a" + std::to_string(id++)] = vel;
  return m;
}

TEST(Evaluate, RecordAgainstItselfScoresZero) {
  const MotionData m = motion_of({{{1.0, 0.0}, {1.2, 0.1}, {0.9, -0.1}}, {{2.0, 1.0}, {2.1, 0.9}}});
  const auto report = evaluate(m, m, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(report.velocity_score, 0.0);
  EXPECT_DOUBLE_EQ(report.steering_score, 0.0);
}

TEST(Evaluate, EmptyRecordsAreErrors) {
  const MotionData m = motion_of({{{1.0, 0.0}, {1.2, 0.1}}});
  EXPECT_THROW(evaluate({}, m, 0.5, 2.0), Error);
  EXPECT_THROW(evaluate(m, {}, 0.5, 2.0), Error);
}

TEST(Evaluate, DetectsDistributionShift) {
  // Same shapes, shifted speeds: velocity score positive, steering score 0.
  std::vector<Vec2> slow, fast;
  for (int i = 0; i < 50; ++i) {
    slow.push_back({2.0, 0.0});
    fast.push_back({8.0, 0.0});
  }
  const auto report = evaluate(motion_of({slow}), motion_of({fast}), 0.5, 2.0);
  EXPECT_DOUBLE_EQ(report.velocity_score, 2.0);
  EXPECT_DOUBLE_EQ(report.steering_score, 0.0);
}

}  // namespace
}  // namespace intersim
