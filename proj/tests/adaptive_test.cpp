#include "intersim/adaptive.hpp"

#include <gtest/gtest.h>

#include <random>

namespace intersim {
namespace {

EnergyContext test_ctx() {
  EnergyContext ctx;
  ctx.dt = 1.0 / 30.0;
  ctx.perception_radius = 20.0;
  return ctx;
}

AgentState car_at(Vec2 p, Vec2 v) {
  AgentState a;
  a.id = 0;
  a.kind = AgentKind::car;
  a.position = p;
  a.velocity = v;
  a.heading = v.norm() > kEps ? v.normalized() : Vec2{1.0, 0.0};
  a.guidance = a.heading;
  a.expected_speed = v.norm();
  a.weights = EnergyWeights::defaults_for(AgentKind::car);
  return a;
}

TEST(ShortTermInfluence, NoNeighborsIsZero) {
  const AgentState agent = car_at({0.0, 0.0}, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(short_term_influence(agent, {}, test_ctx()), 0.0);
}

TEST(ShortTermInfluence, UnitAtSafeDistance) {
  const AgentState agent = car_at({0.0, 0.0}, {0.0, 0.0});
  AgentState other = car_at({4.0, 0.0}, {0.0, 0.0});
  other.id = 1;
  const std::vector<AgentState> neighbors{other};
  EXPECT_DOUBLE_EQ(short_term_influence(agent, neighbors, test_ctx()), 1.0);
}

TEST(ShortTermInfluence, RecedingNeighborBeyondPerceptionIsExactlyZero) {
  const AgentState agent = car_at({0.0, 0.0}, {0.0, 0.0});
  // Currently 19.5 m ahead, receding fast: after 7 steps (T/2) it crosses the
  // 20 m perception radius and must be excluded outright.
  AgentState other = car_at({19.5, 0.0}, {30.0, 0.0});
  other.id = 1;
  const std::vector<AgentState> neighbors{other};
  EXPECT_DOUBLE_EQ(short_term_influence(agent, neighbors, test_ctx()), 0.0);
}

TEST(ShortTermInfluence, UsesHalvedLookahead) {
  // A neighbor closing at 6 m/s from 6 m: after 7 steps (0.2333 s) the gap is
  // 6 - 1.4 = 4.6 m, giving exp(4 - 4.6) under the full mask.
  const AgentState agent = car_at({0.0, 0.0}, {0.0, 0.0});
  AgentState other = car_at({6.0, 0.0}, {-6.0, 0.0});
  other.id = 1;
  const std::vector<AgentState> neighbors{other};
  const double gap = 6.0 - 6.0 * 7.0 / 30.0;
  EXPECT_NEAR(short_term_influence(agent, neighbors, test_ctx()), std::exp(4.0 - gap), 1e-12);
}

TEST(AdjustVelocityWeights, ZeroInfluenceIsIdentity) {
  const EnergyWeights w = EnergyWeights::defaults_for(AgentKind::car);
  const EnergyWeights out = adjust_velocity_weights(w, 0.0);
  EXPECT_DOUBLE_EQ(out.w_dir, w.w_dir_init);
  EXPECT_DOUBLE_EQ(out.w_m, w.w_m_init);
  EXPECT_DOUBLE_EQ(out.w_e, w.w_e_init);
}

TEST(AdjustVelocityWeights, CarSpecValues) {
  EnergyWeights w = EnergyWeights::defaults_for(AgentKind::car);
  w.w_dir_init = 1.0;
  w.w_m_init = 1.0;
  w.w_e_init = 1.5;
  const EnergyWeights out = adjust_velocity_weights(w, 1.0);
  EXPECT_DOUBLE_EQ(out.w_dir, 1.5);
  EXPECT_DOUBLE_EQ(out.w_m, 0.5);
  EXPECT_DOUBLE_EQ(out.w_e, 1.0);
}

TEST(AdjustVelocityWeights, PedestrianClampsAtZero) {
  const EnergyWeights w = EnergyWeights::defaults_for(AgentKind::pedestrian);
  const EnergyWeights out = adjust_velocity_weights(w, 1.0);
  EXPECT_NEAR(out.w_dir, 0.5 + 1.0 / 4.5, 1e-12);
  EXPECT_DOUBLE_EQ(out.w_m, 0.0);  // 1.0 - 1/0.5 clamps
  EXPECT_NEAR(out.w_e, 1.5 - 1.0 / 1.5, 1e-12);
}

TEST(AdjustVelocityWeights, IdempotentPerTick) {
  const EnergyWeights w = EnergyWeights::defaults_for(AgentKind::bicycle);
  const EnergyWeights once = adjust_velocity_weights(w, 0.8);
  const EnergyWeights twice = adjust_velocity_weights(once, 0.8);
  EXPECT_DOUBLE_EQ(once.w_dir, twice.w_dir);
  EXPECT_DOUBLE_EQ(once.w_m, twice.w_m);
  EXPECT_DOUBLE_EQ(once.w_e, twice.w_e);
}

TEST(AdjustVelocityWeights, MonotoneInInfluence) {
  for (AgentKind kind : {AgentKind::car, AgentKind::pedestrian, AgentKind::bicycle}) {
    const EnergyWeights w = EnergyWeights::defaults_for(kind);
    double prev_dir = -1.0, prev_m = 1e18, prev_e = 1e18;
    for (double e = 0.0; e <= 5.0; e += 0.25) {
      const EnergyWeights out = adjust_velocity_weights(w, e);
      EXPECT_GE(out.w_dir, prev_dir);
      EXPECT_LE(out.w_m, prev_m);
      EXPECT_LE(out.w_e, prev_e);
      EXPECT_GE(out.w_m, 0.0);
      EXPECT_GE(out.w_e, 0.0);
      prev_dir = out.w_dir;
      prev_m = out.w_m;
      prev_e = out.w_e;
    }
  }
}

TEST(YellowLight, SpecValues) {
  EXPECT_TRUE(should_accelerate_yellow(10.0, 14.0, 3.0, 30.0, 20.0));   // 12 * 2 = 24 >= 20
  EXPECT_FALSE(should_accelerate_yellow(10.0, 14.0, 1.0, 30.0, 5.0));   // t' = 0
  EXPECT_TRUE(should_accelerate_yellow(10.0, 14.0, 1.0, 30.0, 0.0));    // G = 0 boundary
  EXPECT_FALSE(should_accelerate_yellow(5.0, 7.0, 2.0, 30.0, 10.0));    // 6 * 1 = 6 < 10
}

TEST(YellowLight, MonotoneInTimeAntitoneInDistance) {
  for (double s = 1.0; s <= 5.0; s += 0.5) {
    for (double g = 0.0; g <= 40.0; g += 5.0) {
      const bool here = should_accelerate_yellow(8.0, 12.0, s, 30.0, g);
      EXPECT_LE(here, should_accelerate_yellow(8.0, 12.0, s + 0.5, 30.0, g));
      if (g >= 5.0) {
        EXPECT_GE(should_accelerate_yellow(8.0, 12.0, s, 30.0, g - 5.0), here);
      }
    }
  }
}

TEST(GuidanceWeight, SpecValues) {
  EXPECT_DOUBLE_EQ(adjust_guidance_weight(1.0, 25.0, 25.0, true, 10.0), 1.0);
  EXPECT_DOUBLE_EQ(adjust_guidance_weight(1.0, 20.0, 40.0, true, 10.0), 0.5);
  // Ratio floor at 0.5 m, then the cap.
  EXPECT_DOUBLE_EQ(adjust_guidance_weight(1.0, 4.0, 0.0, true, 10.0), 8.0);
  EXPECT_DOUBLE_EQ(adjust_guidance_weight(1.0, 40.0, 0.0, true, 10.0), 10.0);
  // Outside the central area the initial value holds.
  EXPECT_DOUBLE_EQ(adjust_guidance_weight(1.0, 20.0, 40.0, false, 10.0), 1.0);
}

TEST(GuidanceWeight, GrowsWhileApproachingGoal) {
  double prev = 0.0;
  for (double dis_cd = 30.0; dis_cd >= 1.0; dis_cd -= 1.0) {
    const double w = adjust_guidance_weight(1.0, 20.0, dis_cd, true, 10.0);
    EXPECT_GE(w, prev);
    prev = w;
  }
}

// ---------------------------------------------------------------------------
// Light policy.

Scenario light_scenario() {
  Scenario s;
  s.frame_rate = 30.0;
  s.grid_cell_size = 10.0;
  s.central_area = {{-15.0, -15.0}, {15.0, -15.0}, {15.0, 15.0}, {-15.0, 15.0}};
  Lane lane;
  lane.id = "in";
  lane.centerline = {{0.0, -60.0}, {0.0, -15.0}};
  lane.width = 3.5;
  lane.direction = {0.0, 1.0};
  lane.entry_boundary_midpoint = {0.0, -15.0};
  s.lanes.push_back(lane);
  TrafficLight light;
  light.stop_line_a = {-2.0, -15.0};
  light.stop_line_b = {2.0, -15.0};
  light.phases = {{LightColor::red, 20.0}, {LightColor::green, 20.0}, {LightColor::yellow, 3.0}};
  light.applies_to = {"in"};
  s.lights.push_back(light);
  s.validate();
  return s;
}

AgentState approaching_agent(Vec2 p, double speed, AgentKind kind = AgentKind::car) {
  AgentState a;
  a.id = 0;
  a.kind = kind;
  a.position = p;
  a.velocity = {0.0, speed};
  a.heading = {0.0, 1.0};
  a.guidance = {0.0, 1.0};
  a.desired_normal = 8.0;
  a.desired_fast = 12.0;
  a.expected_speed = 8.0;
  a.departure_lane = "in";
  a.goal = {0.0, 15.0};
  a.radius = 0.9;
  a.weights = EnergyWeights::defaults_for(kind);
  return a;
}

TEST(LightPolicy, GreenHasNoObstacle) {
  const Scenario s = light_scenario();
  const auto d = light_policy(approaching_agent({0.0, -30.0}, 8.0), s, 25.0);
  EXPECT_FALSE(d.stop_obstacle.has_value());
  EXPECT_DOUBLE_EQ(d.expected_speed, 8.0);
  EXPECT_FALSE(d.boost_expected_weight);
}

TEST(LightPolicy, RedBeforeLinePlacesObstacleAtNearestPoint) {
  const Scenario s = light_scenario();
  const auto d = light_policy(approaching_agent({0.5, -30.0}, 8.0), s, 5.0);
  ASSERT_TRUE(d.stop_obstacle.has_value());
  EXPECT_EQ(*d.stop_obstacle, (Vec2{0.5, -15.0}));
  EXPECT_DOUBLE_EQ(d.expected_speed, 8.0);
}

TEST(LightPolicy, CrossedAgentsAreLeftAlone) {
  const Scenario s = light_scenario();
  const auto d = light_policy(approaching_agent({0.0, -10.0}, 8.0), s, 5.0);
  EXPECT_FALSE(d.stop_obstacle.has_value());
}

TEST(LightPolicy, PedestrianInsideAreaSpeedsUpOnRed) {
  const Scenario s = light_scenario();
  auto ped = approaching_agent({0.0, -5.0}, 1.3, AgentKind::pedestrian);
  ped.desired_normal = 1.3;
  ped.desired_fast = 2.0;
  const auto d = light_policy(ped, s, 5.0);
  EXPECT_FALSE(d.stop_obstacle.has_value());
  EXPECT_DOUBLE_EQ(d.expected_speed, 2.0);
  EXPECT_TRUE(d.boost_expected_weight);
}

TEST(LightPolicy, YellowAcceleratesWhenCrossingIsFeasible) {
  const Scenario s = light_scenario();
  // Yellow spans t in [40, 43), so at t = 40 there are s = 3 seconds left and
  // the mean-speed travel budget is ((10 + 12) / 2) * 2 = 22 m.
  auto agent = approaching_agent({0.0, -40.0}, 10.0);
  const auto far_d = light_policy(agent, s, 40.0);
  EXPECT_TRUE(far_d.stop_obstacle.has_value());  // needs 25 + 1.8 > 22

  agent.position = {0.0, -20.0};
  const auto near_d = light_policy(agent, s, 40.0);
  EXPECT_FALSE(near_d.stop_obstacle.has_value());  // needs 5 + 1.8 <= 22
  EXPECT_DOUBLE_EQ(near_d.expected_speed, 12.0);
  EXPECT_TRUE(near_d.boost_expected_weight);
}

TEST(LightPolicy, MakeStopLineObstacle) {
  const auto agent = approaching_agent({0.0, -20.0}, 8.0);
  const auto obs = make_stop_line_obstacle(agent, {0.0, -15.0});
  EXPECT_TRUE(obs.virtual_obstacle);
  EXPECT_EQ(obs.kind, agent.kind);
  EXPECT_EQ(obs.velocity, (Vec2{0.0, 0.0}));
  EXPECT_EQ(obs.position, (Vec2{0.0, -15.0}));
}

}  // namespace
}  // namespace intersim
