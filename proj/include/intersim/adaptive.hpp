#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "intersim/energy.hpp"
#include "intersim/scenario.hpp"

namespace intersim {

// Collision influence of the current neighbors after T/2 time steps (integer
// halved), evaluated with the agent's current velocity. Neighbors predicted
// beyond the perception radius are excluded.
inline double short_term_influence(const AgentState& agent, std::span<const AgentState> neighbors,
                                   const EnergyContext& ctx) {
  const int half_steps = agent.weights.t_steps / 2;
  const double horizon = static_cast<double>(half_steps) * ctx.dt;
  std::vector<double> pair;
  pair.reserve(neighbors.size());
  for (const auto& n : neighbors) {
    const Vec2 predicted_self = agent.position + agent.velocity * horizon;
    const Vec2 predicted_other = n.position + n.velocity * horizon;
    if (distance(predicted_self, predicted_other) > ctx.perception_radius) {
      pair.push_back(0.0);
      continue;
    }
    pair.push_back(pair_collision_energy(agent, n, agent.velocity, ctx, agent.weights.d_s,
                                         half_steps));
  }
  return total_collision_energy(pair);
}

// Interaction-driven sub-weight update, always recomputed from the stored
// initials: pressure raises the direction-continuity weight and relaxes the
// magnitude/expected-speed weights, clamped at zero.
inline EnergyWeights adjust_velocity_weights(const EnergyWeights& weights, double e_temp_c) {
  EnergyWeights w = weights;
  w.w_dir = w.w_dir_init + e_temp_c / w.lambda_dir;
  w.w_m = std::max(0.0, w.w_m_init - e_temp_c / w.lambda_m);
  w.w_e = std::max(0.0, w.w_e_init - e_temp_c / w.lambda_e);
  return w;
}

// Whether a vehicle facing a yellow light can fully cross the stop line in
// the remaining time, travelling at the mean of its current and fast desired
// speeds. t' = frame_rate * (s - 1) frames.
inline bool should_accelerate_yellow(double speed, double desired_fast, double seconds_left,
                                     double frame_rate, double crossing_distance) {
  const double t_prime_frames = frame_rate * (seconds_left - 1.0);
  const double travel_seconds = t_prime_frames / frame_rate;
  return 0.5 * (speed + desired_fast) * travel_seconds >= crossing_distance;
}

// Geometric guidance-weight scaling inside the central area; the ratio floor
// keeps it bounded as the agent closes on its goal.
inline double adjust_guidance_weight(double w_g_init, double dis_ac, double dis_cd,
                                     bool in_central_area, double w_g_max,
                                     double dis_cd_floor = 0.5) {
  if (!in_central_area) return w_g_init;
  const double denom = std::max(dis_cd, dis_cd_floor);
  return std::clamp(dis_ac / denom * w_g_init, 0.0, w_g_max);
}

// Traffic-light response for one agent at one tick.
struct LightDecision {
  std::optional<Vec2> stop_obstacle;  // virtual static neighbor on the stop line
  double expected_speed = 0.0;
  bool boost_expected_weight = false;  // w_e <- 2 * w_e_init
};

// Red ahead of the stop line stops the agent through a virtual obstacle;
// pedestrians caught inside the central area on red hurry through; a yellow
// either continues at the fast desired speed or is treated like red.
inline LightDecision light_policy(const AgentState& agent, const Scenario& scenario,
                                  double sim_time) {
  LightDecision out;
  out.expected_speed = agent.desired_normal;

  const TrafficLight* light = scenario.light_for_lane(agent.departure_lane);
  if (!light) return out;

  const LightColor color = light_color_at(*light, sim_time);
  if (color == LightColor::green) return out;

  if (agent.kind == AgentKind::pedestrian && color == LightColor::red &&
      in_central_area(scenario, agent.position)) {
    out.expected_speed = agent.desired_fast;
    out.boost_expected_weight = true;
    return out;
  }

  const Vec2 stop_point =
      closest_point_on_segment(light->stop_line_a, light->stop_line_b, agent.position);
  const Lane* lane = scenario.find_lane(agent.departure_lane);
  const Vec2 travel = lane ? lane->direction : agent.heading;
  const bool crossed = dot(agent.position - stop_point, travel) > 0.0;
  if (crossed) return out;

  if (color == LightColor::yellow) {
    const double s = seconds_remaining(*light, sim_time);
    const double crossing_distance = distance(agent.position, stop_point) + 2.0 * agent.radius;
    if (should_accelerate_yellow(agent.velocity.norm(), agent.desired_fast, s,
                                 scenario.frame_rate, crossing_distance)) {
      out.expected_speed = agent.desired_fast;
      out.boost_expected_weight = true;
      return out;
    }
  }

  out.stop_obstacle = stop_point;
  return out;
}

// The virtual neighbor realizing a red stop line: static, same kind as the
// observer so the exponential term applies at full mask.
inline AgentState make_stop_line_obstacle(const AgentState& agent, const Vec2& stop_point) {
  AgentState obstacle;
  obstacle.id = -1;
  obstacle.kind = agent.kind;
  obstacle.position = stop_point;
  obstacle.velocity = {0.0, 0.0};
  obstacle.heading = agent.heading * -1.0;
  obstacle.planning = Planning::straight;
  obstacle.radius = 0.0;
  obstacle.virtual_obstacle = true;
  return obstacle;
}

}  // namespace intersim
