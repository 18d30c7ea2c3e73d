#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "intersim/geometry.hpp"
#include "intersim/scenario.hpp"
#include "intersim/types.hpp"

namespace intersim {

// Live weights of the energy function plus the per-agent constants the
// adaptive adjustment works from. Live values are recomputed from the _init
// copies every tick, never compounded.
struct EnergyWeights {
  double w_v = 1.0;
  double w_g = 1.0;
  double w_c = 1.0;
  double w_dir = 1.0;
  double w_m = 1.0;
  double w_e = 1.5;

  double w_v_init = 1.0;
  double w_g_init = 1.0;
  double w_c_init = 1.0;
  double w_dir_init = 1.0;
  double w_m_init = 1.0;
  double w_e_init = 1.5;

  double lambda_dir = 2.0;
  double lambda_m = 2.0;
  double lambda_e = 2.0;

  double d_s = 4.0;    // safe distance, meters
  int t_steps = 15;    // collision lookahead, time steps

  void reset_to_initials() {
    w_v = w_v_init;
    w_g = w_g_init;
    w_c = w_c_init;
    w_dir = w_dir_init;
    w_m = w_m_init;
    w_e = w_e_init;
  }

  static EnergyWeights defaults_for(AgentKind kind) {
    EnergyWeights w;
    switch (kind) {
      case AgentKind::car:
        w.w_dir_init = 1.0;
        w.w_m_init = 1.0;
        w.w_e_init = 1.5;
        w.w_g_init = 1.0;
        w.lambda_dir = 2.0;
        w.lambda_m = 2.0;
        w.lambda_e = 2.0;
        w.d_s = 4.0;
        break;
      case AgentKind::pedestrian:
        w.w_dir_init = 0.5;
        w.w_m_init = 1.0;
        w.w_e_init = 1.5;
        w.w_g_init = 1.3;
        w.lambda_dir = 4.5;
        w.lambda_m = 0.5;
        w.lambda_e = 1.5;
        w.d_s = 1.0;
        break;
      case AgentKind::bicycle:
        w.w_dir_init = 1.0;
        w.w_m_init = 1.0;
        w.w_e_init = 2.0;
        w.w_g_init = 1.5;
        w.lambda_dir = 2.0;
        w.lambda_m = 0.5;
        w.lambda_e = 1.5;
        w.d_s = 2.0;
        break;
    }
    w.reset_to_initials();
    return w;
  }
};

struct AgentState {
  int id = -1;
  AgentKind kind = AgentKind::car;
  Vec2 position;
  Vec2 velocity;
  Vec2 heading{1.0, 0.0};  // last nonzero velocity direction
  Vec2 guidance;           // unit vector, refreshed each tick
  double expected_speed = 0.0;  // e, the active desired speed
  double desired_normal = 0.0;  // e1
  double desired_fast = 0.0;    // e2
  Planning planning = Planning::straight;
  std::string departure_lane;
  Vec2 goal;
  double radius = 1.0;
  bool virtual_obstacle = false;  // stop-line obstacle injected by the engine
  EnergyWeights weights;
};

// -------------------------------------------------------------------------
// Planning/location interaction mask.

enum class MaskSector { front = 0, right = 1, back = 2, left = 3 };

inline MaskSector sector_of_deg(double theta_right_deg) {
  const double t = theta_right_deg;
  if (t >= -45.0 && t <= 45.0) return MaskSector::front;
  if (t > 45.0 && t <= 135.0) return MaskSector::right;
  if (t < -45.0 && t >= -135.0) return MaskSector::left;
  return MaskSector::back;
}

inline std::string to_string(MaskSector s) {
  switch (s) {
    case MaskSector::front: return "front";
    case MaskSector::right: return "right";
    case MaskSector::back: return "back";
    case MaskSector::left: return "left";
  }
  return "front";
}

inline MaskSector parse_mask_sector(const std::string& s) {
  if (s == "front") return MaskSector::front;
  if (s == "right") return MaskSector::right;
  if (s == "back") return MaskSector::back;
  if (s == "left") return MaskSector::left;
  throw Error("unknown mask sector: '" + s + "'");
}

// Whether two plannings can collide given where the neighbor currently sits
// relative to the agent's heading. Values are restricted to {0, 0.5, 1}.
class MaskTable {
 public:
  double value(Planning mine, Planning theirs, MaskSector sector) const {
    return v_[idx(mine)][idx(theirs)][static_cast<int>(sector)];
  }

  void set(Planning mine, Planning theirs, MaskSector sector, double value) {
    if (value != 0.0 && value != 0.5 && value != 1.0) {
      throw Error("mask table entries must be 0, 0.5 or 1.0");
    }
    v_[idx(mine)][idx(theirs)][static_cast<int>(sector)] = value;
  }

  // Reconstruction of the planning/location table. Anything ahead gets full
  // weight (followers share the corridor); to the sides, 1.0 where the two
  // corridors cross (straights and left turns cut across each other), 0.5
  // where they are adjacent but non-crossing (right turns peel away early,
  // right turn vs. left turn), 0.0 where they diverge (two right turns from
  // different arms). Neighbors behind are ignored.
  static MaskTable defaults() {
    MaskTable m;
    const Planning s = Planning::straight;
    const Planning tl = Planning::turn_left;
    const Planning tr = Planning::turn_right;
    auto row = [&m](Planning mine, Planning theirs, double front, double right, double left) {
      m.set(mine, theirs, MaskSector::front, front);
      m.set(mine, theirs, MaskSector::right, right);
      m.set(mine, theirs, MaskSector::left, left);
      m.set(mine, theirs, MaskSector::back, 0.0);
    };
    row(s, s, 1.0, 1.0, 1.0);
    row(s, tl, 1.0, 1.0, 1.0);
    row(s, tr, 1.0, 0.5, 0.5);
    row(tl, s, 1.0, 1.0, 1.0);
    row(tl, tl, 1.0, 1.0, 1.0);
    row(tl, tr, 1.0, 0.5, 0.5);
    row(tr, s, 1.0, 0.5, 0.5);
    row(tr, tl, 1.0, 0.5, 0.5);
    row(tr, tr, 1.0, 0.0, 0.0);
    return m;
  }

 private:
  static int idx(Planning p) { return static_cast<int>(p); }
  std::array<std::array<std::array<double, 4>, 3>, 3> v_{};
};

// -------------------------------------------------------------------------
// Heading-sensitivity Gaussian.

struct GaussianPiece {
  double sigma1_sq = 550.0;
  double sigma2_sq = 200.0;
  double lo_deg = -30.0;  // inner interval, inclusive
  double hi_deg = 30.0;
};

struct PlanningGaussianTable {
  GaussianPiece vehicle_straight{550.0, 200.0, -30.0, 30.0};
  // Right-turn orientation: the wider inner interval lies on the turn side
  // (positive angles are to the right). Mirrored for left turns.
  GaussianPiece vehicle_turn{650.0, 250.0, -20.0, 40.0};
  GaussianPiece pedestrian{1200.0, 200.0, -35.0, 35.0};

  GaussianPiece piece(Planning planning, AgentKind kind) const {
    if (kind == AgentKind::pedestrian) return pedestrian;
    switch (planning) {
      case Planning::straight: return vehicle_straight;
      case Planning::turn_right: return vehicle_turn;
      case Planning::turn_left:
        return GaussianPiece{vehicle_turn.sigma1_sq, vehicle_turn.sigma2_sq,
                             -vehicle_turn.hi_deg, -vehicle_turn.lo_deg};
    }
    return vehicle_straight;
  }
};

inline const PlanningGaussianTable& default_gaussian_table() {
  static const PlanningGaussianTable table{};
  return table;
}

// Piecewise Gaussian attention factor over the bearing theta (degrees,
// positive to the right); defined on [-50, 50].
inline double planning_gaussian(Planning planning, AgentKind kind, double theta_deg,
                                const PlanningGaussianTable& table = default_gaussian_table()) {
  if (std::abs(theta_deg) > 50.0 + kEps) {
    throw Error("planning_gaussian: theta " + std::to_string(theta_deg) + " outside [-50, 50]");
  }
  const GaussianPiece p = table.piece(planning, kind);
  const double sigma_sq =
      (theta_deg >= p.lo_deg && theta_deg <= p.hi_deg) ? p.sigma1_sq : p.sigma2_sq;
  return std::exp(-(theta_deg * theta_deg) / (2.0 * sigma_sq));
}

// -------------------------------------------------------------------------
// Energy terms.

// Velocity term: direction continuity + magnitude continuity + expected
// speed. The direction part is 0 when either speed is near zero.
inline double velocity_energy(const Vec2& v, const Vec2& prev_v, double expected_speed,
                              double w_dir, double w_m, double w_e) {
  const double vm = v.norm();
  const double pm = prev_v.norm();
  double dir_term = 0.0;
  if (vm >= kEps && pm >= kEps) {
    dir_term = (v / vm - prev_v / pm).norm();
  }
  return w_dir * dir_term + w_m * std::abs(vm - pm) + w_e * std::abs(vm - expected_speed);
}

// Guidance term: ||v_hat - g||. A zero candidate uses v_hat = 0, giving
// ||g|| = 1.
inline double guidance_energy(const Vec2& v, const Vec2& guidance) {
  return (v.normalized() - guidance).norm();
}

// Unit guidance direction: toward the goal inside the central area, parallel
// to the containing lane otherwise. Empty when the agent sits on its goal.
inline std::optional<Vec2> guidance_direction(const Vec2& position, const Vec2& goal,
                                              const Scenario& scenario,
                                              const std::string& preferred_lane = "") {
  if (distance(position, goal) < kEps) return std::nullopt;
  if (!in_central_area(scenario, position)) {
    const Lane* lane = scenario.lane_containing(position, preferred_lane);
    if (lane) return lane->direction;
  }
  return (goal - position).normalized();
}

struct EnergyContext {
  const MaskTable* mask = nullptr;
  const PlanningGaussianTable* gaussians = nullptr;
  double dt = 1.0 / 30.0;
  double perception_radius = 20.0;

  const MaskTable& mask_table() const {
    static const MaskTable def = MaskTable::defaults();
    return mask ? *mask : def;
  }
  const PlanningGaussianTable& gaussian_table() const {
    return gaussians ? *gaussians : default_gaussian_table();
  }
};

namespace detail {

inline double pair_collision_energy_at(const AgentState& agent, const AgentState& neighbor,
                                       const Vec2& v_candidate, const EnergyContext& ctx,
                                       double d_s, int t_steps) {
  const double horizon = static_cast<double>(t_steps) * ctx.dt;
  const Vec2 predicted_self = agent.position + v_candidate * horizon;
  const Vec2 predicted_other = neighbor.position + neighbor.velocity * horizon;
  const Vec2 rel = predicted_other - predicted_self;
  const double d = rel.norm();

  if (neighbor.virtual_obstacle) {
    // Stop lines behave as linear obstacles: they block the whole approach,
    // so neither steering the attention cone away nor predicting past the
    // line reduces the energy. The distance is the remaining travel toward
    // the line, negative once the prediction penetrates it.
    const Vec2 approach = neighbor.position - agent.position;
    const double remaining = approach.norm() < kEps ? 0.0 : dot(rel, approach.normalized());
    return std::exp(d_s - remaining);
  }

  Vec2 heading = v_candidate;
  if (heading.norm() < kEps) heading = agent.heading;
  if (heading.norm() < kEps) heading = agent.guidance;
  if (heading.norm() < kEps) return 0.0;

  // A coincident prediction counts as dead ahead.
  const double theta = d < kEps ? 0.0 : bearing_right_deg(heading, rel);
  if (std::abs(theta) > 50.0) return 0.0;

  const double f = planning_gaussian(agent.planning, agent.kind, theta, ctx.gaussian_table());
  const double base = f * std::exp(d_s - d);

  const bool homogeneous_non_ped =
      agent.kind == neighbor.kind && agent.kind != AgentKind::pedestrian;
  if (!homogeneous_non_ped) return base;
  return ctx.mask_table().value(agent.planning, neighbor.planning, sector_of_deg(theta)) * base;
}

}  // namespace detail

// Pairwise planning-aware collision energy: both agents extrapolated forward
// (the agent with the candidate velocity, the neighbor with its current one);
// neighbors outside the [-50, 50] degree bearing contribute nothing. Crossing
// paths can conflict before the full lookahead elapses, so the energy is the
// worst over a third, two-thirds and the whole of the horizon.
inline double pair_collision_energy(const AgentState& agent, const AgentState& neighbor,
                                    const Vec2& v_candidate, const EnergyContext& ctx,
                                    double d_s, int t_steps) {
  double worst =
      detail::pair_collision_energy_at(agent, neighbor, v_candidate, ctx, d_s, t_steps);
  for (int steps : {t_steps / 3, 2 * t_steps / 3}) {
    if (steps < 1 || steps == t_steps) continue;
    worst = std::max(worst, detail::pair_collision_energy_at(agent, neighbor, v_candidate, ctx,
                                                             d_s, steps));
  }
  return worst;
}

// Quadratic-over-linear aggregation: stronger influences dominate.
inline double total_collision_energy(std::span<const double> pair_energies) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : pair_energies) {
    sum += e;
    sum_sq += e * e;
  }
  if (sum < 1e-12) return 0.0;
  return sum_sq / sum;
}

struct EnergyBreakdown {
  double total = 0.0;
  double guidance_term = 0.0;   // w_g * E_g
  double collision_term = 0.0;  // w_c * E_c
};

inline EnergyBreakdown total_energy(const AgentState& agent, const Vec2& v_candidate,
                                    std::span<const AgentState> neighbors,
                                    const EnergyContext& ctx) {
  const EnergyWeights& w = agent.weights;
  const double e_v = velocity_energy(v_candidate, agent.velocity, agent.expected_speed,
                                     w.w_dir, w.w_m, w.w_e);
  const double e_g = guidance_energy(v_candidate, agent.guidance);

  std::vector<double> pair;
  pair.reserve(neighbors.size());
  for (const auto& n : neighbors) {
    pair.push_back(pair_collision_energy(agent, n, v_candidate, ctx, w.d_s, w.t_steps));
  }
  const double e_c = total_collision_energy(pair);

  EnergyBreakdown out;
  out.guidance_term = w.w_g * e_g;
  out.collision_term = w.w_c * e_c;
  out.total = w.w_v * e_v + out.guidance_term + out.collision_term;
  return out;
}

}  // namespace intersim
