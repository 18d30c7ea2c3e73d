#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "intersim/energy.hpp"
#include "intersim/velocity_dataset.hpp"

namespace intersim {

// Behavioral acceptability gates for dataset candidates.
struct IndicatorThresholds {
  double tau_m = 1.0;    // speed change, m/s
  double tau_dir = 1.0;  // heading change, radians
  double tau_g = 2.0;    // weighted guidance energy
  double tau_c = 10.0;   // weighted collision energy

  void validate() const {
    if (tau_m <= 0.0 || tau_dir <= 0.0 || tau_g <= 0.0 || tau_c <= 0.0) {
      throw Error("indicator thresholds must be positive");
    }
  }
};

// Supplementary candidate grid around the previous velocity.
struct SupplementConfig {
  double psi_m = 1.0;   // magnitude range, m/s
  double i_m = 0.25;    // magnitude interval, m/s
  double psi_d = 0.9;   // direction range, radians
  double i_d = 0.3;     // direction interval, radians

  int magnitude_steps() const { return static_cast<int>(std::llround(psi_m / i_m)); }
  int direction_steps() const { return static_cast<int>(std::llround(psi_d / i_d)); }

  void validate() const {
    if (psi_m <= 0.0 || i_m <= 0.0 || psi_d <= 0.0 || i_d <= 0.0) {
      throw Error("supplement config values must be positive");
    }
    const double rm = psi_m / i_m;
    const double rd = psi_d / i_d;
    if (std::abs(rm - std::llround(rm)) > 1e-6 || std::llround(rm) < 1) {
      throw Error("supplement: psi_m / i_m must be a positive integer");
    }
    if (std::abs(rd - std::llround(rd)) > 1e-6 || std::llround(rd) < 1) {
      throw Error("supplement: psi_d / i_d must be a positive integer");
    }
  }
};

// All four gates must hold; comparisons are inclusive. The heading-change
// angle is 0 when either velocity is near zero.
inline bool acceptable(const Vec2& v, const Vec2& v_prev, double guidance_term,
                       double collision_term, const IndicatorThresholds& th) {
  if (std::abs(v_prev.norm() - v.norm()) > th.tau_m) return false;
  if (angle_between(v_prev, v) > th.tau_dir) return false;
  if (guidance_term > th.tau_g) return false;
  if (collision_term > th.tau_c) return false;
  return true;
}

// Magnitude grid x direction grid around v_prev; magnitudes clamp at zero and
// exact duplicates collapse. For a zero v_prev the directions fan out around
// `fallback_direction` instead.
inline std::vector<Vec2> supplement(const Vec2& v_prev, const SupplementConfig& cfg,
                                    const Vec2& fallback_direction = Vec2{0.0, 0.0}) {
  cfg.validate();
  const double base_mag = v_prev.norm();
  Vec2 base_dir = v_prev.normalized();
  if (base_dir.norm() < kEps) {
    base_dir = fallback_direction.normalized();
    if (base_dir.norm() < kEps) {
      throw Error("supplement: zero previous velocity and no guidance direction");
    }
  }

  const int pm = cfg.magnitude_steps();
  std::vector<double> magnitudes;
  magnitudes.reserve(2 * pm + 1);
  for (int p = -pm; p <= pm; ++p) {
    const double m = std::max(0.0, base_mag + p * cfg.i_m);
    if (magnitudes.empty() || m != magnitudes.back()) magnitudes.push_back(m);
  }

  const int qd = cfg.direction_steps();
  std::vector<Vec2> out;
  out.reserve(magnitudes.size() * (2 * qd + 1));
  for (double m : magnitudes) {
    if (m == 0.0) {
      out.push_back({0.0, 0.0});
      continue;
    }
    for (int q = -qd; q <= qd; ++q) {
      out.push_back(base_dir.rotated(q * cfg.i_d) * m);
    }
  }
  return out;
}

enum class SelectionOrigin { dataset, supplement };

struct Selection {
  Vec2 velocity;
  SelectionOrigin origin = SelectionOrigin::dataset;
  EnergyBreakdown energy;
};

namespace detail {

// First index with strictly minimal energy; -1 for an empty set.
inline int argmin_energy(const AgentState& agent, std::span<const Vec2> candidates,
                         std::span<const AgentState> neighbors, const EnergyContext& ctx,
                         EnergyBreakdown* best_out) {
  int best = -1;
  EnergyBreakdown best_e;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const EnergyBreakdown e = total_energy(agent, candidates[i], neighbors, ctx);
    if (best < 0 || e.total < best_e.total) {
      best = static_cast<int>(i);
      best_e = e;
    }
  }
  if (best >= 0 && best_out) *best_out = best_e;
  return best;
}

}  // namespace detail

// Phase 1: energy argmin over the magnitude-window of the agent's dataset
// pool, returned when it passes the acceptability gates. Phase 2: argmin over
// the velocity-continuity supplement, returned unconditionally so the agent
// always makes progress. Ties break toward the smaller candidate index.
inline Selection select_velocity(const AgentState& agent, std::span<const AgentState> neighbors,
                                 const CandidateVelocityDataset& dataset,
                                 const IndicatorThresholds& thresholds,
                                 const SupplementConfig& supplement_cfg, std::size_t window,
                                 const EnergyContext& ctx, bool enable_supplement = true) {
  const std::span<const Vec2> pool_window =
      dataset.candidates_near(agent.kind, agent.departure_lane, agent.velocity.norm(), window);

  EnergyBreakdown best_e;
  const int best = detail::argmin_energy(agent, pool_window, neighbors, ctx, &best_e);
  if (best >= 0) {
    const Vec2 v = pool_window[best];
    if (!enable_supplement ||
        acceptable(v, agent.velocity, best_e.guidance_term, best_e.collision_term, thresholds)) {
      return {v, SelectionOrigin::dataset, best_e};
    }
  } else if (!enable_supplement) {
    throw Error("select_velocity: empty candidate pool for agent " + std::to_string(agent.id));
  }

  const std::vector<Vec2> extra = supplement(agent.velocity, supplement_cfg, agent.guidance);
  EnergyBreakdown supp_e;
  const int supp_best = detail::argmin_energy(agent, extra, neighbors, ctx, &supp_e);
  if (supp_best < 0) {
    throw Error("select_velocity: no candidates available for agent " + std::to_string(agent.id));
  }
  return {extra[supp_best], SelectionOrigin::supplement, supp_e};
}

// Applies a selection: velocity, position integration and, for supplementary
// velocities, feedback into the dataset pool.
inline void commit_selection(AgentState& agent, const Selection& sel,
                             CandidateVelocityDataset& dataset, double dt) {
  agent.velocity = sel.velocity;
  agent.position += sel.velocity * dt;
  if (sel.velocity.norm() >= kEps) agent.heading = sel.velocity.normalized();
  if (sel.origin == SelectionOrigin::supplement) {
    dataset.append_velocity(agent.kind, agent.departure_lane, sel.velocity);
  }
}

}  // namespace intersim
