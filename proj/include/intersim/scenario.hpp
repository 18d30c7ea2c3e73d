#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intersim/geometry.hpp"
#include "intersim/types.hpp"

namespace intersim {

struct Lane {
  std::string id;
  std::vector<Vec2> centerline;  // ordered in travel direction, meters
  double width = 3.5;
  Vec2 direction;  // unit travel direction
  Vec2 entry_boundary_midpoint;  // where the lane meets the central area
  std::set<AgentKind> allowed_kinds;

  void validate() const {
    if (centerline.size() < 2) throw Error("lane '" + id + "': centerline needs >= 2 points");
    for (std::size_t i = 0; i + 1 < centerline.size(); ++i) {
      if (distance(centerline[i], centerline[i + 1]) < kEps) {
        throw Error("lane '" + id + "': consecutive centerline points coincide");
      }
    }
    if (width <= 0.0) throw Error("lane '" + id + "': width must be positive");
    if (std::abs(direction.norm() - 1.0) >= 1e-9) {
      throw Error("lane '" + id + "': direction must be a unit vector");
    }
  }

  bool contains(const Vec2& p) const {
    return distance_to_polyline(centerline, p) <= width * 0.5;
  }
};

struct LightPhase {
  LightColor color = LightColor::green;
  double duration = 0.0;  // seconds
};

struct TrafficLight {
  Vec2 stop_line_a;
  Vec2 stop_line_b;
  std::vector<LightPhase> phases;
  std::set<std::string> applies_to;  // lane ids

  void validate() const {
    if (phases.empty()) throw Error("traffic light: phase list is empty");
    for (const auto& ph : phases) {
      if (ph.duration <= 0.0) throw Error("traffic light: phase duration must be positive");
    }
    if (distance(stop_line_a, stop_line_b) < kEps) {
      throw Error("traffic light: stop line endpoints coincide");
    }
  }

  double cycle_length() const {
    double total = 0.0;
    for (const auto& ph : phases) total += ph.duration;
    return total;
  }
};

struct Scenario {
  std::vector<Lane> lanes;
  std::vector<TrafficLight> lights;
  std::vector<Vec2> central_area;  // convex polygon
  double grid_cell_size = 10.0;
  double frame_rate = 30.0;  // frames per second

  double dt() const { return 1.0 / frame_rate; }

  void validate() const {
    for (const auto& lane : lanes) lane.validate();
    for (const auto& light : lights) {
      light.validate();
      for (const auto& id : light.applies_to) {
        if (!find_lane(id)) throw Error("traffic light references unknown lane '" + id + "'");
      }
    }
    if (central_area.size() < 3) throw Error("central_area needs >= 3 vertices");
    if (std::abs(polygon_signed_area(central_area)) < kEps) {
      throw Error("central_area polygon is degenerate");
    }
    if (grid_cell_size <= 0.0) throw Error("grid_cell_size must be positive");
    if (frame_rate <= 0.0) throw Error("frame_rate must be positive");
  }

  const Lane* find_lane(const std::string& id) const {
    for (const auto& lane : lanes) {
      if (lane.id == id) return &lane;
    }
    return nullptr;
  }

  const TrafficLight* light_for_lane(const std::string& lane_id) const {
    for (const auto& light : lights) {
      if (light.applies_to.count(lane_id)) return &light;
    }
    return nullptr;
  }

  // Lane whose corridor contains p; the preferred lane wins when it matches,
  // otherwise the nearest-centerline match.
  const Lane* lane_containing(const Vec2& p, const std::string& preferred = "") const {
    if (!preferred.empty()) {
      const Lane* pref = find_lane(preferred);
      if (pref && pref->contains(p)) return pref;
    }
    const Lane* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& lane : lanes) {
      if (!lane.contains(p)) continue;
      const double d = distance_to_polyline(lane.centerline, p);
      if (d < best_dist) {
        best_dist = d;
        best = &lane;
      }
    }
    return best;
  }
};

inline bool in_central_area(const Scenario& s, const Vec2& p) {
  return point_in_convex_polygon(s.central_area, p);
}

// Color of the phase containing (t mod cycle length).
inline LightColor light_color_at(const TrafficLight& light, double t) {
  const double cycle = light.cycle_length();
  double tm = std::fmod(t, cycle);
  if (tm < 0.0) tm += cycle;
  double acc = 0.0;
  for (const auto& ph : light.phases) {
    acc += ph.duration;
    if (tm < acc) return ph.color;
  }
  return light.phases.back().color;
}

// Seconds until the current phase ends.
inline double seconds_remaining(const TrafficLight& light, double t) {
  const double cycle = light.cycle_length();
  double tm = std::fmod(t, cycle);
  if (tm < 0.0) tm += cycle;
  double acc = 0.0;
  for (const auto& ph : light.phases) {
    acc += ph.duration;
    if (tm < acc) return acc - tm;
  }
  return 0.0;
}

}  // namespace intersim
