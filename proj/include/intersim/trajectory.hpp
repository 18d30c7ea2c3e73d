#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "intersim/geometry.hpp"
#include "intersim/types.hpp"

namespace intersim {

struct TrajectorySample {
  long frame = 0;
  double x = 0.0;
  double y = 0.0;
};

// Ordered frame-stamped positions of one real-world agent, raw or denoised.
struct Trajectory {
  std::string agent_id;
  AgentKind kind = AgentKind::car;
  std::vector<TrajectorySample> samples;
  std::optional<std::string> departure_lane;

  void validate() const {
    if (samples.size() < 2) throw Error("trajectory '" + agent_id + "': needs >= 2 samples");
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      if (samples[i + 1].frame <= samples[i].frame) {
        throw Error("trajectory '" + agent_id + "': frames must be strictly increasing");
      }
    }
    for (const auto& s : samples) {
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
        throw Error("trajectory '" + agent_id + "': non-finite sample");
      }
    }
  }

  std::vector<Vec2> positions() const {
    std::vector<Vec2> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({s.x, s.y});
    return out;
  }

  std::vector<double> xs() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.x);
    return out;
  }

  std::vector<double> ys() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.y);
    return out;
  }
};

}  // namespace intersim
