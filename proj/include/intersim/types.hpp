#pragma once

#include <string>
#include <string_view>

#include "intersim/error.hpp"

namespace intersim {

enum class AgentKind { car = 0, pedestrian = 1, bicycle = 2 };
enum class Planning { straight = 0, turn_left = 1, turn_right = 2 };
enum class LightColor { red, yellow, green };

inline std::string to_string(AgentKind k) {
  switch (k) {
    case AgentKind::car: return "car";
    case AgentKind::pedestrian: return "pedestrian";
    case AgentKind::bicycle: return "bicycle";
  }
  return "car";
}

inline AgentKind parse_agent_kind(std::string_view s) {
  if (s == "car") return AgentKind::car;
  if (s == "pedestrian") return AgentKind::pedestrian;
  if (s == "bicycle") return AgentKind::bicycle;
  throw Error("unknown agent kind: '" + std::string(s) + "'");
}

inline std::string to_string(Planning p) {
  switch (p) {
    case Planning::straight: return "straight";
    case Planning::turn_left: return "turn_left";
    case Planning::turn_right: return "turn_right";
  }
  return "straight";
}

inline Planning parse_planning(std::string_view s) {
  if (s == "straight") return Planning::straight;
  if (s == "turn_left") return Planning::turn_left;
  if (s == "turn_right") return Planning::turn_right;
  throw Error("unknown planning: '" + std::string(s) + "'");
}

inline std::string to_string(LightColor c) {
  switch (c) {
    case LightColor::red: return "red";
    case LightColor::yellow: return "yellow";
    case LightColor::green: return "green";
  }
  return "red";
}

inline LightColor parse_light_color(std::string_view s) {
  if (s == "red") return LightColor::red;
  if (s == "yellow") return LightColor::yellow;
  if (s == "green") return LightColor::green;
  throw Error("unknown light color: '" + std::string(s) + "'");
}

}  // namespace intersim
