#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "intersim/geometry.hpp"

namespace intersim {

// Normalized probability masses over fixed-width bins; bin index is
// floor(sample / bin_width).
struct Histogram {
  double bin_width = 1.0;
  std::map<long long, double> mass;

  double total() const {
    double s = 0.0;
    for (const auto& [b, m] : mass) s += m;
    return s;
  }
};

inline Histogram make_histogram(std::span<const double> samples, double bin_width) {
  if (bin_width <= 0.0) throw Error("histogram: bin_width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (samples.empty()) return h;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double s : samples) {
    h.mass[static_cast<long long>(std::floor(s / bin_width))] += w;
  }
  return h;
}

// Sum over the union of bins of |p1 - p2|; 0 for identical histograms, 2 for
// disjoint supports.
inline double distribution_difference(const Histogram& h1, const Histogram& h2) {
  if (std::abs(h1.bin_width - h2.bin_width) > 1e-12) {
    throw Error("distribution_difference: bin widths differ");
  }
  double score = 0.0;
  auto it1 = h1.mass.begin();
  auto it2 = h2.mass.begin();
  while (it1 != h1.mass.end() || it2 != h2.mass.end()) {
    if (it2 == h2.mass.end() || (it1 != h1.mass.end() && it1->first < it2->first)) {
      score += std::abs(it1->second);
      ++it1;
    } else if (it1 == h1.mass.end() || it2->first < it1->first) {
      score += std::abs(it2->second);
      ++it2;
    } else {
      score += std::abs(it1->second - it2->second);
      ++it1;
      ++it2;
    }
  }
  return score;
}

// Signed angle between consecutive velocity directions, in degrees;
// near-zero-speed frames are skipped.
inline std::vector<double> steering_angles_from_velocities(std::span<const Vec2> velocities) {
  std::vector<double> out;
  const Vec2* prev = nullptr;
  for (const auto& v : velocities) {
    if (v.norm() < kEps) continue;
    if (prev) out.push_back(rad_to_deg(signed_angle(*prev, v)));
    prev = &v;
  }
  return out;
}

// Steering angles from an ordered position sequence; empty below 3 positions.
inline std::vector<double> steering_angles(std::span<const Vec2> positions) {
  if (positions.size() < 3) return {};
  std::vector<Vec2> velocities;
  velocities.reserve(positions.size() - 1);
  for (std::size_t i = 1; i < positions.size(); ++i) {
    velocities.push_back(positions[i] - positions[i - 1]);
  }
  return steering_angles_from_velocities(velocities);
}

// Per-agent velocity sequences extracted from a record or trajectory file.
struct MotionData {
  std::map<std::string, std::vector<Vec2>> velocities;

  bool empty() const {
    for (const auto& [id, v] : velocities) {
      if (!v.empty()) return false;
    }
    return true;
  }
};

struct EvaluationReport {
  double velocity_score = 0.0;
  double steering_score = 0.0;
  Histogram velocity_sim, velocity_gt;
  Histogram steering_sim, steering_gt;
};

namespace detail {

inline std::vector<double> speed_samples(const MotionData& m) {
  std::vector<double> out;
  for (const auto& [id, vel] : m.velocities) {
    for (const auto& v : vel) out.push_back(v.norm());
  }
  return out;
}

// Steering angles folded to absolute values for the distribution.
inline std::vector<double> steering_samples(const MotionData& m) {
  std::vector<double> out;
  for (const auto& [id, vel] : m.velocities) {
    for (double a : steering_angles_from_velocities(vel)) out.push_back(std::abs(a));
  }
  return out;
}

}  // namespace detail

// Velocity-magnitude and steering-angle distribution differences between a
// simulation and ground truth.
inline EvaluationReport evaluate(const MotionData& sim, const MotionData& gt, double velocity_bin,
                                 double steering_bin) {
  if (sim.empty()) throw Error("evaluate: simulation record is empty");
  if (gt.empty()) throw Error("evaluate: ground-truth record is empty");
  EvaluationReport r;
  r.velocity_sim = make_histogram(detail::speed_samples(sim), velocity_bin);
  r.velocity_gt = make_histogram(detail::speed_samples(gt), velocity_bin);
  r.steering_sim = make_histogram(detail::steering_samples(sim), steering_bin);
  r.steering_gt = make_histogram(detail::steering_samples(gt), steering_bin);
  r.velocity_score = distribution_difference(r.velocity_sim, r.velocity_gt);
  r.steering_score = distribution_difference(r.steering_sim, r.steering_gt);
  return r;
}

}  // namespace intersim
