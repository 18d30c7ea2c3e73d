#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "intersim/geometry.hpp"
#include "intersim/trajectory.hpp"
#include "intersim/types.hpp"

namespace intersim {

struct PoolKey {
  AgentKind kind = AgentKind::car;
  std::string lane;

  auto operator<=>(const PoolKey&) const = default;
};

// Per-(kind, departure lane) pools of candidate velocities, each sorted
// ascending by magnitude.
class CandidateVelocityDataset {
 public:
  bool has_pool(AgentKind kind, const std::string& lane) const {
    return pools_.count({kind, lane}) > 0;
  }

  const std::vector<Vec2>& pool(AgentKind kind, const std::string& lane) const {
    auto it = pools_.find({kind, lane});
    if (it == pools_.end()) {
      throw Error("velocity dataset: no pool for kind '" + to_string(kind) + "' lane '" + lane + "'");
    }
    return it->second;
  }

  std::size_t pool_size(AgentKind kind, const std::string& lane) const {
    auto it = pools_.find({kind, lane});
    return it == pools_.end() ? 0 : it->second.size();
  }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& [k, p] : pools_) n += p.size();
    return n;
  }

  std::vector<PoolKey> keys() const {
    std::vector<PoolKey> out;
    out.reserve(pools_.size());
    for (const auto& [k, p] : pools_) out.push_back(k);
    return out;
  }

  // Inserted preserving the magnitude sort; equal magnitudes keep insertion
  // order.
  void append_velocity(AgentKind kind, const std::string& lane, const Vec2& v) {
    if (!v.finite()) throw Error("append_velocity: non-finite velocity");
    auto& pool = pools_[{kind, lane}];
    const double m = v.norm();
    auto it = std::upper_bound(pool.begin(), pool.end(), m,
                               [](double mag, const Vec2& w) { return mag < w.norm(); });
    pool.insert(it, v);
  }

  // The `window` pool entries whose magnitudes are closest to `speed`: a
  // contiguous slice of the sorted pool, ties broken toward smaller magnitude.
  std::span<const Vec2> candidates_near(AgentKind kind, const std::string& lane, double speed,
                                        std::size_t window) const {
    if (window < 1) throw Error("candidates_near: window must be >= 1");
    const auto& p = pool(kind, lane);
    if (p.size() <= window) return {p.data(), p.size()};
    const auto lb = std::lower_bound(p.begin(), p.end(), speed,
                                     [](const Vec2& w, double mag) { return w.norm() < mag; });
    std::size_t lo = static_cast<std::size_t>(lb - p.begin());
    std::size_t hi = lo;
    while (hi - lo < window) {
      if (lo == 0) {
        ++hi;
      } else if (hi == p.size()) {
        --lo;
      } else {
        const double dl = std::abs(p[lo - 1].norm() - speed);
        const double dr = std::abs(p[hi].norm() - speed);
        if (dl <= dr) {
          --lo;
        } else {
          ++hi;
        }
      }
    }
    return {p.data() + lo, window};
  }

  // Bulk path for dataset construction; appends then restores the sort in one
  // pass (stable, so equal magnitudes keep input order).
  void bulk_insert(AgentKind kind, const std::string& lane, std::span<const Vec2> vs) {
    auto& pool = pools_[{kind, lane}];
    for (const auto& v : vs) {
      if (!v.finite()) throw Error("bulk_insert: non-finite velocity");
      pool.push_back(v);
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Vec2& a, const Vec2& b) { return a.norm() < b.norm(); });
  }

  bool sorted() const {
    for (const auto& [k, p] : pools_) {
      for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (p[i].norm() > p[i + 1].norm() + kEps) return false;
      }
    }
    return true;
  }

 private:
  std::map<PoolKey, std::vector<Vec2>> pools_;
};

struct DatasetBuildResult {
  CandidateVelocityDataset dataset;
  std::vector<std::string> rejected;  // trajectory ids without a departure lane
};

// Converts denoised trajectories into per-(kind, lane) velocity pools:
// one velocity per consecutive frame pair, divided by the elapsed time.
inline DatasetBuildResult build_dataset(std::span<const Trajectory> trajectories, double dt) {
  if (dt <= 0.0) throw Error("build_dataset: dt must be positive");
  DatasetBuildResult out;
  for (const auto& traj : trajectories) {
    traj.validate();
    if (!traj.departure_lane || traj.departure_lane->empty()) {
      out.rejected.push_back(traj.agent_id);
      continue;
    }
    std::vector<Vec2> velocities;
    velocities.reserve(traj.samples.size() - 1);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
      const auto& a = traj.samples[i - 1];
      const auto& b = traj.samples[i];
      const double elapsed = static_cast<double>(b.frame - a.frame) * dt;
      velocities.push_back(Vec2{b.x - a.x, b.y - a.y} / elapsed);
    }
    out.dataset.bulk_insert(traj.kind, *traj.departure_lane, velocities);
  }
  return out;
}

}  // namespace intersim
