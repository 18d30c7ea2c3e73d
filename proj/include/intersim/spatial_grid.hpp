#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "intersim/geometry.hpp"

namespace intersim {

// Uniform grid over agent positions; each agent lives in exactly one cell.
// Rebuilt once per tick by the engine, queried read-only during the tick.
class SpatialGrid {
 public:
  explicit SpatialGrid(double cell_size) : cell_size_(cell_size) {
    if (cell_size <= 0.0) throw Error("SpatialGrid: cell_size must be positive");
  }

  void clear() {
    cells_.clear();
    where_.clear();
  }

  void insert(int id, const Vec2& p) {
    if (where_.count(id)) throw Error("SpatialGrid: duplicate insert of agent " + std::to_string(id));
    const std::int64_t key = cell_key(p);
    cells_[key].push_back(id);
    where_[id] = key;
  }

  void remove(int id) {
    auto it = where_.find(id);
    if (it == where_.end()) throw Error("SpatialGrid: remove of unknown agent " + std::to_string(id));
    auto& bucket = cells_[it->second];
    bucket.erase(std::find(bucket.begin(), bucket.end(), id));
    if (bucket.empty()) cells_.erase(it->second);
    where_.erase(it);
  }

  // Incremental move; equivalent to remove + insert.
  void update(int id, const Vec2& p) {
    auto it = where_.find(id);
    if (it == where_.end()) throw Error("SpatialGrid: update of unknown agent " + std::to_string(id));
    const std::int64_t key = cell_key(p);
    if (key == it->second) return;
    auto& bucket = cells_[it->second];
    bucket.erase(std::find(bucket.begin(), bucket.end(), id));
    if (bucket.empty()) cells_.erase(it->second);
    cells_[key].push_back(id);
    it->second = key;
  }

  void rebuild(std::span<const std::pair<int, Vec2>> positions) {
    clear();
    for (const auto& [id, p] : positions) insert(id, p);
  }

  // All agents in the agent's cell and the 8 adjacent cells, excluding the
  // agent itself, ascending by id.
  std::vector<int> neighbors_of(int id) const {
    auto it = where_.find(id);
    if (it == where_.end()) throw Error("SpatialGrid: neighbors_of unknown agent " + std::to_string(id));
    const auto [cx, cy] = unpack(it->second);
    std::vector<int> out;
    for (std::int32_t dx = -1; dx <= 1; ++dx) {
      for (std::int32_t dy = -1; dy <= 1; ++dy) {
        auto cit = cells_.find(pack(cx + dx, cy + dy));
        if (cit == cells_.end()) continue;
        for (int other : cit->second) {
          if (other != id) out.push_back(other);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::int64_t cell_key(const Vec2& p) const {
    return pack(static_cast<std::int32_t>(std::floor(p.x / cell_size_)),
                static_cast<std::int32_t>(std::floor(p.y / cell_size_)));
  }

  std::size_t size() const { return where_.size(); }
  double cell_size() const { return cell_size_; }

  // Cell assignment per agent, for invariant checks.
  const std::unordered_map<int, std::int64_t>& assignment() const { return where_; }

 private:
  static std::int64_t pack(std::int32_t cx, std::int32_t cy) {
    return (static_cast<std::int64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::int64_t>(static_cast<std::uint32_t>(cy));
  }
  static std::pair<std::int32_t, std::int32_t> unpack(std::int64_t key) {
    return {static_cast<std::int32_t>(static_cast<std::uint64_t>(key) >> 32),
            static_cast<std::int32_t>(key & 0xffffffff)};
  }

  double cell_size_;
  std::unordered_map<std::int64_t, std::vector<int>> cells_;
  std::unordered_map<int, std::int64_t> where_;
};

}  // namespace intersim
