#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "intersim/adaptive.hpp"
#include "intersim/energy.hpp"
#include "intersim/scenario.hpp"
#include "intersim/select.hpp"
#include "intersim/spatial_grid.hpp"
#include "intersim/velocity_dataset.hpp"

namespace intersim {

struct SpawnEntry {
  int id = -1;  // unique; assigned from file order when absent
  long tick = 0;
  AgentKind kind = AgentKind::car;
  std::string departure_lane;
  Vec2 goal;
  double desired_normal = 0.0;  // e1
  double desired_fast = 0.0;    // e2
  Planning planning = Planning::straight;
};

struct SpawnSchedule {
  std::vector<SpawnEntry> entries;
};

struct SimConfig {
  std::size_t window = 200;
  bool enable_supplement = true;
  double perception_radius = 20.0;
  double arrival_radius = 0.5;
  IndicatorThresholds thresholds;
  SupplementConfig supplement;
  MaskTable mask = MaskTable::defaults();
  PlanningGaussianTable gaussians;
  double w_g_max_factor = 10.0;
  double dis_cd_floor = 0.5;
  double spawn_jitter = 0.0;  // lateral meters; the engine's only RNG use
  std::array<EnergyWeights, 3> kind_weights{
      EnergyWeights::defaults_for(AgentKind::car),
      EnergyWeights::defaults_for(AgentKind::pedestrian),
      EnergyWeights::defaults_for(AgentKind::bicycle)};
  std::array<double, 3> kind_radius{0.9, 0.25, 0.4};

  const EnergyWeights& weights_for(AgentKind k) const {
    return kind_weights[static_cast<std::size_t>(k)];
  }
  double radius_for(AgentKind k) const { return kind_radius[static_cast<std::size_t>(k)]; }
};

struct RecordRow {
  long tick = 0;
  int agent_id = -1;
  AgentKind kind = AgentKind::car;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  SelectionOrigin origin = SelectionOrigin::dataset;

  bool operator==(const RecordRow&) const = default;
};

struct OverlapEvent {
  long tick = 0;
  int a = -1;
  int b = -1;
  double distance = 0.0;
};

struct SimulationRecord {
  std::vector<RecordRow> rows;
  std::vector<OverlapEvent> overlaps;
  std::vector<double> tick_seconds;
  std::vector<double> interaction_seconds;

  double max_seconds_per_frame() const {
    double m = 0.0;
    for (double s : tick_seconds) m = std::max(m, s);
    return m;
  }
  double avg_seconds_per_frame() const {
    if (tick_seconds.empty()) return 0.0;
    double s = 0.0;
    for (double v : tick_seconds) s += v;
    return s / static_cast<double>(tick_seconds.size());
  }
};

struct Agent {
  AgentState state;
  double dis_ac = 0.0;  // entry-boundary midpoint to goal, fixed at spawn
  long spawn_tick = 0;
};

class World {
 public:
  World(Scenario scenario, CandidateVelocityDataset dataset, SpawnSchedule schedule,
        SimConfig config, std::uint64_t seed)
      : scenario_(std::move(scenario)),
        dataset_(std::move(dataset)),
        config_(std::move(config)),
        rng_(seed),
        seed_(seed),
        grid_(scenario_.grid_cell_size) {
    scenario_.validate();
    config_.thresholds.validate();
    config_.supplement.validate();
    validate_schedule(schedule);
    pending_ = schedule.entries;
    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const SpawnEntry& a, const SpawnEntry& b) {
                       return a.tick != b.tick ? a.tick < b.tick : a.id < b.id;
                     });
  }

  const Scenario& scenario() const { return scenario_; }
  const CandidateVelocityDataset& dataset() const { return dataset_; }
  const SimConfig& config() const { return config_; }
  long tick_index() const { return tick_index_; }
  double sim_time() const { return static_cast<double>(tick_index_) * scenario_.dt(); }
  std::uint64_t seed() const { return seed_; }

  const std::vector<Agent>& agents() const { return agents_; }
  long spawned() const { return spawned_; }
  long arrived() const { return arrived_; }
  std::size_t pending_spawns() const { return pending_.size(); }

  const Agent* find_agent(int id) const {
    for (const auto& a : agents_) {
      if (a.state.id == id) return &a;
    }
    return nullptr;
  }

  EnergyContext energy_context() const {
    EnergyContext ctx;
    ctx.mask = &config_.mask;
    ctx.gaussians = &config_.gaussians;
    ctx.dt = scenario_.dt();
    ctx.perception_radius = config_.perception_radius;
    return ctx;
  }

  // Neighbor states for one agent: grid neighbors within the perception
  // radius, from the given snapshot, plus any stop-line obstacle.
  std::vector<AgentState> gather_neighbors(const AgentState& agent,
                                           std::span<const Agent> snapshot) const {
    std::vector<AgentState> out;
    for (int id : grid_.neighbors_of(agent.id)) {
      const AgentState* n = nullptr;
      for (const auto& s : snapshot) {
        if (s.state.id == id) {
          n = &s.state;
          break;
        }
      }
      if (n && distance(n->position, agent.position) <= config_.perception_radius) {
        out.push_back(*n);
      }
    }
    return out;
  }

  // One simulation step, two-phase: every selection reads the pre-tick
  // snapshot; commits apply in ascending agent id.
  void tick() {
    const auto t_start = std::chrono::steady_clock::now();
    double interaction = 0.0;

    process_spawns();
    rebuild_grid();

    const std::vector<Agent> snapshot = agents_;
    const EnergyContext ctx = energy_context();
    const double dt = scenario_.dt();

    struct Staged {
      std::size_t index;
      Selection selection;
      AgentState prepared;  // guidance / weights / expected speed for records
    };
    std::vector<Staged> staged;
    staged.reserve(snapshot.size());

    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      AgentState work = snapshot[i].state;

      const auto g = guidance_direction(work.position, work.goal, scenario_, work.departure_lane);
      if (g) work.guidance = *g;

      std::vector<AgentState> neighbors = gather_neighbors(work, snapshot);

      const LightDecision light = light_policy(work, scenario_, sim_time());
      work.expected_speed = light.expected_speed;
      if (light.stop_obstacle) {
        neighbors.push_back(make_stop_line_obstacle(work, *light.stop_obstacle));
      }

      const auto t_sel = std::chrono::steady_clock::now();
      const double e_temp = short_term_influence(work, neighbors, ctx);
      work.weights = adjust_velocity_weights(work.weights, e_temp);
      if (light.boost_expected_weight) work.weights.w_e = 2.0 * work.weights.w_e_init;
      work.weights.w_g = adjust_guidance_weight(
          work.weights.w_g_init, snapshot[i].dis_ac, distance(work.position, work.goal),
          in_central_area(scenario_, work.position),
          config_.w_g_max_factor * work.weights.w_g_init, config_.dis_cd_floor);

      Selection sel = select_velocity(work, neighbors, dataset_, config_.thresholds,
                                      config_.supplement, config_.window, ctx,
                                      config_.enable_supplement);
      interaction += std::chrono::duration<double>(std::chrono::steady_clock::now() - t_sel).count();

      staged.push_back({i, std::move(sel), std::move(work)});
    }

    // Commit phase, ascending agent id (snapshot order).
    std::vector<int> despawn;
    for (const auto& s : staged) {
      Agent& agent = agents_[s.index];
      agent.state.guidance = s.prepared.guidance;
      agent.state.weights = s.prepared.weights;
      agent.state.expected_speed = s.prepared.expected_speed;
      commit_selection(agent.state, s.selection, dataset_, dt);
      record_.rows.push_back({tick_index_, agent.state.id, agent.state.kind,
                              agent.state.position.x, agent.state.position.y,
                              agent.state.velocity.x, agent.state.velocity.y,
                              s.selection.origin});
      if (distance(agent.state.position, agent.state.goal) <= config_.arrival_radius) {
        despawn.push_back(agent.state.id);
      }
    }
    for (int id : despawn) {
      agents_.erase(std::find_if(agents_.begin(), agents_.end(),
                                 [id](const Agent& a) { return a.state.id == id; }));
      ++arrived_;
    }

    rebuild_grid();
    for (const auto& ev : detect_overlaps()) record_.overlaps.push_back(ev);

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    record_.tick_seconds.push_back(elapsed);
    record_.interaction_seconds.push_back(interaction);
    ++tick_index_;
  }

  // All pairs closer than the sum of their radii, via the grid; ascending
  // (a, b) with a < b.
  std::vector<OverlapEvent> detect_overlaps() const {
    std::vector<OverlapEvent> out;
    for (const auto& agent : agents_) {
      for (int other : grid_.neighbors_of(agent.state.id)) {
        if (other <= agent.state.id) continue;
        const Agent* o = find_agent(other);
        const double d = distance(agent.state.position, o->state.position);
        if (d < agent.state.radius + o->state.radius) {
          out.push_back({tick_index_, agent.state.id, other, d});
        }
      }
    }
    return out;
  }

  SimulationRecord run(long ticks) {
    for (long i = 0; i < ticks; ++i) tick();
    SimulationRecord out = std::move(record_);
    record_ = {};
    return out;
  }

 private:
  void validate_schedule(const SpawnSchedule& schedule) {
    std::vector<std::string> problems;
    std::set<int> ids;
    for (const auto& e : schedule.entries) {
      const std::string tag = "spawn entry id " + std::to_string(e.id);
      if (!ids.insert(e.id).second) problems.push_back(tag + ": duplicate id");
      if (e.tick < 0) problems.push_back(tag + ": negative tick");
      const Lane* lane = scenario_.find_lane(e.departure_lane);
      if (!lane) {
        problems.push_back(tag + ": unknown lane '" + e.departure_lane + "'");
      } else if (!lane->allowed_kinds.empty() && !lane->allowed_kinds.count(e.kind)) {
        problems.push_back(tag + ": kind " + to_string(e.kind) + " not allowed in lane '" +
                           e.departure_lane + "'");
      }
      if (!e.goal.finite()) problems.push_back(tag + ": non-finite goal");
      if (!(e.desired_normal > 0.0) || e.desired_fast < e.desired_normal) {
        problems.push_back(tag + ": need 0 < e1 <= e2");
      }
      if (!dataset_.has_pool(e.kind, e.departure_lane)) {
        problems.push_back(tag + ": no velocity pool for (" + to_string(e.kind) + ", '" +
                           e.departure_lane + "')");
      }
    }
    if (!problems.empty()) {
      std::string msg = "invalid spawn schedule:";
      for (const auto& p : problems) msg += "\n  " + p;
      throw Error(msg);
    }
  }

  void process_spawns() {
    std::vector<SpawnEntry> still_pending;
    still_pending.reserve(pending_.size());
    for (const auto& e : pending_) {
      if (e.tick > tick_index_) {
        still_pending.push_back(e);
        continue;
      }
      const Lane& lane = *scenario_.find_lane(e.departure_lane);
      Vec2 pos = lane.centerline.front();
      if (config_.spawn_jitter > 0.0) {
        std::uniform_real_distribution<double> dist(-config_.spawn_jitter, config_.spawn_jitter);
        const Vec2 lateral{-lane.direction.y, lane.direction.x};
        pos += lateral * dist(rng_);
      }
      const double radius = config_.radius_for(e.kind);
      bool blocked = false;
      for (const auto& a : agents_) {
        if (distance(a.state.position, pos) < a.state.radius + radius + 0.5) {
          blocked = true;
          break;
        }
      }
      if (blocked) {
        still_pending.push_back(e);
        continue;
      }

      Agent agent;
      agent.state.id = e.id;
      agent.state.kind = e.kind;
      agent.state.position = pos;
      agent.state.velocity = lane.direction * e.desired_normal;
      agent.state.heading = lane.direction;
      agent.state.guidance = lane.direction;
      agent.state.expected_speed = e.desired_normal;
      agent.state.desired_normal = e.desired_normal;
      agent.state.desired_fast = e.desired_fast;
      agent.state.planning = e.planning;
      agent.state.departure_lane = e.departure_lane;
      agent.state.goal = e.goal;
      agent.state.radius = radius;
      agent.state.weights = config_.weights_for(e.kind);
      agent.dis_ac = distance(lane.entry_boundary_midpoint, e.goal);
      agent.spawn_tick = tick_index_;

      const auto it = std::lower_bound(
          agents_.begin(), agents_.end(), agent.state.id,
          [](const Agent& a, int id) { return a.state.id < id; });
      agents_.insert(it, std::move(agent));
      ++spawned_;
    }
    pending_ = std::move(still_pending);
  }

  void rebuild_grid() {
    std::vector<std::pair<int, Vec2>> positions;
    positions.reserve(agents_.size());
    for (const auto& a : agents_) positions.emplace_back(a.state.id, a.state.position);
    grid_.rebuild(positions);
  }

  Scenario scenario_;
  CandidateVelocityDataset dataset_;
  SimConfig config_;
  std::mt19937_64 rng_;
  std::uint64_t seed_ = 0;
  SpatialGrid grid_;
  std::vector<Agent> agents_;  // ascending by id
  std::vector<SpawnEntry> pending_;
  long tick_index_ = 0;
  long spawned_ = 0;
  long arrived_ = 0;
  SimulationRecord record_;
};

// Empty world at tick 0 with the RNG seeded; all schedule cross-references
// validated up front.
inline World init_simulation(Scenario scenario, CandidateVelocityDataset dataset,
                             SpawnSchedule schedule, SimConfig config, std::uint64_t seed) {
  return World(std::move(scenario), std::move(dataset), std::move(schedule), std::move(config),
               seed);
}

}  // namespace intersim
