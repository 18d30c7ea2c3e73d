#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "intersim/engine.hpp"
#include "intersim/metrics.hpp"
#include "intersim/scenario.hpp"
#include "intersim/trajectory.hpp"
#include "intersim/velocity_dataset.hpp"

namespace intersim {

namespace io_detail {

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw Error("");
    return v;
  } catch (...) {
    throw Error("failed to parse " + what + " from '" + s + "'");
  }
}

inline long to_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw Error("");
    return v;
  } catch (...) {
    throw Error("failed to parse " + what + " from '" + s + "'");
  }
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

inline Vec2 to_vec2(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw Error(what + " must be a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Trajectory CSV: agent_id,kind,frame,x,y,departure_lane

inline void write_trajectories(const std::string& path, std::span<const Trajectory> trajectories) {
  auto out = io_detail::open_out(path);
  out << "agent_id,kind,frame,x,y,departure_lane\n";
  for (const auto& t : trajectories) {
    const std::string lane = t.departure_lane.value_or("");
    for (const auto& s : t.samples) {
      out << t.agent_id << ',' << to_string(t.kind) << ',' << s.frame << ','
          << io_detail::fmt9(s.x) << ',' << io_detail::fmt9(s.y) << ',' << lane << '\n';
    }
  }
}

inline std::vector<Trajectory> read_trajectories(const std::string& path) {
  auto in = io_detail::open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "': empty trajectory file");
  if (io_detail::split_csv(line) !=
      std::vector<std::string>{"agent_id", "kind", "frame", "x", "y", "departure_lane"}) {
    throw Error("'" + path + "': unexpected trajectory header '" + line + "'");
  }
  std::vector<Trajectory> out;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = io_detail::split_csv(line);
    if (f.size() != 6) throw Error("'" + path + "': bad trajectory row '" + line + "'");
    auto [it, inserted] = index.try_emplace(f[0], out.size());
    if (inserted) {
      Trajectory t;
      t.agent_id = f[0];
      t.kind = parse_agent_kind(f[1]);
      if (!f[5].empty()) t.departure_lane = f[5];
      out.push_back(std::move(t));
    }
    out[it->second].samples.push_back({io_detail::to_long(f[2], "frame"),
                                       io_detail::to_double(f[3], "x"),
                                       io_detail::to_double(f[4], "y")});
  }
  for (auto& t : out) t.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Dataset CSV: kind,lane,vx,vy with 9 significant digits.

inline void write_dataset(const std::string& path, const CandidateVelocityDataset& ds) {
  auto out = io_detail::open_out(path);
  out << "kind,lane,vx,vy\n";
  for (const auto& key : ds.keys()) {
    for (const auto& v : ds.pool(key.kind, key.lane)) {
      out << to_string(key.kind) << ',' << key.lane << ',' << io_detail::fmt9(v.x) << ','
          << io_detail::fmt9(v.y) << '\n';
    }
  }
}

inline CandidateVelocityDataset read_dataset(const std::string& path) {
  auto in = io_detail::open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "': empty dataset file");
  if (io_detail::split_csv(line) != std::vector<std::string>{"kind", "lane", "vx", "vy"}) {
    throw Error("'" + path + "': unexpected dataset header '" + line + "'");
  }
  CandidateVelocityDataset ds;
  std::map<PoolKey, std::vector<Vec2>> staged;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = io_detail::split_csv(line);
    if (f.size() != 4) throw Error("'" + path + "': bad dataset row '" + line + "'");
    staged[{parse_agent_kind(f[0]), f[1]}].push_back(
        {io_detail::to_double(f[2], "vx"), io_detail::to_double(f[3], "vy")});
  }
  for (const auto& [key, vs] : staged) ds.bulk_insert(key.kind, key.lane, vs);
  return ds;
}

// ---------------------------------------------------------------------------
// Scenario JSON.

struct ScenarioFile {
  Scenario scenario;
  SimConfig config;
};

namespace io_detail {

inline void apply_weight_overrides(EnergyWeights& w, const nlohmann::json& j) {
  if (j.contains("w_dir")) w.w_dir_init = j["w_dir"].get<double>();
  if (j.contains("w_m")) w.w_m_init = j["w_m"].get<double>();
  if (j.contains("w_e")) w.w_e_init = j["w_e"].get<double>();
  if (j.contains("w_g")) w.w_g_init = j["w_g"].get<double>();
  if (j.contains("w_v")) w.w_v_init = j["w_v"].get<double>();
  if (j.contains("w_c")) w.w_c_init = j["w_c"].get<double>();
  if (j.contains("lambda_dir")) w.lambda_dir = j["lambda_dir"].get<double>();
  if (j.contains("lambda_m")) w.lambda_m = j["lambda_m"].get<double>();
  if (j.contains("lambda_e")) w.lambda_e = j["lambda_e"].get<double>();
  if (j.contains("d_s")) w.d_s = j["d_s"].get<double>();
  if (j.contains("t_steps")) w.t_steps = j["t_steps"].get<int>();
  w.reset_to_initials();
}

inline void apply_gaussian_overrides(GaussianPiece& p, const nlohmann::json& j) {
  if (j.contains("sigma1_sq")) p.sigma1_sq = j["sigma1_sq"].get<double>();
  if (j.contains("sigma2_sq")) p.sigma2_sq = j["sigma2_sq"].get<double>();
  if (j.contains("lo_deg")) p.lo_deg = j["lo_deg"].get<double>();
  if (j.contains("hi_deg")) p.hi_deg = j["hi_deg"].get<double>();
}

inline void apply_params(SimConfig& cfg, const nlohmann::json& p) {
  if (p.contains("window")) cfg.window = p["window"].get<std::size_t>();
  if (p.contains("enable_supplement")) cfg.enable_supplement = p["enable_supplement"].get<bool>();
  if (p.contains("perception_radius")) cfg.perception_radius = p["perception_radius"].get<double>();
  if (p.contains("arrival_radius")) cfg.arrival_radius = p["arrival_radius"].get<double>();
  if (p.contains("w_g_max_factor")) cfg.w_g_max_factor = p["w_g_max_factor"].get<double>();
  if (p.contains("dis_cd_floor")) cfg.dis_cd_floor = p["dis_cd_floor"].get<double>();
  if (p.contains("spawn_jitter")) cfg.spawn_jitter = p["spawn_jitter"].get<double>();
  if (p.contains("thresholds")) {
    const auto& t = p["thresholds"];
    if (t.contains("tau_m")) cfg.thresholds.tau_m = t["tau_m"].get<double>();
    if (t.contains("tau_dir")) cfg.thresholds.tau_dir = t["tau_dir"].get<double>();
    if (t.contains("tau_g")) cfg.thresholds.tau_g = t["tau_g"].get<double>();
    if (t.contains("tau_c")) cfg.thresholds.tau_c = t["tau_c"].get<double>();
  }
  if (p.contains("supplement")) {
    const auto& s = p["supplement"];
    if (s.contains("psi_m")) cfg.supplement.psi_m = s["psi_m"].get<double>();
    if (s.contains("i_m")) cfg.supplement.i_m = s["i_m"].get<double>();
    if (s.contains("psi_d")) cfg.supplement.psi_d = s["psi_d"].get<double>();
    if (s.contains("i_d")) cfg.supplement.i_d = s["i_d"].get<double>();
  }
  if (p.contains("weights")) {
    for (const auto& [name, over] : p["weights"].items()) {
      apply_weight_overrides(cfg.kind_weights[static_cast<std::size_t>(parse_agent_kind(name))],
                             over);
    }
  }
  if (p.contains("radius")) {
    for (const auto& [name, r] : p["radius"].items()) {
      cfg.kind_radius[static_cast<std::size_t>(parse_agent_kind(name))] = r.get<double>();
    }
  }
  if (p.contains("mask_table")) {
    for (const auto& e : p["mask_table"]) {
      cfg.mask.set(parse_planning(e.at("i").get<std::string>()),
                   parse_planning(e.at("phi").get<std::string>()),
                   parse_mask_sector(e.at("sector").get<std::string>()),
                   e.at("value").get<double>());
    }
  }
  if (p.contains("gaussians")) {
    const auto& g = p["gaussians"];
    if (g.contains("vehicle_straight")) {
      apply_gaussian_overrides(cfg.gaussians.vehicle_straight, g["vehicle_straight"]);
    }
    if (g.contains("vehicle_turn")) apply_gaussian_overrides(cfg.gaussians.vehicle_turn, g["vehicle_turn"]);
    if (g.contains("pedestrian")) apply_gaussian_overrides(cfg.gaussians.pedestrian, g["pedestrian"]);
  }
}

inline void parse_scenario_json(const nlohmann::json& j, ScenarioFile& out) {
  Scenario& sc = out.scenario;
  sc.frame_rate = j.at("frame_rate").get<double>();
  sc.grid_cell_size = j.value("grid_cell_size", 10.0);
  for (const auto& v : j.at("central_area")) {
    sc.central_area.push_back(io_detail::to_vec2(v, "central_area vertex"));
  }
  for (const auto& lj : j.at("lanes")) {
    Lane lane;
    lane.id = lj.at("id").get<std::string>();
    for (const auto& p : lj.at("centerline")) {
      lane.centerline.push_back(io_detail::to_vec2(p, "centerline point"));
    }
    lane.width = lj.value("width", 3.5);
    lane.direction = io_detail::to_vec2(lj.at("direction"), "lane direction");
    lane.entry_boundary_midpoint =
        io_detail::to_vec2(lj.at("entry_boundary_midpoint"), "entry boundary midpoint");
    if (lj.contains("allowed_kinds")) {
      for (const auto& k : lj["allowed_kinds"]) {
        lane.allowed_kinds.insert(parse_agent_kind(k.get<std::string>()));
      }
    }
    sc.lanes.push_back(std::move(lane));
  }
  if (j.contains("lights")) {
    for (const auto& tj : j["lights"]) {
      TrafficLight light;
      const auto& seg = tj.at("stop_line");
      if (!seg.is_array() || seg.size() != 2) throw Error("stop_line must be two points");
      light.stop_line_a = io_detail::to_vec2(seg[0], "stop line endpoint");
      light.stop_line_b = io_detail::to_vec2(seg[1], "stop line endpoint");
      for (const auto& ph : tj.at("phases")) {
        if (!ph.is_array() || ph.size() != 2) throw Error("phase must be [color, seconds]");
        light.phases.push_back(
            {parse_light_color(ph[0].get<std::string>()), ph[1].get<double>()});
      }
      for (const auto& id : tj.at("applies_to")) {
        light.applies_to.insert(id.get<std::string>());
      }
      sc.lights.push_back(std::move(light));
    }
  }
  sc.validate();
  if (j.contains("params")) apply_params(out.config, j["params"]);
}

inline nlohmann::json parse_json_file(const std::string& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("'" + path + "': invalid JSON: " + e.what());
  }
  return j;
}

}  // namespace io_detail

inline ScenarioFile load_scenario(const std::string& path) {
  const nlohmann::json j = io_detail::parse_json_file(path);
  ScenarioFile out;
  try {
    io_detail::parse_scenario_json(j, out);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("'" + path + "': " + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spawn schedule JSON.

inline SpawnSchedule load_schedule(const std::string& path) {
  const nlohmann::json j = io_detail::parse_json_file(path);
  SpawnSchedule out;
  try {
    int next_id = 0;
    for (const auto& a : j.at("agents")) {
      SpawnEntry e;
      e.id = a.value("id", next_id);
      next_id = std::max(next_id, e.id) + 1;
      e.tick = a.at("tick").get<long>();
      e.kind = parse_agent_kind(a.at("kind").get<std::string>());
      e.departure_lane = a.at("lane").get<std::string>();
      e.goal = io_detail::to_vec2(a.at("goal"), "goal");
      e.desired_normal = a.at("e1").get<double>();
      e.desired_fast = a.at("e2").get<double>();
      e.planning = parse_planning(a.at("planning").get<std::string>());
      out.entries.push_back(std::move(e));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("'" + path + "': " + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simulation record CSV: tick,agent_id,kind,x,y,vx,vy,origin plus a summary
// footer; overlap events are carried as comment lines.

inline void write_record(const std::string& path, const SimulationRecord& record) {
  auto out = io_detail::open_out(path);
  out << "tick,agent_id,kind,x,y,vx,vy,origin\n";
  for (const auto& r : record.rows) {
    out << r.tick << ',' << r.agent_id << ',' << to_string(r.kind) << ','
        << io_detail::fmt9(r.x) << ',' << io_detail::fmt9(r.y) << ',' << io_detail::fmt9(r.vx)
        << ',' << io_detail::fmt9(r.vy) << ','
        << (r.origin == SelectionOrigin::dataset ? "dataset" : "supplement") << '\n';
  }
  for (const auto& ev : record.overlaps) {
    out << "# overlap," << ev.tick << ',' << ev.a << ',' << ev.b << ','
        << io_detail::fmt9(ev.distance) << '\n';
  }
  out << "# max_seconds_per_frame," << io_detail::fmt9(record.max_seconds_per_frame()) << '\n';
  out << "# avg_seconds_per_frame," << io_detail::fmt9(record.avg_seconds_per_frame()) << '\n';
}

struct LoadedRecord {
  std::vector<RecordRow> rows;
  std::vector<OverlapEvent> overlaps;
  double max_seconds_per_frame = 0.0;
  double avg_seconds_per_frame = 0.0;
};

inline LoadedRecord read_record(const std::string& path) {
  auto in = io_detail::open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "': empty record file");
  if (io_detail::split_csv(line) != std::vector<std::string>{"tick", "agent_id", "kind", "x", "y",
                                                             "vx", "vy", "origin"}) {
    throw Error("'" + path + "': unexpected record header '" + line + "'");
  }
  LoadedRecord out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto f = io_detail::split_csv(line);
      if (f[0] == "# overlap" && f.size() == 5) {
        out.overlaps.push_back({io_detail::to_long(f[1], "tick"),
                                static_cast<int>(io_detail::to_long(f[2], "agent")),
                                static_cast<int>(io_detail::to_long(f[3], "agent")),
                                io_detail::to_double(f[4], "distance")});
      } else if (f[0] == "# max_seconds_per_frame" && f.size() == 2) {
        out.max_seconds_per_frame = io_detail::to_double(f[1], "max seconds per frame");
      } else if (f[0] == "# avg_seconds_per_frame" && f.size() == 2) {
        out.avg_seconds_per_frame = io_detail::to_double(f[1], "avg seconds per frame");
      }
      continue;
    }
    const auto f = io_detail::split_csv(line);
    if (f.size() != 8) throw Error("'" + path + "': bad record row '" + line + "'");
    RecordRow r;
    r.tick = io_detail::to_long(f[0], "tick");
    r.agent_id = static_cast<int>(io_detail::to_long(f[1], "agent_id"));
    r.kind = parse_agent_kind(f[2]);
    r.x = io_detail::to_double(f[3], "x");
    r.y = io_detail::to_double(f[4], "y");
    r.vx = io_detail::to_double(f[5], "vx");
    r.vy = io_detail::to_double(f[6], "vy");
    if (f[7] == "dataset") {
      r.origin = SelectionOrigin::dataset;
    } else if (f[7] == "supplement") {
      r.origin = SelectionOrigin::supplement;
    } else {
      throw Error("'" + path + "': unknown origin '" + f[7] + "'");
    }
    out.rows.push_back(r);
  }
  return out;
}

inline void write_timings(const std::string& path, const SimulationRecord& record) {
  auto out = io_detail::open_out(path);
  out << "tick,seconds,interaction_seconds\n";
  for (std::size_t i = 0; i < record.tick_seconds.size(); ++i) {
    const double inter =
        i < record.interaction_seconds.size() ? record.interaction_seconds[i] : 0.0;
    out << i << ',' << io_detail::fmt9(record.tick_seconds[i]) << ',' << io_detail::fmt9(inter)
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Motion extraction for the evaluation metrics.

inline MotionData motion_from_record(const LoadedRecord& record) {
  MotionData m;
  for (const auto& r : record.rows) {
    m.velocities[std::to_string(r.agent_id)].push_back({r.vx, r.vy});
  }
  return m;
}

inline MotionData motion_from_trajectories(std::span<const Trajectory> trajectories, double fps) {
  if (fps <= 0.0) throw Error("motion_from_trajectories: fps must be positive");
  MotionData m;
  for (const auto& t : trajectories) {
    auto& vel = m.velocities[t.agent_id];
    for (std::size_t i = 1; i < t.samples.size(); ++i) {
      const auto& a = t.samples[i - 1];
      const auto& b = t.samples[i];
      const double elapsed = static_cast<double>(b.frame - a.frame) / fps;
      vel.push_back(Vec2{b.x - a.x, b.y - a.y} / elapsed);
    }
  }
  return m;
}

// A file is a record when it carries the record header, otherwise it is read
// as a trajectory file.
inline MotionData load_motion(const std::string& path, double fps) {
  auto in = io_detail::open_in(path);
  std::string header;
  std::getline(in, header);
  in.close();
  if (io_detail::split_csv(header) == std::vector<std::string>{"tick", "agent_id", "kind", "x",
                                                               "y", "vx", "vy", "origin"}) {
    return motion_from_record(read_record(path));
  }
  const auto trajectories = read_trajectories(path);
  return motion_from_trajectories(trajectories, fps);
}

// ---------------------------------------------------------------------------
// Evaluation report.

inline void write_report(std::ostream& out, const EvaluationReport& r) {
  out << "metric,value\n";
  out << "velocity_difference," << io_detail::fmt9(r.velocity_score) << '\n';
  out << "steering_angle_difference," << io_detail::fmt9(r.steering_score) << '\n';
  auto table = [&out](const char* name, const Histogram& h) {
    for (const auto& [bin, mass] : h.mass) {
      out << "histogram," << name << ',' << bin << ','
          << io_detail::fmt9(static_cast<double>(bin) * h.bin_width) << ','
          << io_detail::fmt9(mass) << '\n';
    }
  };
  table("velocity_sim", r.velocity_sim);
  table("velocity_gt", r.velocity_gt);
  table("steering_sim", r.steering_sim);
  table("steering_gt", r.steering_gt);
}

}  // namespace intersim
