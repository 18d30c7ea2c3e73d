#include "intersim/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace intersim {
namespace {

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "intersim_io_test";
    std::filesystem::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST_F(IoTest, BundledScenarioLoads) {
  const auto sf = load_scenario(std::string(INTERSIM_DATA_DIR) + "/crossroad.json");
  EXPECT_EQ(sf.scenario.lanes.size(), 24u);
  EXPECT_EQ(sf.scenario.lights.size(), 4u);
  EXPECT_DOUBLE_EQ(sf.scenario.frame_rate, 30.0);
  EXPECT_NO_THROW(sf.scenario.validate());
  EXPECT_NE(sf.scenario.find_lane("car_south_in"), nullptr);
  EXPECT_NE(sf.scenario.light_for_lane("bike_east_in"), nullptr);
  EXPECT_EQ(sf.scenario.light_for_lane("walk_south_e"), nullptr);
}

TEST_F(IoTest, BundledSchedulesLoad) {
  const auto s20 = load_schedule(std::string(INTERSIM_DATA_DIR) + "/schedule_20cars.json");
  EXPECT_EQ(s20.entries.size(), 20u);
  const auto s90 = load_schedule(std::string(INTERSIM_DATA_DIR) + "/schedule_90mixed.json");
  EXPECT_EQ(s90.entries.size(), 90u);
  int cars = 0, peds = 0, bikes = 0;
  for (const auto& e : s90.entries) {
    if (e.kind == AgentKind::car) ++cars;
    if (e.kind == AgentKind::pedestrian) ++peds;
    if (e.kind == AgentKind::bicycle) ++bikes;
  }
  EXPECT_EQ(cars, 40);
  EXPECT_EQ(peds, 30);
  EXPECT_EQ(bikes, 20);
}

TEST_F(IoTest, TrajectoryRoundTrip) {
  std::vector<Trajectory> trajs(2);
  trajs[0].agent_id = "a";
  trajs[0].kind = AgentKind::car;
  trajs[0].departure_lane = "lane1";
  trajs[0].samples = {{0, 1.234567891, -2.0}, {3, 4.5, 6.5}};
  trajs[1].agent_id = "b";
  trajs[1].kind = AgentKind::pedestrian;
  trajs[1].samples = {{5, 0.1, 0.2}, {6, 0.3, 0.4}};

  write_trajectories(path("t.csv"), trajs);
  const auto back = read_trajectories(path("t.csv"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].agent_id, "a");
  EXPECT_EQ(back[0].kind, AgentKind::car);
  ASSERT_TRUE(back[0].departure_lane.has_value());
  EXPECT_EQ(*back[0].departure_lane, "lane1");
  EXPECT_FALSE(back[1].departure_lane.has_value());
  ASSERT_EQ(back[0].samples.size(), 2u);
  EXPECT_EQ(back[0].samples[1].frame, 3);
  EXPECT_NEAR(back[0].samples[0].x, 1.234567891, 1e-8);
}

TEST_F(IoTest, TrajectoryHeaderIsEnforced) {
  std::ofstream out(path("bad.csv"));
  out << "x,y\n1,2\n";
  out.close();
  EXPECT_THROW(read_trajectories(path("bad.csv")), Error);
}

TEST_F(IoTest, DatasetRoundTripIsStable) {
  CandidateVelocityDataset ds;
  ds.append_velocity(AgentKind::car, "l1", {1.123456789, -0.5});
  ds.append_velocity(AgentKind::car, "l1", {0.25, 0.333333333});
  ds.append_velocity(AgentKind::bicycle, "l2", {2.0, 2.0});

  write_dataset(path("d.csv"), ds);
  const auto back = read_dataset(path("d.csv"));
  EXPECT_EQ(back.total_size(), 3u);
  EXPECT_TRUE(back.sorted());

  // Second write after a round trip is byte-identical (9 significant digits).
  write_dataset(path("d2.csv"), back);
  std::ifstream f1(path("d.csv")), f2(path("d2.csv"));
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  EXPECT_EQ(s1.str(), s2.str());
}

TEST_F(IoTest, RecordRoundTrip) {
  SimulationRecord rec;
  rec.rows.push_back({0, 1, AgentKind::car, 1.0, 2.0, 3.0, 4.0, SelectionOrigin::dataset});
  rec.rows.push_back({1, 1, AgentKind::car, 1.1, 2.1, 3.1, 4.1, SelectionOrigin::supplement});
  rec.overlaps.push_back({1, 1, 2, 0.75});
  rec.tick_seconds = {0.001, 0.002};
  rec.interaction_seconds = {0.0005, 0.001};

  write_record(path("r.csv"), rec);
  const auto back = read_record(path("r.csv"));
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[1].origin, SelectionOrigin::supplement);
  EXPECT_NEAR(back.rows[1].x, 1.1, 1e-9);
  ASSERT_EQ(back.overlaps.size(), 1u);
  EXPECT_EQ(back.overlaps[0].b, 2);
  EXPECT_NEAR(back.max_seconds_per_frame, 0.002, 1e-12);
  EXPECT_NEAR(back.avg_seconds_per_frame, 0.0015, 1e-12);
}

TEST_F(IoTest, LoadMotionDetectsFileKind) {
  SimulationRecord rec;
  rec.rows.push_back({0, 7, AgentKind::car, 0.0, 0.0, 3.0, 0.0, SelectionOrigin::dataset});
  rec.rows.push_back({1, 7, AgentKind::car, 0.1, 0.0, 3.3, 0.0, SelectionOrigin::dataset});
  write_record(path("rec.csv"), rec);
  const auto from_record = load_motion(path("rec.csv"), 30.0);
  ASSERT_EQ(from_record.velocities.size(), 1u);
  EXPECT_EQ(from_record.velocities.at("7").size(), 2u);
  EXPECT_EQ(from_record.velocities.at("7")[1], (Vec2{3.3, 0.0}));

  Trajectory t;
  t.agent_id = "w";
  t.kind = AgentKind::car;
  t.samples = {{0, 0.0, 0.0}, {1, 0.5, 0.0}, {2, 1.0, 0.0}};
  write_trajectories(path("traj.csv"), std::vector<Trajectory>{t});
  const auto from_traj = load_motion(path("traj.csv"), 30.0);
  ASSERT_EQ(from_traj.velocities.at("w").size(), 2u);
  EXPECT_NEAR(from_traj.velocities.at("w")[0].x, 15.0, 1e-9);  // 0.5 m per frame at 30 fps
}

TEST_F(IoTest, ScheduleParseErrors) {
  std::ofstream out(path("sched.json"));
  out << R"({"agents": [{"tick": 0, "kind": "car"}]})";
  out.close();
  EXPECT_THROW(load_schedule(path("sched.json")), Error);
  std::ofstream bad(path("badjson.json"));
  bad << "{not json";
  bad.close();
  EXPECT_THROW(load_schedule(path("badjson.json")), Error);
}

TEST_F(IoTest, ScenarioParamsOverride) {
  std::ofstream out(path("scen.json"));
  out << R"({
    "frame_rate": 30,
    "grid_cell_size": 8.0,
    "central_area": [[-5,-5],[5,-5],[5,5],[-5,5]],
    "lanes": [{"id": "l", "centerline": [[0,-40],[0,-5]], "width": 3.0,
               "direction": [0,1], "entry_boundary_midpoint": [0,-5],
               "allowed_kinds": ["car"]}],
    "lights": [],
    "params": {
      "window": 64,
      "perception_radius": 15.0,
      "thresholds": {"tau_c": 5.0},
      "supplement": {"psi_d": 1.2, "i_d": 0.4},
      "weights": {"car": {"w_e": 2.5, "d_s": 3.0}},
      "radius": {"car": 1.2},
      "mask_table": [{"i": "straight", "phi": "straight", "sector": "front", "value": 0.5}],
      "gaussians": {"pedestrian": {"sigma1_sq": 900.0}}
    }
  })";
  out.close();
  const auto sf = load_scenario(path("scen.json"));
  EXPECT_EQ(sf.config.window, 64u);
  EXPECT_DOUBLE_EQ(sf.config.perception_radius, 15.0);
  EXPECT_DOUBLE_EQ(sf.config.thresholds.tau_c, 5.0);
  EXPECT_DOUBLE_EQ(sf.config.thresholds.tau_m, 1.0);  // untouched default
  EXPECT_DOUBLE_EQ(sf.config.supplement.psi_d, 1.2);
  EXPECT_DOUBLE_EQ(sf.config.weights_for(AgentKind::car).w_e, 2.5);
  EXPECT_DOUBLE_EQ(sf.config.weights_for(AgentKind::car).d_s, 3.0);
  EXPECT_DOUBLE_EQ(sf.config.radius_for(AgentKind::car), 1.2);
  EXPECT_DOUBLE_EQ(sf.config.mask.value(Planning::straight, Planning::straight, MaskSector::front),
                   0.5);
  EXPECT_DOUBLE_EQ(sf.config.gaussians.pedestrian.sigma1_sq, 900.0);
}

}  // namespace
}  // namespace intersim
