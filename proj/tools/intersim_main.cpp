#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "intersim/intersim.hpp"

namespace {

int run_denoise(const std::string& in_path, const std::string& out_path,
                const intersim::FitConfig& cfg) {
  const auto raw = intersim::read_trajectories(in_path);
  std::vector<intersim::Trajectory> fitted;
  fitted.reserve(raw.size());
  int warnings = 0;
  for (const auto& t : raw) {
    auto res = intersim::fit_trajectory(t, cfg);
    if (!res.converged) {
      ++warnings;
      std::cerr << "warning: fit for '" << t.agent_id << "' did not converge within "
                << cfg.max_iterations << " iterations (loss " << res.fitted_loss << ")\n";
    }
    std::cout << t.agent_id << ": loss " << res.raw_loss << " -> " << res.fitted_loss << " in "
              << res.iterations << " iterations\n";
    fitted.push_back(std::move(res.trajectory));
  }
  intersim::write_trajectories(out_path, fitted);
  std::cout << "wrote " << fitted.size() << " trajectories to " << out_path;
  if (warnings > 0) std::cout << " (" << warnings << " non-converged)";
  std::cout << "\n";
  return 0;
}

int run_build_dataset(const std::string& in_path, const std::string& out_path, double fps) {
  const auto trajectories = intersim::read_trajectories(in_path);
  auto result = intersim::build_dataset(trajectories, 1.0 / fps);
  for (const auto& id : result.rejected) {
    std::cerr << "warning: trajectory '" << id << "' has no departure lane; skipped\n";
  }
  intersim::write_dataset(out_path, result.dataset);
  std::cout << "wrote " << result.dataset.total_size() << " velocities in "
            << result.dataset.keys().size() << " pools to " << out_path << "\n";
  return 0;
}

int run_simulate(const std::string& scenario_path, const std::string& dataset_path,
                 const std::string& schedule_path, long ticks, std::uint64_t seed,
                 const std::string& out_path, const std::string& timing_path, long window,
                 bool no_supplement) {
  auto scenario_file = intersim::load_scenario(scenario_path);
  if (window > 0) scenario_file.config.window = static_cast<std::size_t>(window);
  if (no_supplement) scenario_file.config.enable_supplement = false;

  auto dataset = intersim::read_dataset(dataset_path);
  auto schedule = intersim::load_schedule(schedule_path);

  auto world = intersim::init_simulation(std::move(scenario_file.scenario), std::move(dataset),
                                         std::move(schedule), scenario_file.config, seed);
  const auto record = world.run(ticks);
  intersim::write_record(out_path, record);
  if (!timing_path.empty()) intersim::write_timings(timing_path, record);

  std::cout << "simulated " << ticks << " ticks: spawned " << world.spawned() << ", arrived "
            << world.arrived() << ", active " << world.agents().size() << "\n";
  std::cout << "overlap events: " << record.overlaps.size() << "\n";
  std::printf("timing: max %.5f s/frame, avg %.5f s/frame\n", record.max_seconds_per_frame(),
              record.avg_seconds_per_frame());
  std::cout << "wrote record to " << out_path << "\n";
  return 0;
}

int run_evaluate(const std::string& sim_path, const std::string& gt_path, double vel_bin,
                 double ang_bin, double fps, const std::string& out_path) {
  const auto sim = intersim::load_motion(sim_path, fps);
  const auto gt = intersim::load_motion(gt_path, fps);
  const auto report = intersim::evaluate(sim, gt, vel_bin, ang_bin);
  if (out_path.empty()) {
    intersim::write_report(std::cout, report);
  } else {
    auto out = std::ofstream(out_path);
    if (!out) throw intersim::Error("cannot open '" + out_path + "' for writing");
    intersim::write_report(out, report);
    std::cout << "velocity_difference," << report.velocity_score << "\n";
    std::cout << "steering_angle_difference," << report.steering_score << "\n";
    std::cout << "wrote report to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid-driven traffic intersection simulator"};
  app.require_subcommand(1);

  // denoise
  auto* denoise = app.add_subcommand("denoise", "Fit B-splines to raw trajectories");
  std::string den_in, den_out;
  intersim::FitConfig fit_cfg;
  denoise->add_option("--in", den_in, "raw trajectory CSV")->required();
  denoise->add_option("--out", den_out, "denoised trajectory CSV")->required();
  denoise->add_option("--k", fit_cfg.k, "local-centering window (frames)");
  denoise->add_option("--w1", fit_cfg.w1, "position weight");
  denoise->add_option("--w2", fit_cfg.w2, "velocity-continuity weight");
  denoise->add_option("--w3", fit_cfg.w3, "local-centering weight");
  denoise->add_option("--w4", fit_cfg.w4, "combined-axis weight");
  denoise->add_option("--spacing", fit_cfg.control_point_spacing, "frames per control point");
  denoise->add_option("--max-iterations", fit_cfg.max_iterations, "optimizer iteration cap");

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Convert trajectories to velocity pools");
  std::string bld_in, bld_out;
  double bld_fps = 30.0;
  build->add_option("--in", bld_in, "denoised trajectory CSV")->required();
  build->add_option("--out", bld_out, "dataset CSV")->required();
  build->add_option("--fps", bld_fps, "trajectory frame rate");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the intersection simulation");
  std::string sim_scenario, sim_dataset, sim_schedule, sim_out, sim_timing;
  long sim_ticks = 1000;
  std::uint64_t sim_seed = 0;
  long sim_window = -1;
  bool sim_no_supplement = false;
  simulate->add_option("--scenario", sim_scenario, "scenario JSON")->required();
  simulate->add_option("--dataset", sim_dataset, "dataset CSV")->required();
  simulate->add_option("--schedule", sim_schedule, "spawn schedule JSON")->required();
  simulate->add_option("--ticks", sim_ticks, "number of ticks")->required();
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--out", sim_out, "record CSV")->required();
  simulate->add_option("--timing-out", sim_timing, "per-tick timing CSV");
  simulate->add_option("--window", sim_window, "candidate search window");
  simulate->add_flag("--no-supplement", sim_no_supplement,
                     "disable velocity-continuity supplementation");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Distribution differences vs. ground truth");
  std::string ev_sim, ev_gt, ev_out;
  double ev_vel_bin = 0.5, ev_ang_bin = 2.0, ev_fps = 30.0;
  evaluate->add_option("--sim", ev_sim, "simulation record CSV")->required();
  evaluate->add_option("--gt", ev_gt, "ground-truth record or trajectory CSV")->required();
  evaluate->add_option("--vel-bin", ev_vel_bin, "velocity bin width (m/s)");
  evaluate->add_option("--ang-bin", ev_ang_bin, "steering-angle bin width (degrees)");
  evaluate->add_option("--fps", ev_fps, "frame rate for trajectory inputs");
  evaluate->add_option("--out", ev_out, "report file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*denoise) return run_denoise(den_in, den_out, fit_cfg);
    if (*build) return run_build_dataset(bld_in, bld_out, bld_fps);
    if (*simulate) {
      return run_simulate(sim_scenario, sim_dataset, sim_schedule, sim_ticks, sim_seed, sim_out,
                          sim_timing, sim_window, sim_no_supplement);
    }
    if (*evaluate) return run_evaluate(ev_sim, ev_gt, ev_vel_bin, ev_ang_bin, ev_fps, ev_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
