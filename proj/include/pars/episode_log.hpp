#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pars/env.hpp"

namespace pars::episode_log {

// One 10 Hz row of a flown episode.
struct Row {
  double t = 0.0;
  double phi_deg = 0.0;
  double gamma_deg = 0.0;
  double theta_deg = 0.0;
  double p_dps = 0.0;
  double q_dps = 0.0;
  double r_dps = 0.0;
  double alpha_deg = 0.0;
  double nz_g = 0.0;
  double aileron = 0.0;
  double elevator = 0.0;
  double reward = 0.0;
  std::vector<double> component_contributions;
  env::Termination termination = env::Termination::none;
};

struct EpisodeLog {
  std::vector<std::string> component_ids;  // column order for contributions
  std::vector<Row> rows;

  // Header: t,phi_deg,gamma_deg,theta_deg,p_dps,q_dps,r_dps,alpha_deg,
  // nz_g,aileron,elevator,reward,c_<id>...,termination
  void write_csv(const std::filesystem::path& path) const;
};

struct EpisodeSummary {
  double total_return = 0.0;
  int steps = 0;
  double sim_time_s = 0.0;
  env::Termination termination = env::Termination::none;
  bool success = false;
  double min_nz_g = 0.0;
  // Earliest time from which |phi| and |gamma| stay within 5 deg for the
  // whole remainder of the episode; unset if they never do.
  std::optional<double> time_to_recover_s;
  double final_phi_deg = 0.0;
  double final_gamma_deg = 0.0;
};

using Policy = std::function<flightdyn::ControlCommand(const env::Observation&)>;

// Drives one full episode from an already-reset environment. The initial
// state appears as row 0 with zero reward.
EpisodeSummary run_episode(env::UpsetEnv& env, const Policy& policy,
                           EpisodeLog* log = nullptr,
                           double recover_threshold_rad = deg2rad(5.0));

}  // namespace pars::episode_log
