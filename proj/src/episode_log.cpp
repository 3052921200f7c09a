#include "pars/episode_log.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "pars/errors.hpp"

namespace pars::episode_log {

void EpisodeLog::write_csv(const std::filesystem::path& path) const {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write episode log: " + path.string());
  out.precision(10);

  out << "t,phi_deg,gamma_deg,theta_deg,p_dps,q_dps,r_dps,alpha_deg,nz_g,"
         "aileron,elevator,reward";
  for (const auto& id : component_ids) out << ",c_" << id;
  out << ",termination\n";

  for (const auto& r : rows) {
    out << r.t << ',' << r.phi_deg << ',' << r.gamma_deg << ',' << r.theta_deg << ','
        << r.p_dps << ',' << r.q_dps << ',' << r.r_dps << ',' << r.alpha_deg << ','
        << r.nz_g << ',' << r.aileron << ',' << r.elevator << ',' << r.reward;
    for (size_t i = 0; i < component_ids.size(); ++i) {
      out << ',' << (i < r.component_contributions.size() ? r.component_contributions[i] : 0.0);
    }
    out << ',' << env::to_string(r.termination) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

Row make_row(const flightdyn::AircraftState& s, double nz,
             const flightdyn::ControlCommand& cmd, double reward,
             env::Termination term) {
  Row r;
  r.t = s.t;
  r.phi_deg = rad2deg(s.phi);
  r.gamma_deg = rad2deg(flightdyn::flight_path_angle(s));
  r.theta_deg = rad2deg(s.theta);
  r.p_dps = rad2deg(s.p);
  r.q_dps = rad2deg(s.q);
  r.r_dps = rad2deg(s.r);
  r.alpha_deg = rad2deg(s.alpha());
  r.nz_g = nz;
  r.aileron = cmd.aileron;
  r.elevator = cmd.elevator;
  r.reward = reward;
  r.termination = term;
  return r;
}

}  // namespace

EpisodeSummary run_episode(env::UpsetEnv& env, const Policy& policy, EpisodeLog* log,
                           double recover_threshold_rad) {
  if (env.done()) throw std::logic_error("run_episode: environment not reset");

  if (log) {
    log->component_ids.clear();
    for (const auto& c : env.config().reward_spec.components) {
      log->component_ids.push_back(c.id);
    }
    log->rows.clear();
    log->rows.push_back(make_row(env.state(), env.load_factor(), env.prev_command(),
                                 0.0, env::Termination::none));
  }

  EpisodeSummary sum;
  sum.min_nz_g = env.load_factor();

  // (t, inside-5-deg) flags for the recovery-time scan.
  std::vector<std::pair<double, bool>> level5;
  {
    const auto& s = env.state();
    level5.emplace_back(s.t, std::abs(s.phi) <= recover_threshold_rad &&
                                 std::abs(flightdyn::flight_path_angle(s)) <=
                                     recover_threshold_rad);
  }

  while (!env.done()) {
    const auto action = policy(env.observe());
    const auto out = env.step(action);

    sum.total_return += out.reward;
    sum.steps += 1;
    sum.min_nz_g = std::min(sum.min_nz_g, out.info.min_nz_g);

    const auto& s = out.info.state;
    level5.emplace_back(s.t, std::abs(s.phi) <= recover_threshold_rad &&
                                 std::abs(flightdyn::flight_path_angle(s)) <=
                                     recover_threshold_rad);

    if (log) {
      Row r = make_row(s, env.load_factor(), env.prev_command(), out.reward,
                       out.info.reason);
      for (const auto& c : out.info.breakdown.components) {
        r.component_contributions.push_back(c.contribution);
      }
      log->rows.push_back(std::move(r));
    }

    if (env.done()) {
      sum.termination = out.info.reason;
      sum.success = out.info.reason == env::Termination::success;
      sum.final_phi_deg = rad2deg(s.phi);
      sum.final_gamma_deg = rad2deg(flightdyn::flight_path_angle(s));
    }
  }
  sum.sim_time_s = env.time_s();

  // Earliest time from which the level-5-deg flag holds to the end.
  for (auto it = level5.rbegin(); it != level5.rend() && it->second; ++it) {
    sum.time_to_recover_s = it->first;
  }
  return sum;
}

}  // namespace pars::episode_log
