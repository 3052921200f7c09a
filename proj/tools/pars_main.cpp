#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pars/baseline.hpp"
#include "pars/config.hpp"
#include "pars/env.hpp"
#include "pars/episode_log.hpp"
#include "pars/errors.hpp"
#include "pars/hpo.hpp"
#include "pars/mathutil.hpp"
#include "pars/reward.hpp"
#include "pars/rng.hpp"
#include "pars/sac.hpp"
#include "pars/svg.hpp"
#include "pars/upset_task.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pars;

namespace {

// ---------------------------------------------------------------- shared

struct ScenarioOpts {
  std::string name = "case1";
  double phi_deg = 0.0;
  double gamma_deg = 0.0;
  bool has_phi = false;
  bool has_gamma = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioOpts& s) {
  cmd->add_option("--scenario", s.name, "case1 | case2 | sampled | explicit")
      ->check(CLI::IsMember({"case1", "case2", "sampled", "explicit"}));
  cmd->add_option("--phi-deg", s.phi_deg, "initial bank angle for --scenario explicit")
      ->each([&s](const std::string&) { s.has_phi = true; });
  cmd->add_option("--gamma-deg", s.gamma_deg,
                  "initial flight path angle for --scenario explicit")
      ->each([&s](const std::string&) { s.has_gamma = true; });
}

// nullopt means "draw from the upset sampler".
std::optional<env::InitialCondition> resolve_scenario(const ScenarioOpts& s) {
  if (s.name == "case1") return env::InitialCondition{deg2rad(-100.0), deg2rad(45.0)};
  if (s.name == "case2") return env::InitialCondition{deg2rad(-30.0), deg2rad(60.0)};
  if (s.name == "sampled") return std::nullopt;
  if (!s.has_phi || !s.has_gamma) {
    throw ConfigError("scenario 'explicit' needs --phi-deg and --gamma-deg");
  }
  return env::InitialCondition{deg2rad(s.phi_deg), deg2rad(s.gamma_deg)};
}

fs::path ensure_out_dir(const std::string& out) {
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory not writable: " + dir.string());
  }
  fs::remove(probe, ec);
  return dir;
}

void write_manifest(const fs::path& dir, json manifest) {
  manifest["manifest_version"] = 1;
  config::save_json_file(dir / "manifest.json", manifest);
}

env::EnvConfig env_from_checkpoint(const sac::Checkpoint& ck) {
  if (ck.env.is_object() && !ck.env.empty()) {
    return config::env_config_from_json(ck.env);
  }
  return env::EnvConfig{};
}

episode_log::Policy rl_policy(const sac::GaussianPolicy& policy) {
  return [&policy](const env::Observation& obs) {
    const sac::Vector a = policy.mean_action(sac::observation_vector(obs));
    return flightdyn::ControlCommand{a(0), a(1)};
  };
}

// Earliest time from which |field| stays within bound_deg to episode end.
std::optional<double> channel_recovery(const episode_log::EpisodeLog& log,
                                       double episode_log::Row::*field,
                                       double bound_deg) {
  std::optional<double> t;
  for (auto it = log.rows.rbegin();
       it != log.rows.rend() && std::abs((*it).*field) <= bound_deg; ++it) {
    t = it->t;
  }
  return t;
}

json opt_to_json(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

std::string recovery_cell(const std::optional<double>& v) {
  if (!v) return "not recovered";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

// ---------------------------------------------------------------- train

struct TrainOpts {
  std::string config_path;
  std::string out;
  uint64_t seed = 0;
  long total_steps = 0;
  bool seed_set = false;
  bool steps_set = false;
};

int cmd_train(const TrainOpts& o) {
  json file = json::object();
  if (!o.config_path.empty()) {
    file = config::load_json_file(o.config_path);
    if (!file.is_object()) throw ConfigError("train config: expected a JSON object");
    for (const auto& item : file.items()) {
      if (item.key() != "sac" && item.key() != "env") {
        throw ConfigError("train config: unknown key '" + item.key() + "'");
      }
    }
  }
  sac::SacConfig scfg =
      file.contains("sac") ? sac::sac_config_from_json(file.at("sac")) : sac::SacConfig{};
  const env::EnvConfig ecfg = file.contains("env")
                                  ? config::env_config_from_json(file.at("env"))
                                  : env::EnvConfig{};
  if (o.seed_set) scfg.seed = o.seed;
  if (o.steps_set) scfg.total_steps = o.total_steps;
  scfg.validate();

  const fs::path dir = ensure_out_dir(o.out);
  write_manifest(dir, {{"command", "train"},
                       {"seed", scfg.seed},
                       {"sac", sac::sac_config_to_json(scfg)},
                       {"env", config::env_config_to_json(ecfg)}});

  std::cout << "training: total_steps=" << scfg.total_steps << " seed=" << scfg.seed
            << "\n";
  const sac::TrainResult result = sac::train(
      sac::upset_env_factory(ecfg), scfg,
      [](long step, const sac::EvalRecord& rec) {
        std::cout << "eval step=" << step << " mean_return=" << rec.mean_return
                  << std::endl;
        return true;
      });

  sac::write_curve_csv((dir / "curve.csv").string(), result.curve);
  sac::Checkpoint ck;
  ck.policy = result.best_policy;
  ck.config = scfg;
  ck.env = config::env_config_to_json(ecfg);
  ck.trained_steps = result.total_env_steps;
  ck.best_eval = result.best_eval;
  sac::save_checkpoint(dir / "checkpoint.json", ck);

  std::cout << "episodes=" << result.curve.size()
            << " gradient_updates=" << result.gradient_updates
            << " best_eval=" << ck.best_eval << " wall_s=" << result.wall_seconds
            << "\nwrote " << (dir / "checkpoint.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalOpts {
  std::string checkpoint;
  std::string out;
  ScenarioOpts scenario;
  int episodes = 5;
  uint64_t seed = 1;
};

int cmd_eval(const EvalOpts& o) {
  if (o.episodes < 1) throw ConfigError("eval: --episodes must be positive");
  const sac::Checkpoint ck = sac::load_checkpoint(o.checkpoint);
  const env::EnvConfig ecfg = env_from_checkpoint(ck);
  const auto ic = resolve_scenario(o.scenario);

  const fs::path dir = ensure_out_dir(o.out);
  write_manifest(dir, {{"command", "eval"},
                       {"checkpoint", o.checkpoint},
                       {"scenario", o.scenario.name},
                       {"episodes", o.episodes},
                       {"seed", o.seed},
                       {"sac", sac::sac_config_to_json(ck.config)},
                       {"env", config::env_config_to_json(ecfg)}});

  const episode_log::Policy policy = rl_policy(ck.policy);
  json episodes = json::array();
  double sum_return = 0.0;
  int successes = 0;
  for (int e = 0; e < o.episodes; ++e) {
    env::UpsetEnv env(ecfg, derive_seed(o.seed, 1000 + static_cast<uint64_t>(e)));
    if (ic) {
      env.reset(*ic);
    } else {
      env.reset();
    }
    episode_log::EpisodeLog log;
    const auto summary = episode_log::run_episode(env, policy, &log);
    log.write_csv(dir / ("episode_" + std::to_string(e + 1) + ".csv"));

    episodes.push_back(
        {{"episode", e + 1},
         {"initial_phi_deg", log.rows.front().phi_deg},
         {"initial_gamma_deg", log.rows.front().gamma_deg},
         {"success", summary.success},
         {"termination", env::to_string(summary.termination)},
         {"return", summary.total_return},
         {"steps", summary.steps},
         {"sim_time_s", summary.sim_time_s},
         {"min_nz_g", summary.min_nz_g},
         {"time_to_recover_phi_s",
          opt_to_json(channel_recovery(log, &episode_log::Row::phi_deg, 5.0))},
         {"time_to_recover_gamma_s",
          opt_to_json(channel_recovery(log, &episode_log::Row::gamma_deg, 5.0))},
         {"time_to_recover_s", opt_to_json(summary.time_to_recover_s)}});
    sum_return += summary.total_return;
    successes += summary.success ? 1 : 0;
  }

  config::save_json_file(dir / "summary.json",
                         {{"episodes", episodes},
                          {"mean_return", sum_return / o.episodes},
                          {"successes", successes}});
  std::cout << "episodes=" << o.episodes << " successes=" << successes
            << " mean_return=" << sum_return / o.episodes << "\nwrote "
            << (dir / "summary.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareOpts {
  std::string checkpoint;
  std::string out;
  std::string gains_path;
  ScenarioOpts scenario;
  uint64_t seed = 1;
};

int cmd_compare(const CompareOpts& o) {
  const sac::Checkpoint ck = sac::load_checkpoint(o.checkpoint);
  const env::EnvConfig ecfg = env_from_checkpoint(ck);
  const baseline::PidGains gains =
      o.gains_path.empty()
          ? baseline::PidGains::tuned()
          : baseline::pid_gains_from_json(config::load_json_file(o.gains_path));

  env::InitialCondition ic;
  if (const auto fixed = resolve_scenario(o.scenario)) {
    ic = *fixed;
  } else {
    env::InitialConditionSampler sampler(ecfg.sampler, derive_seed(o.seed, 7));
    const auto draw = sampler.next();
    ic = {draw.phi_rad, draw.gamma_rad};
  }

  const fs::path dir = ensure_out_dir(o.out);
  write_manifest(dir, {{"command", "compare"},
                       {"checkpoint", o.checkpoint},
                       {"scenario", o.scenario.name},
                       {"initial_phi_deg", rad2deg(ic.phi_rad)},
                       {"initial_gamma_deg", rad2deg(ic.gamma_rad)},
                       {"seed", o.seed},
                       {"pid_gains", baseline::pid_gains_to_json(gains)},
                       {"sac", sac::sac_config_to_json(ck.config)},
                       {"env", config::env_config_to_json(ecfg)}});

  episode_log::EpisodeLog rl_log;
  env::UpsetEnv rl_env(ecfg, derive_seed(o.seed, 1));
  rl_env.reset(ic);
  const episode_log::Policy policy = rl_policy(ck.policy);
  const auto rl_sum = episode_log::run_episode(rl_env, policy, &rl_log);

  episode_log::EpisodeLog pid_log;
  env::UpsetEnv pid_env(baseline::baseline_env_config(ecfg), derive_seed(o.seed, 1));
  pid_env.reset(ic);
  baseline::CascadedPid pid(gains);
  const auto pid_sum = episode_log::run_episode(
      pid_env,
      [&](const env::Observation&) { return pid.step(pid_env.state(), ecfg.control_dt_s); },
      &pid_log);

  // aligned time series; blank cells once a controller's episode ends
  {
    std::ofstream out(dir / "compare.csv");
    if (!out) throw IoError("cannot write compare.csv in " + dir.string());
    out.precision(10);
    out << "t,rl_phi_deg,rl_gamma_deg,rl_nz_g,pid_phi_deg,pid_gamma_deg,pid_nz_g\n";
    const size_t n = std::max(rl_log.rows.size(), pid_log.rows.size());
    for (size_t i = 0; i < n; ++i) {
      const bool rl = i < rl_log.rows.size();
      const bool pd = i < pid_log.rows.size();
      out << (rl ? rl_log.rows[i].t : pid_log.rows[i].t) << ',';
      if (rl) out << rl_log.rows[i].phi_deg;
      out << ',';
      if (rl) out << rl_log.rows[i].gamma_deg;
      out << ',';
      if (rl) out << rl_log.rows[i].nz_g;
      out << ',';
      if (pd) out << pid_log.rows[i].phi_deg;
      out << ',';
      if (pd) out << pid_log.rows[i].gamma_deg;
      out << ',';
      if (pd) out << pid_log.rows[i].nz_g;
      out << '\n';
    }
    if (!out) throw IoError("write failed: compare.csv");
  }

  const auto series = [](const episode_log::EpisodeLog& log,
                         double episode_log::Row::*field, const std::string& label,
                         bool dashed) {
    svg::Series s;
    s.label = label;
    s.dashed = dashed;
    for (const auto& r : log.rows) {
      s.x.push_back(r.t);
      s.y.push_back(r.*field);
    }
    return s;
  };
  svg::Chart chart;
  chart.title = "recovery comparison, phi0=" + std::to_string(rad2deg(ic.phi_rad)) +
                " deg, gamma0=" + std::to_string(rad2deg(ic.gamma_rad)) + " deg";
  chart.panels.push_back({"bank angle",
                          "time [s]",
                          "phi [deg]",
                          {series(rl_log, &episode_log::Row::phi_deg, "rl", false),
                           series(pid_log, &episode_log::Row::phi_deg, "pid", true)}});
  chart.panels.push_back({"flight path angle",
                          "time [s]",
                          "gamma [deg]",
                          {series(rl_log, &episode_log::Row::gamma_deg, "rl", false),
                           series(pid_log, &episode_log::Row::gamma_deg, "pid", true)}});
  chart.panels.push_back({"load factor",
                          "time [s]",
                          "n_z [g]",
                          {series(rl_log, &episode_log::Row::nz_g, "rl", false),
                           series(pid_log, &episode_log::Row::nz_g, "pid", true)}});
  svg::write_chart(dir / "compare.svg", chart);

  const auto rl_phi = channel_recovery(rl_log, &episode_log::Row::phi_deg, 5.0);
  const auto rl_gamma = channel_recovery(rl_log, &episode_log::Row::gamma_deg, 5.0);
  const auto pid_phi = channel_recovery(pid_log, &episode_log::Row::phi_deg, 5.0);
  const auto pid_gamma = channel_recovery(pid_log, &episode_log::Row::gamma_deg, 5.0);

  config::save_json_file(
      dir / "compare_summary.json",
      {{"initial_phi_deg", rad2deg(ic.phi_rad)},
       {"initial_gamma_deg", rad2deg(ic.gamma_rad)},
       {"rl",
        {{"time_to_recover_phi_s", opt_to_json(rl_phi)},
         {"time_to_recover_gamma_s", opt_to_json(rl_gamma)},
         {"time_to_recover_s", opt_to_json(rl_sum.time_to_recover_s)},
         {"min_nz_g", rl_sum.min_nz_g},
         {"success", rl_sum.success},
         {"termination", env::to_string(rl_sum.termination)}}},
       {"pid",
        {{"time_to_recover_phi_s", opt_to_json(pid_phi)},
         {"time_to_recover_gamma_s", opt_to_json(pid_gamma)},
         {"time_to_recover_s", opt_to_json(pid_sum.time_to_recover_s)},
         {"min_nz_g", pid_sum.min_nz_g},
         {"success", pid_sum.success},
         {"termination", env::to_string(pid_sum.termination)}}}});

  std::printf("recovery times [s], within 5 deg to episode end\n");
  std::printf("%-8s %-14s %-14s\n", "channel", "rl", "pid");
  std::printf("%-8s %-14s %-14s\n", "phi", recovery_cell(rl_phi).c_str(),
              recovery_cell(pid_phi).c_str());
  std::printf("%-8s %-14s %-14s\n", "gamma", recovery_cell(rl_gamma).c_str(),
              recovery_cell(pid_gamma).c_str());
  std::printf("min n_z: rl %.2f g, pid %.2f g\n", rl_sum.min_nz_g, pid_sum.min_nz_g);
  std::cout << "wrote " << (dir / "compare.svg").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepOpts {
  std::string space_path;
  std::string env_path;
  std::string out;
  int trials = 20;
  int workers = 1;
  long steps_per_trial = 20000;
  uint64_t seed = 1;
  bool resume = false;
};

int cmd_sweep(const SweepOpts& o) {
  if (o.trials < 1) throw ConfigError("sweep: --trials must be positive");
  if (o.steps_per_trial < 1000) {
    throw ConfigError("sweep: --steps-per-trial must be at least 1000");
  }
  const hpo::SearchSpace space =
      o.space_path.empty()
          ? hpo::SearchSpace{}
          : hpo::search_space_from_json(config::load_json_file(o.space_path));
  const env::EnvConfig ecfg =
      o.env_path.empty() ? env::EnvConfig{}
                         : config::env_config_from_json(config::load_json_file(o.env_path));

  const fs::path dir = ensure_out_dir(o.out);
  const fs::path study = dir / "study.jsonl";
  if (fs::exists(study) && !o.resume) {
    throw ConfigError("study file exists, pass --resume to continue: " + study.string());
  }
  write_manifest(dir, {{"command", "sweep"},
                       {"seed", o.seed},
                       {"trials", o.trials},
                       {"workers", o.workers},
                       {"steps_per_trial", o.steps_per_trial},
                       {"resume", o.resume},
                       {"space", hpo::search_space_to_json(space)},
                       {"env", config::env_config_to_json(ecfg)}});

  const sac::EnvFactory factory = sac::upset_env_factory(ecfg);
  const uint64_t study_seed = o.seed;
  const long steps = o.steps_per_trial;
  const hpo::TrialFn objective = [&](const sac::SacConfig& suggested,
                                     hpo::TrialContext& ctx) {
    sac::SacConfig cfg = suggested;
    cfg.total_steps = steps;
    cfg.eval_interval = std::max<long>(250, steps / 4);
    cfg.eval_episodes = 3;
    cfg.seed = derive_seed(study_seed, 9000 + static_cast<uint64_t>(ctx.id()));
    const sac::TrainResult r =
        sac::train(factory, cfg, [&ctx](long, const sac::EvalRecord& rec) {
          return !ctx.report(rec.mean_return);
        });
    std::cout << "trial " << ctx.id() << ": "
              << (ctx.prune_requested() ? "pruned" : "complete") << " after "
              << r.total_env_steps << " steps\n";
    return r.evals.empty() ? r.best_eval : r.evals.back().mean_return;
  };

  hpo::StudyOptions sopts;
  sopts.n_trials = o.trials;
  sopts.seed = o.seed;
  sopts.workers = o.workers;
  sopts.store = study;
  const hpo::StudyResult res = hpo::run_study(objective, space, sopts);

  int complete = 0, pruned = 0, failed = 0;
  for (const auto& t : res.trials) {
    complete += t.status == hpo::TrialStatus::complete ? 1 : 0;
    pruned += t.status == hpo::TrialStatus::pruned ? 1 : 0;
    failed += t.status == hpo::TrialStatus::failed ? 1 : 0;
  }
  std::cout << "study: " << res.trials.size() << " trials (" << complete
            << " complete, " << pruned << " pruned, " << failed << " failed)\n";
  if (res.best_index < 0) {
    std::cerr << "no trial completed\n";
    return 4;
  }

  const hpo::TrialRecord& best = res.best();
  config::save_json_file(dir / "best_config.json",
                         {{"trial", best.id},
                          {"objective", *best.objective},
                          {"sac", sac::sac_config_to_json(best.config)}});
  {
    std::ofstream report(dir / "best_report.txt");
    if (!report) throw IoError("cannot write best_report.txt in " + dir.string());
    report << "best trial: " << best.id << "\nobjective (final eval mean return): "
           << *best.objective << "\nconfig:\n"
           << sac::sac_config_to_json(best.config).dump(2) << "\n";
  }
  std::cout << "best trial " << best.id << " objective " << *best.objective
            << ", lr " << best.config.learning_rate << "\nwrote "
            << (dir / "best_config.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- plots

struct PlotRewardOpts {
  std::vector<double> scales{0.157, 0.5, 1.0, 4.5};
  std::string out;
};

int cmd_plot_reward(const PlotRewardOpts& o) {
  if (o.scales.empty()) throw ConfigError("plot-reward: at least one --scale required");
  for (double s : o.scales) {
    if (!(s > 0.0)) throw ConfigError("plot-reward: scales must be positive");
  }
  const fs::path dir = ensure_out_dir(o.out);
  write_manifest(dir, {{"command", "plot-reward"}, {"scales", o.scales}});

  svg::Panel panel;
  panel.title = "asymptotic attitude reward vs error scale";
  panel.x_label = "bank angle error [deg]";
  panel.y_label = "reward";
  std::vector<std::vector<double>> columns;
  std::vector<double> xs;
  for (int d = -180; d <= 180; ++d) xs.push_back(static_cast<double>(d));
  for (double scale : o.scales) {
    svg::Series s;
    char label[48];
    std::snprintf(label, sizeof(label), "scale %g", scale);
    s.label = label;
    for (double x : xs) {
      s.x.push_back(x);
      s.y.push_back(1.0 - reward::asymptotic_error(std::abs(deg2rad(x)), scale));
    }
    columns.push_back(s.y);
    panel.series.push_back(std::move(s));
  }
  svg::Chart chart;
  chart.panels.push_back(std::move(panel));
  svg::write_chart(dir / "reward_shape.svg", chart);

  std::ofstream csv(dir / "reward_shape.csv");
  if (!csv) throw IoError("cannot write reward_shape.csv in " + dir.string());
  csv.precision(10);
  csv << "delta_phi_deg";
  for (double scale : o.scales) csv << ",scale_" << scale;
  csv << '\n';
  for (size_t i = 0; i < xs.size(); ++i) {
    csv << xs[i];
    for (const auto& col : columns) csv << ',' << col[i];
    csv << '\n';
  }
  std::cout << "wrote " << (dir / "reward_shape.svg").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- tune

struct TuneBaselineOpts {
  std::string out;
  int sweeps = 6;
};

int cmd_tune_baseline(const TuneBaselineOpts& o) {
  if (o.sweeps < 1) throw ConfigError("tune-baseline: --sweeps must be positive");
  const fs::path dir = ensure_out_dir(o.out);
  write_manifest(dir, {{"command", "tune-baseline"}, {"sweeps", o.sweeps}});

  const env::EnvConfig cfg = baseline::baseline_env_config(env::EnvConfig{});
  const auto scenarios = baseline::default_tune_scenarios();

  baseline::PidGains start;
  start.roll_angle = {2.0, 0.0, 0.0, 0.3};
  start.roll_rate = {0.4, 0.2, 0.02, 0.5};
  start.pitch_gamma = {1.2, 0.1, 0.0, 0.3};
  start.pitch_rate = {0.8, 0.3, 0.05, 0.5};
  start.p_cmd_limit = 0.25;
  start.q_cmd_limit = 0.20;

  std::cout << "tuning over " << scenarios.size() << " scenarios, start objective "
            << baseline::evaluate_gains(cfg, start, scenarios) << "\n";
  const baseline::TuneResult res = baseline::tune_gains(cfg, start, scenarios, o.sweeps);
  config::save_json_file(dir / "pid_gains.json", baseline::pid_gains_to_json(res.gains));
  std::cout << "tuned objective " << res.objective << " after " << res.evaluations
            << " evaluations\nwrote " << (dir / "pid_gains.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale pilot-activated upset recovery lab"};
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "train a recovery policy");
  train->add_option("--config", train_opts.config_path,
                    "JSON config with optional 'sac' and 'env' objects");
  train->add_option("--out", train_opts.out, "output directory")->required();
  train->add_option("--seed", train_opts.seed, "training seed")
      ->each([&](const std::string&) { train_opts.seed_set = true; });
  train->add_option("--total-steps", train_opts.total_steps, "environment step budget")
      ->each([&](const std::string&) { train_opts.steps_set = true; });

  EvalOpts eval_opts;
  CLI::App* eval = app.add_subcommand("eval", "run deterministic evaluation episodes");
  eval->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint file")->required();
  eval->add_option("--out", eval_opts.out, "output directory")->required();
  eval->add_option("--episodes", eval_opts.episodes, "episode count");
  eval->add_option("--seed", eval_opts.seed, "evaluation seed");
  add_scenario_flags(eval, eval_opts.scenario);

  CompareOpts cmp_opts;
  CLI::App* cmp = app.add_subcommand("compare", "recovery policy vs cascaded PID");
  cmp->add_option("--checkpoint", cmp_opts.checkpoint, "checkpoint file")->required();
  cmp->add_option("--out", cmp_opts.out, "output directory")->required();
  cmp->add_option("--gains", cmp_opts.gains_path, "PID gains JSON (default: tuned)");
  cmp->add_option("--seed", cmp_opts.seed, "seed for the sampled scenario");
  add_scenario_flags(cmp, cmp_opts.scenario);

  SweepOpts sweep_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "hyperparameter study");
  sweep->add_option("--out", sweep_opts.out, "output directory")->required();
  sweep->add_option("--space", sweep_opts.space_path, "search space JSON");
  sweep->add_option("--env-config", sweep_opts.env_path, "environment config JSON");
  sweep->add_option("--trials", sweep_opts.trials, "new trials to run");
  sweep->add_option("--workers", sweep_opts.workers, "concurrent trial workers");
  sweep->add_option("--steps-per-trial", sweep_opts.steps_per_trial,
                    "env step budget per trial");
  sweep->add_option("--seed", sweep_opts.seed, "study seed");
  sweep->add_flag("--resume", sweep_opts.resume, "continue an existing study file");

  PlotRewardOpts plot_opts;
  CLI::App* plot = app.add_subcommand("plot-reward", "reward shape vs error scale");
  plot->add_option("--out", plot_opts.out, "output directory")->required();
  plot->add_option("--scales", plot_opts.scales, "positive scale factors")
      ->delimiter(',');

  TuneBaselineOpts tune_opts;
  CLI::App* tune = app.add_subcommand("tune-baseline", "re-run the PID gain search");
  tune->add_option("--out", tune_opts.out, "output directory")->required();
  tune->add_option("--sweeps", tune_opts.sweeps, "coordinate-search sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmd_train(train_opts);
    if (eval->parsed()) return cmd_eval(eval_opts);
    if (cmp->parsed()) return cmd_compare(cmp_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (plot->parsed()) return cmd_plot_reward(plot_opts);
    if (tune->parsed()) return cmd_tune_baseline(tune_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
