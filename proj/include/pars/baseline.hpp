#pragma once

// Cascaded-PID recovery controller: roll to wings level through a roll-rate
// inner loop, pitch to gamma = 0 through a pitch-rate inner loop. The pitch
// chain's authority scales with max(cos phi, 0) so the controller unbanks
// before it pulls, and never pulls inverted.

#include <nlohmann/json.hpp>
#include <vector>

#include "pars/env.hpp"
#include "pars/flightdyn.hpp"

namespace pars::baseline {

struct PidLoopGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double i_limit = 0.0;   // clamp on the integral term's contribution
};

struct PidGains {
  PidLoopGains roll_angle;   // phi error -> roll-rate command
  PidLoopGains roll_rate;    // roll-rate error -> aileron stick
  PidLoopGains pitch_gamma;  // gamma error -> pitch-rate command
  PidLoopGains pitch_rate;   // pitch-rate error -> elevator stick
  double p_cmd_limit = 0.5;  // rad/s cap on commanded roll rate
  double q_cmd_limit = 0.25; // rad/s cap on commanded pitch rate

  void validate() const;
  // Frozen output of tune_gains over the default scenario set.
  static PidGains tuned();
};

PidGains pid_gains_from_json(const nlohmann::json& j);
nlohmann::json pid_gains_to_json(const PidGains& g);

class CascadedPid {
 public:
  explicit CascadedPid(const PidGains& gains);

  flightdyn::ControlCommand step(const flightdyn::AircraftState& state, double dt);
  void reset();

 private:
  struct LoopState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool has_prev = false;
  };
  double run_loop(const PidLoopGains& g, LoopState& s, double error, double dt,
                  double out_limit);

  PidGains gains_;
  LoopState phi_, p_, gamma_, q_;
};

// Episode environment for the classical baseline: same dynamics and reward,
// but no negative-g termination (the classical controller has no g
// protection; its g excursions are part of the comparison).
env::EnvConfig baseline_env_config(env::EnvConfig base);

// 18 sampled upsets plus the two canonical comparison cases.
std::vector<env::InitialCondition> default_tune_scenarios();

// Mean recovery score across scenarios; lower is better. A recovered
// episode scores its time-to-recover, a non-recovered one 60 s plus a
// residual-attitude penalty, a crashed one 120 s.
double evaluate_gains(const env::EnvConfig& cfg, const PidGains& gains,
                      const std::vector<env::InitialCondition>& scenarios);

struct TuneResult {
  PidGains gains;
  double objective = 0.0;
  int evaluations = 0;
};

// Deterministic coordinate search: each sweep tries scaling every gain up
// and down and keeps improvements.
TuneResult tune_gains(const env::EnvConfig& cfg, PidGains start,
                      const std::vector<env::InitialCondition>& scenarios,
                      int sweeps);

}  // namespace pars::baseline
