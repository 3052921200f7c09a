#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pars/flightdyn.hpp"
#include "pars/reward.hpp"
#include "pars/rng.hpp"

namespace pars::env {

// Edges of the normal-flight envelope; outside any one of them the
// aircraft counts as upset.
struct UpsetThresholds {
  double nose_up_rad = deg2rad(25.0);
  double nose_down_rad = deg2rad(10.0);
  double bank_rad = deg2rad(45.0);

  bool is_upset(double phi, double gamma) const {
    return gamma > nose_up_rad || gamma < -nose_down_rad ||
           std::abs(phi) > bank_rad;
  }
};

// Level-flight hold required to call a recovery done.
struct SuccessThresholds {
  double max_angle_rad = deg2rad(2.0);
  double max_rate_rads = deg2rad(3.0);
  double hold_s = 2.0;
};

struct SamplerConfig {
  UpsetThresholds thresholds;
  int phi_cells = 12;    // over (-180, 180] deg
  int gamma_cells = 9;   // over [gamma_min, gamma_max)
  double gamma_min_rad = deg2rad(-60.0);
  double gamma_max_rad = deg2rad(75.0);
};

// Draws (phi, gamma) upsets by traversing a discretized grid: cells that
// overlap the normal envelope are dropped, the rest are visited in a
// seeded shuffled order, one uniform draw per cell, reshuffling each
// epoch. Coverage of the whole upset space is therefore guaranteed every
// cell_count() draws.
class InitialConditionSampler {
 public:
  InitialConditionSampler(SamplerConfig cfg, uint64_t seed);

  struct Sample {
    double phi_rad;
    double gamma_rad;
    int cell;
  };
  Sample next();

  int cell_count() const { return static_cast<int>(cells_.size()); }
  // Grid cell id of an attitude, or -1 outside the sampled region.
  int cell_of(double phi_rad, double gamma_rad) const;
  const std::vector<int>& cells() const { return cells_; }

 private:
  SamplerConfig cfg_;
  Rng rng_;
  std::vector<int> cells_;   // grid ids of upset-only cells
  std::vector<int> order_;   // traversal order into cells_
  size_t cursor_ = 0;

  void reshuffle();
};

struct ActuatorConfig {
  double tau_s = 0.05;           // first-order lag
  double rate_limit_per_s = 2.0; // stick units per second
};

// Stick servo model: commanded position is tracked through a first-order
// lag and a slew limit, so single-step bang-bang commands cannot reach
// the surface.
class Actuator {
 public:
  Actuator(ActuatorConfig cfg, flightdyn::ControlCommand initial);
  flightdyn::ControlCommand advance(const flightdyn::ControlCommand& commanded, double dt);
  const flightdyn::ControlCommand& position() const { return pos_; }

 private:
  ActuatorConfig cfg_;
  flightdyn::ControlCommand pos_;
};

enum class Termination { none, g_violation, envelope, success, timeout };
const char* to_string(Termination t);

struct EnvConfig {
  flightdyn::AeroModel aero;
  reward::RewardSpec reward_spec = reward::preset(4);
  double control_dt_s = 0.1;
  int substeps = 5;  // physics rate = substeps / control_dt
  double timeout_s = 60.0;
  SuccessThresholds success;
  SamplerConfig sampler;
  ActuatorConfig actuator;

  double airspeed_ms = 120.0;     // trim speed for sampled episodes
  double altitude_min_m = 2000.0; // sampled altitude band
  double altitude_max_m = 6000.0;

  // Envelope-violation termination bounds (reward forced to 0).
  double v_min_ms = 40.0;
  double v_max_ms = 350.0;
  double alpha_limit_rad = deg2rad(45.0);

  // Actions as stick increments instead of absolute positions.
  bool incremental_actions = false;

  void validate() const;
};

// Fixed divisors scaling each observation entry to roughly [-1, 1];
// entries are clamped to [-3, 3] afterwards. Order and scaling are part
// of the checkpoint contract: a trained policy only transfers between
// environments with identical divisors.
struct Observation {
  static constexpr int kSize = 12;
  std::array<double, kSize> v{};
};

inline constexpr std::array<const char*, Observation::kSize> kObsNames = {
    "phi", "theta", "gamma", "p", "q", "r", "alpha", "beta",
    "airspeed", "n_z", "prev_aileron", "prev_elevator"};

inline constexpr std::array<double, Observation::kSize> kObsDivisors = {
    kPi,          // phi
    kPi / 2.0,    // theta
    kPi / 2.0,    // gamma
    3.0,          // p, rad/s
    2.0,          // q, rad/s
    2.0,          // r, rad/s
    kPi / 4.0,    // alpha
    kPi / 4.0,    // beta
    200.0,        // airspeed, m/s
    4.0,          // n_z, g
    1.0,          // previous aileron command
    1.0,          // previous elevator command
};

inline constexpr double kObsClamp = 3.0;

struct StepInfo {
  reward::RewardBreakdown breakdown;
  flightdyn::AircraftState state;
  double min_nz_g = 0.0;  // lowest load factor seen during the substeps
  Termination reason = Termination::none;
};

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

struct InitialCondition {
  double phi_rad = 0.0;
  double gamma_rad = 0.0;
  double airspeed_ms = 120.0;
  double altitude_m = 4000.0;
};

// Episodic upset-recovery environment: 10 Hz stick commands over 50 Hz
// physics, reward from the active spec, termination ladder
// g-violation -> envelope -> success -> timeout.
class UpsetEnv {
 public:
  UpsetEnv(EnvConfig cfg, uint64_t seed);

  Observation reset();  // sampled upset, sampled altitude
  Observation reset(const InitialCondition& ic);
  StepOutcome step(const flightdyn::ControlCommand& action);

  bool done() const { return done_; }
  double time_s() const { return state_.t; }
  const flightdyn::AircraftState& state() const { return state_; }
  const flightdyn::ControlCommand& prev_command() const { return prev_cmd_; }
  const EnvConfig& config() const { return cfg_; }
  InitialConditionSampler& sampler() { return sampler_; }
  double load_factor() const;
  Observation observe() const;

  // Builds the full state for an attitude: body velocities at the trim
  // angle of attack, pitch solved so the flight path angle comes out
  // exactly right. Exposed for tests and the classical baseline.
  static flightdyn::AircraftState upset_state(double phi_rad, double gamma_rad,
                                              double airspeed_ms, double altitude_m,
                                              double alpha_rad);

 private:
  EnvConfig cfg_;
  flightdyn::FlightModel model_;
  InitialConditionSampler sampler_;
  Rng altitude_rng_;
  flightdyn::AircraftState state_;
  Actuator actuator_;
  flightdyn::ControlCommand prev_cmd_;
  double hold_time_s_ = 0.0;
  bool started_ = false;
  bool done_ = true;

  Observation start_episode(const InitialCondition& ic);
  bool level_now() const;
};

// True iff every sample in the trailing hold window keeps attitude and
// rates inside the thresholds. dt is the spacing of the samples; the
// window must span at least hold_s.
bool success_criterion(std::span<const flightdyn::AircraftState> history, double dt,
                       const SuccessThresholds& th);

}  // namespace pars::env
