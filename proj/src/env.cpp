#include "pars/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pars/errors.hpp"

namespace pars::env {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::none: return "none";
    case Termination::g_violation: return "g_violation";
    case Termination::envelope: return "envelope";
    case Termination::success: return "success";
    case Termination::timeout: return "timeout";
  }
  return "?";
}

InitialConditionSampler::InitialConditionSampler(SamplerConfig cfg, uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  if (cfg_.phi_cells < 1 || cfg_.gamma_cells < 1) {
    throw ConfigError("sampler: cell counts must be positive");
  }
  if (!(cfg_.gamma_max_rad > cfg_.gamma_min_rad)) {
    throw ConfigError("sampler: gamma range must be nonempty");
  }
  const double dphi = 2.0 * kPi / cfg_.phi_cells;
  const double dgam = (cfg_.gamma_max_rad - cfg_.gamma_min_rad) / cfg_.gamma_cells;
  for (int i = 0; i < cfg_.phi_cells; ++i) {
    const double phi_lo = -kPi + i * dphi;
    const double phi_hi = phi_lo + dphi;
    for (int j = 0; j < cfg_.gamma_cells; ++j) {
      const double gam_lo = cfg_.gamma_min_rad + j * dgam;
      const double gam_hi = gam_lo + dgam;
      // Keep the cell only if no point of it is inside the normal
      // envelope, i.e. the cell and the normal box do not intersect.
      const bool phi_overlaps =
          phi_lo < cfg_.thresholds.bank_rad && phi_hi > -cfg_.thresholds.bank_rad;
      const bool gam_overlaps = gam_lo < cfg_.thresholds.nose_up_rad &&
                                gam_hi > -cfg_.thresholds.nose_down_rad;
      if (!(phi_overlaps && gam_overlaps)) {
        cells_.push_back(i * cfg_.gamma_cells + j);
      }
    }
  }
  if (cells_.empty()) {
    throw ConfigError("sampler: no cell lies fully outside the normal envelope");
  }
  order_.resize(cells_.size());
  for (size_t k = 0; k < order_.size(); ++k) order_[k] = static_cast<int>(k);
  reshuffle();
}

void InitialConditionSampler::reshuffle() {
  for (size_t k = order_.size(); k > 1; --k) {
    std::swap(order_[k - 1], order_[rng_.below(k)]);
  }
  cursor_ = 0;
}

InitialConditionSampler::Sample InitialConditionSampler::next() {
  if (cursor_ >= order_.size()) reshuffle();
  const int cell = cells_[order_[cursor_++]];
  const int i = cell / cfg_.gamma_cells;
  const int j = cell % cfg_.gamma_cells;
  const double dphi = 2.0 * kPi / cfg_.phi_cells;
  const double dgam = (cfg_.gamma_max_rad - cfg_.gamma_min_rad) / cfg_.gamma_cells;
  // phi cells are (lo, hi], gamma cells [lo, hi): both draws stay in-cell.
  const double phi = (-kPi + (i + 1) * dphi) - rng_.uniform() * dphi;
  const double gamma = (cfg_.gamma_min_rad + j * dgam) + rng_.uniform() * dgam;
  return Sample{phi, gamma, cell};
}

int InitialConditionSampler::cell_of(double phi_rad, double gamma_rad) const {
  const double dphi = 2.0 * kPi / cfg_.phi_cells;
  const double dgam = (cfg_.gamma_max_rad - cfg_.gamma_min_rad) / cfg_.gamma_cells;
  const int i = static_cast<int>(std::ceil((phi_rad + kPi) / dphi)) - 1;
  const int j = static_cast<int>(std::floor((gamma_rad - cfg_.gamma_min_rad) / dgam));
  if (i < 0 || i >= cfg_.phi_cells || j < 0 || j >= cfg_.gamma_cells) return -1;
  const int cell = i * cfg_.gamma_cells + j;
  return std::find(cells_.begin(), cells_.end(), cell) != cells_.end() ? cell : -1;
}

Actuator::Actuator(ActuatorConfig cfg, flightdyn::ControlCommand initial)
    : cfg_(cfg), pos_(initial.clamped()) {
  if (!(cfg_.tau_s > 0.0) || !(cfg_.rate_limit_per_s > 0.0)) {
    throw ConfigError("actuator: tau and rate limit must be positive");
  }
}

flightdyn::ControlCommand Actuator::advance(const flightdyn::ControlCommand& commanded,
                                            double dt) {
  const flightdyn::ControlCommand c = commanded.clamped();
  const double max_step = cfg_.rate_limit_per_s * dt;
  auto track = [&](double pos, double cmd) {
    const double desired = (dt / cfg_.tau_s) * (cmd - pos);
    return clamp(pos + clamp(desired, -max_step, max_step), -1.0, 1.0);
  };
  pos_.aileron = track(pos_.aileron, c.aileron);
  pos_.elevator = track(pos_.elevator, c.elevator);
  return pos_;
}

void EnvConfig::validate() const {
  aero.validate();
  reward_spec.validate();
  if (!(control_dt_s > 0.0) || substeps < 1) {
    throw ConfigError("env: control_dt_s must be positive and substeps >= 1");
  }
  if (control_dt_s / substeps > 0.05) {
    throw ConfigError("env: physics step exceeds the integrator limit of 0.05 s");
  }
  if (!(timeout_s > 0.0)) throw ConfigError("env: timeout_s must be positive");
  if (!(altitude_max_m >= altitude_min_m) || !(altitude_min_m > 0.0)) {
    throw ConfigError("env: altitude band must be positive and ordered");
  }
  if (!(v_min_ms > 0.0 && v_max_ms > v_min_ms)) {
    throw ConfigError("env: speed envelope must satisfy 0 < v_min < v_max");
  }
  if (!(airspeed_ms > v_min_ms && airspeed_ms < v_max_ms)) {
    throw ConfigError("env: trim airspeed must sit inside the speed envelope");
  }
}

UpsetEnv::UpsetEnv(EnvConfig cfg, uint64_t seed)
    : cfg_(std::move(cfg)),
      model_(cfg_.aero),
      sampler_(cfg_.sampler, derive_seed(seed, 1)),
      altitude_rng_(derive_seed(seed, 2)),
      actuator_(cfg_.actuator, {}) {
  cfg_.validate();
}

flightdyn::AircraftState UpsetEnv::upset_state(double phi_rad, double gamma_rad,
                                               double airspeed_ms, double altitude_m,
                                               double alpha_rad) {
  // With v = 0: sin(gamma) = cos(a) sin(th) - sin(a) cos(phi) cos(th).
  // Written as A sin(th) + B cos(th) = R sin(th + d), solve for theta.
  const double a = std::cos(alpha_rad);
  const double b = -std::sin(alpha_rad) * std::cos(phi_rad);
  const double r = std::sqrt(a * a + b * b);
  const double s = std::sin(gamma_rad) / r;
  if (!(std::abs(s) <= 1.0)) {
    std::ostringstream msg;
    msg << "initial condition: gamma " << rad2deg(gamma_rad)
        << " deg is unreachable at alpha " << rad2deg(alpha_rad) << " deg";
    throw ConfigError(msg.str());
  }
  flightdyn::AircraftState st;
  st.phi = wrap_pi(phi_rad);
  st.theta = std::asin(s) - std::atan2(b, a);
  st.u = airspeed_ms * std::cos(alpha_rad);
  st.w = airspeed_ms * std::sin(alpha_rad);
  st.h = altitude_m;
  if (std::abs(st.theta) >= kPi / 2.0 - 1e-4) {
    throw ConfigError("initial condition: pitch attitude hits the Euler guard");
  }
  return st;
}

Observation UpsetEnv::start_episode(const InitialCondition& ic) {
  if (std::abs(ic.gamma_rad) > deg2rad(85.0)) {
    throw ConfigError("initial condition: |gamma| must be at most 85 deg");
  }
  if (!(ic.altitude_m > 0.0)) {
    throw ConfigError("initial condition: altitude must be positive");
  }
  if (!(ic.airspeed_ms > cfg_.v_min_ms && ic.airspeed_ms < cfg_.v_max_ms)) {
    throw ConfigError("initial condition: airspeed outside the simulable envelope");
  }

  const flightdyn::TrimResult trim = model_.trim(ic.airspeed_ms, ic.altitude_m);
  model_.set_thrust(trim.thrust_n);
  state_ = upset_state(ic.phi_rad, ic.gamma_rad, ic.airspeed_ms, ic.altitude_m,
                       trim.state.alpha());
  actuator_ = Actuator(cfg_.actuator, trim.command);
  prev_cmd_ = {};
  hold_time_s_ = 0.0;
  started_ = true;
  done_ = false;
  return observe();
}

Observation UpsetEnv::reset() {
  const auto s = sampler_.next();
  InitialCondition ic;
  ic.phi_rad = s.phi_rad;
  ic.gamma_rad = s.gamma_rad;
  ic.airspeed_ms = cfg_.airspeed_ms;
  ic.altitude_m = altitude_rng_.uniform(cfg_.altitude_min_m, cfg_.altitude_max_m);
  return start_episode(ic);
}

Observation UpsetEnv::reset(const InitialCondition& ic) { return start_episode(ic); }

double UpsetEnv::load_factor() const {
  return model_.load_factor(state_, actuator_.position());
}

bool UpsetEnv::level_now() const {
  const double gamma = flightdyn::flight_path_angle(state_);
  return std::abs(state_.phi) < cfg_.success.max_angle_rad &&
         std::abs(gamma) < cfg_.success.max_angle_rad &&
         std::abs(state_.p) < cfg_.success.max_rate_rads &&
         std::abs(state_.q) < cfg_.success.max_rate_rads &&
         std::abs(state_.r) < cfg_.success.max_rate_rads;
}

Observation UpsetEnv::observe() const {
  const double v = state_.airspeed();
  const std::array<double, Observation::kSize> raw = {
      state_.phi,
      state_.theta,
      flightdyn::flight_path_angle(state_),
      state_.p,
      state_.q,
      state_.r,
      state_.alpha(),
      state_.beta(),
      v,
      load_factor(),
      prev_cmd_.aileron,
      prev_cmd_.elevator,
  };
  Observation obs;
  for (int i = 0; i < Observation::kSize; ++i) {
    obs.v[i] = clamp(raw[i] / kObsDivisors[i], -kObsClamp, kObsClamp);
  }
  return obs;
}

StepOutcome UpsetEnv::step(const flightdyn::ControlCommand& action) {
  if (!started_) throw std::logic_error("env: step before reset");
  if (done_) throw std::logic_error("env: step after episode end");
  if (!action.finite()) throw std::invalid_argument("env: non-finite action");

  flightdyn::ControlCommand cmd = action.clamped();
  if (cfg_.incremental_actions) {
    cmd = flightdyn::ControlCommand{prev_cmd_.aileron + cmd.aileron,
                                    prev_cmd_.elevator + cmd.elevator}
              .clamped();
  }

  const double sub_dt = cfg_.control_dt_s / cfg_.substeps;
  Termination reason = Termination::none;
  double min_nz = load_factor();

  for (int k = 0; k < cfg_.substeps; ++k) {
    const flightdyn::ControlCommand surface = actuator_.advance(cmd, sub_dt);
    state_ = model_.step(state_, surface, sub_dt);
    const double nz = model_.load_factor(state_, surface);
    min_nz = std::min(min_nz, nz);

    if (cfg_.reward_spec.g_floor && nz < *cfg_.reward_spec.g_floor) {
      reason = Termination::g_violation;
      break;
    }
    const double v = state_.airspeed();
    if (state_.h <= 0.0 || std::abs(state_.alpha()) > cfg_.alpha_limit_rad ||
        v < cfg_.v_min_ms || v > cfg_.v_max_ms) {
      reason = Termination::envelope;
      break;
    }
  }

  StepOutcome out;
  out.info.breakdown = reward::total_reward(
      cfg_.reward_spec, state_.phi, flightdyn::flight_path_angle(state_), cmd,
      prev_cmd_, cfg_.control_dt_s);

  if (reason == Termination::none) {
    if (level_now()) {
      hold_time_s_ += cfg_.control_dt_s;
      if (hold_time_s_ >= cfg_.success.hold_s - 1e-9) reason = Termination::success;
    } else {
      hold_time_s_ = 0.0;
    }
  }

  prev_cmd_ = cmd;
  out.info.state = state_;
  out.info.min_nz_g = min_nz;

  if (reason == Termination::envelope) {
    // Terminal penalty: the step yields nothing, whatever the attitude
    // says. Component entries stay as diagnostics.
    out.info.breakdown.total = 0.0;
  }
  out.reward = out.info.breakdown.total;

  if (reason != Termination::none) {
    out.terminated = true;
  } else if (state_.t >= cfg_.timeout_s - 1e-9) {
    out.truncated = true;
    reason = Termination::timeout;
  }
  out.info.reason = reason;
  done_ = out.terminated || out.truncated;
  out.observation = observe();
  return out;
}

bool success_criterion(std::span<const flightdyn::AircraftState> history, double dt,
                       const SuccessThresholds& th) {
  if (!(dt > 0.0)) throw std::invalid_argument("success_criterion: dt must be positive");
  const size_t need = static_cast<size_t>(std::ceil(th.hold_s / dt)) + 1;
  if (history.size() < need) {
    throw std::invalid_argument("success_criterion: history shorter than the hold window");
  }
  for (size_t i = history.size() - need; i < history.size(); ++i) {
    const auto& s = history[i];
    if (std::abs(s.phi) >= th.max_angle_rad) return false;
    if (std::abs(flightdyn::flight_path_angle(s)) >= th.max_angle_rad) return false;
    if (std::abs(s.p) >= th.max_rate_rads || std::abs(s.q) >= th.max_rate_rads ||
        std::abs(s.r) >= th.max_rate_rads) {
      return false;
    }
  }
  return true;
}

}  // namespace pars::env
