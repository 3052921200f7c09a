#pragma once

#include <string>

#include "pars/mathutil.hpp"

namespace pars::flightdyn {

// Full rigid-body state. Body axes: x forward, y out the right wing,
// z down. Angles rad, rates rad/s, velocities m/s, altitude m, time s.
// phi and psi stay wrapped to (-pi, pi]; theta is kept inside
// (-pi/2, pi/2) by the Euler singularity guard.
struct AircraftState {
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double h = 0.0;
  double t = 0.0;

  double airspeed() const { return std::sqrt(u * u + v * v + w * w); }
  double alpha() const { return std::atan2(w, u); }
  double beta() const {
    const double vt = airspeed();
    return vt > 0.0 ? std::asin(clamp(v / vt, -1.0, 1.0)) : 0.0;
  }
  bool finite() const;
};

// Normalized stick commands, each in [-1, 1]. Positive aileron rolls
// right (positive p); positive elevator is stick back (positive q).
struct ControlCommand {
  double aileron = 0.0;
  double elevator = 0.0;

  ControlCommand clamped() const {
    return {clamp(aileron, -1.0, 1.0), clamp(elevator, -1.0, 1.0)};
  }
  bool finite() const {
    return std::isfinite(aileron) && std::isfinite(elevator);
  }
};

// Linear-plus-stall aerodynamic model of a generic jet trainer.
// Lift is blended from the linear slope to a flat-plate curve beyond
// alpha_stall. Loadable from a JSON profile (see config.hpp).
struct AeroModel {
  std::string name = "jet-trainer-default";

  double mass_kg = 4500.0;
  double wing_area_m2 = 23.0;
  double span_m = 11.0;
  double chord_m = 1.8;
  double ixx_kgm2 = 12000.0;
  double iyy_kgm2 = 20000.0;
  double izz_kgm2 = 30000.0;

  // Constant-density layer for the operating altitude band.
  double air_density_kgm3 = 1.0;

  // Lift/drag (per rad where dimensional)
  double cl0 = 0.20;
  double cl_alpha = 5.5;
  double cl_de = 0.35;
  double cd0 = 0.025;
  double k_induced = 0.06;
  double cy_beta = -0.8;

  // Amplitude of the post-stall flat-plate lift curve cl_flat * sin(2a).
  double cl_flat = 1.0;

  // Moments (roll Cl, pitch Cm, yaw Cn; rate terms per rad of
  // non-dimensional rate)
  double croll_da = 0.15;
  double croll_p = -0.45;
  double cm0 = 0.04;
  double cm_alpha = -0.8;
  double cm_q = -12.0;
  double cm_de = -1.2;
  double cn_beta = 0.09;
  double cn_r = -0.25;

  double alpha_stall_rad = 0.30;

  // Surface throw per unit of stick. Stick back maps to trailing-edge-up
  // elevator (negative surface angle), so positive stick pitches up.
  double aileron_max_rad = 0.35;
  double elevator_max_rad = 0.44;

  double thrust_max_n = 30000.0;

  // Airspeed envelope accepted by trim().
  double trim_v_min = 60.0;
  double trim_v_max = 250.0;

  void validate() const;  // throws ConfigError on bad values
};

struct TrimResult {
  AircraftState state;
  ControlCommand command;
  double thrust_n = 0.0;
  double residual = 0.0;  // max |acceleration| at the trim point
  int iterations = 0;
};

// Rigid-body model with thrust held at a fixed setting (recovery episodes
// fly at the trim thrust; there is no throttle channel).
class FlightModel {
 public:
  explicit FlightModel(AeroModel aero);

  const AeroModel& aero() const { return aero_; }
  double thrust() const { return thrust_n_; }
  void set_thrust(double newtons);

  struct Derivatives {
    double dphi, dtheta, dpsi;
    double dp, dq, dr;
    double du, dv, dw;
    double dh;
  };
  Derivatives derivatives(const AircraftState& s, const ControlCommand& surface) const;

  // One RK4 step over dt. Pure function of its inputs: same inputs give a
  // bit-identical result. dt must be in (0, 0.05].
  AircraftState step(const AircraftState& s, const ControlCommand& surface, double dt) const;

  // Normal load factor n_z = -(body-z aerodynamic force)/(m g0); +1 in
  // trimmed level flight, 0 when ballistic.
  double load_factor(const AircraftState& s, const ControlCommand& surface) const;

  // Straight-and-level equilibrium at the given airspeed/altitude, solved
  // by damped Newton iteration on (alpha, elevator, thrust). Throws
  // TrimInfeasible when no equilibrium exists (or, with enforce_envelope,
  // when the airspeed is outside the configured trim envelope).
  TrimResult trim(double airspeed, double altitude, bool enforce_envelope = true) const;

 private:
  AeroModel aero_;
  double thrust_n_ = 0.0;
};

// Earth-frame climb rate derived from attitude and body velocities.
double climb_rate(const AircraftState& s);

// Flight path angle gamma = asin(climb rate / V), in [-pi/2, pi/2].
// Requires V > 0.
double flight_path_angle(const AircraftState& s);

}  // namespace pars::flightdyn
