#include "pars/flightdyn.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pars/errors.hpp"

namespace pars::flightdyn {

bool AircraftState::finite() const {
  return std::isfinite(phi) && std::isfinite(theta) && std::isfinite(psi) &&
         std::isfinite(p) && std::isfinite(q) && std::isfinite(r) &&
         std::isfinite(u) && std::isfinite(v) && std::isfinite(w) &&
         std::isfinite(h) && std::isfinite(t);
}

void AeroModel::validate() const {
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigError(std::string("aero profile: ") + what + " must be strictly positive");
    }
  };
  positive(mass_kg, "mass_kg");
  positive(wing_area_m2, "wing_area_m2");
  positive(span_m, "span_m");
  positive(chord_m, "chord_m");
  positive(ixx_kgm2, "ixx_kgm2");
  positive(iyy_kgm2, "iyy_kgm2");
  positive(izz_kgm2, "izz_kgm2");
  positive(air_density_kgm3, "air_density_kgm3");
  positive(aileron_max_rad, "aileron_max_rad");
  positive(elevator_max_rad, "elevator_max_rad");
  positive(thrust_max_n, "thrust_max_n");
  if (!(alpha_stall_rad > 0.0 && alpha_stall_rad < kPi / 4.0)) {
    throw ConfigError("aero profile: alpha_stall_rad must be in (0, pi/4)");
  }
  if (!(trim_v_min > 0.0 && trim_v_max > trim_v_min)) {
    throw ConfigError("aero profile: trim envelope must satisfy 0 < trim_v_min < trim_v_max");
  }
}

FlightModel::FlightModel(AeroModel aero) : aero_(std::move(aero)) {
  aero_.validate();
}

void FlightModel::set_thrust(double newtons) {
  if (!std::isfinite(newtons) || newtons < 0.0) {
    throw std::invalid_argument("thrust must be finite and non-negative");
  }
  thrust_n_ = newtons;
}

namespace {

// Smooth 0->1 blend past the stall angle (both signs), sharpness m.
double stall_blend(double alpha, double alpha_stall, double m = 30.0) {
  const double lo = std::exp(-m * (alpha - alpha_stall));
  const double hi = std::exp(m * (alpha + alpha_stall));
  return (1.0 + lo + hi) / ((1.0 + lo) * (1.0 + hi));
}

}  // namespace

FlightModel::Derivatives FlightModel::derivatives(const AircraftState& s,
                                                  const ControlCommand& surface) const {
  const AeroModel& a = aero_;
  const double vt = s.airspeed();
  if (!(vt > 1e-9)) {
    throw std::invalid_argument("flight model: airspeed must be positive to propagate");
  }

  const double alpha = s.alpha();
  const double beta = s.beta();
  const double qbar = 0.5 * a.air_density_kgm3 * vt * vt;

  // Stick to surface. Stick-back elevator is trailing-edge-up (negative).
  const double da = surface.aileron * a.aileron_max_rad;
  const double de = -surface.elevator * a.elevator_max_rad;

  // Non-dimensional rates
  const double phat = s.p * a.span_m / (2.0 * vt);
  const double qhat = s.q * a.chord_m / (2.0 * vt);
  const double rhat = s.r * a.span_m / (2.0 * vt);

  // Lift: linear slope blended into a flat-plate curve beyond the stall
  const double blend = stall_blend(alpha, a.alpha_stall_rad);
  const double cl_lin = a.cl0 + a.cl_alpha * alpha;
  const double cl_flat = a.cl_flat * std::sin(2.0 * alpha);
  const double cl = (1.0 - blend) * cl_lin + blend * cl_flat + a.cl_de * de;
  const double cd = a.cd0 + a.k_induced * cl * cl;

  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double qs = qbar * a.wing_area_m2;
  const double fx_aero = qs * (cl * sa - cd * ca);
  const double fy_aero = qs * a.cy_beta * beta;
  const double fz_aero = qs * (-cl * ca - cd * sa);

  const double mom_roll = qs * a.span_m * (a.croll_da * da + a.croll_p * phat);
  const double mom_pitch = qs * a.chord_m *
                           (a.cm0 + a.cm_alpha * alpha + a.cm_q * qhat + a.cm_de * de);
  const double mom_yaw = qs * a.span_m * (a.cn_beta * beta + a.cn_r * rhat);

  const double sphi = std::sin(s.phi), cphi = std::cos(s.phi);
  const double sth = std::sin(s.theta), cth = std::cos(s.theta);

  Derivatives d;
  d.du = s.r * s.v - s.q * s.w - kG0 * sth + (fx_aero + thrust_n_) / a.mass_kg;
  d.dv = s.p * s.w - s.r * s.u + kG0 * sphi * cth + fy_aero / a.mass_kg;
  d.dw = s.q * s.u - s.p * s.v + kG0 * cphi * cth + fz_aero / a.mass_kg;

  d.dp = ((a.iyy_kgm2 - a.izz_kgm2) * s.q * s.r + mom_roll) / a.ixx_kgm2;
  d.dq = ((a.izz_kgm2 - a.ixx_kgm2) * s.p * s.r + mom_pitch) / a.iyy_kgm2;
  d.dr = ((a.ixx_kgm2 - a.iyy_kgm2) * s.p * s.q + mom_yaw) / a.izz_kgm2;

  const double tth = sth / cth;
  d.dphi = s.p + tth * (s.q * sphi + s.r * cphi);
  d.dtheta = s.q * cphi - s.r * sphi;
  d.dpsi = (s.q * sphi + s.r * cphi) / cth;

  d.dh = s.u * sth - s.v * sphi * cth - s.w * cphi * cth;
  return d;
}

namespace {

constexpr double kThetaGuard = kPi / 2.0 - 1e-4;

AircraftState advance(const AircraftState& s, const FlightModel::Derivatives& d, double dt) {
  AircraftState n = s;
  n.phi += d.dphi * dt;
  n.theta += d.dtheta * dt;
  n.psi += d.dpsi * dt;
  n.p += d.dp * dt;
  n.q += d.dq * dt;
  n.r += d.dr * dt;
  n.u += d.du * dt;
  n.v += d.dv * dt;
  n.w += d.dw * dt;
  n.h += d.dh * dt;
  return n;
}

}  // namespace

AircraftState FlightModel::step(const AircraftState& s, const ControlCommand& surface,
                                double dt) const {
  if (!(dt > 0.0 && dt <= 0.05)) {
    throw std::invalid_argument("flight model: dt must be in (0, 0.05]");
  }
  if (!s.finite()) {
    throw std::invalid_argument("flight model: non-finite state rejected");
  }
  if (!surface.finite()) {
    throw std::invalid_argument("flight model: non-finite command rejected");
  }
  const ControlCommand c = surface.clamped();

  const Derivatives k1 = derivatives(s, c);
  const Derivatives k2 = derivatives(advance(s, k1, 0.5 * dt), c);
  const Derivatives k3 = derivatives(advance(s, k2, 0.5 * dt), c);
  const Derivatives k4 = derivatives(advance(s, k3, dt), c);

  AircraftState n = s;
  auto combine = [dt](double a, double b, double c2, double d2) {
    return dt / 6.0 * (a + 2.0 * b + 2.0 * c2 + d2);
  };
  n.phi += combine(k1.dphi, k2.dphi, k3.dphi, k4.dphi);
  n.theta += combine(k1.dtheta, k2.dtheta, k3.dtheta, k4.dtheta);
  n.psi += combine(k1.dpsi, k2.dpsi, k3.dpsi, k4.dpsi);
  n.p += combine(k1.dp, k2.dp, k3.dp, k4.dp);
  n.q += combine(k1.dq, k2.dq, k3.dq, k4.dq);
  n.r += combine(k1.dr, k2.dr, k3.dr, k4.dr);
  n.u += combine(k1.du, k2.du, k3.du, k4.du);
  n.v += combine(k1.dv, k2.dv, k3.dv, k4.dv);
  n.w += combine(k1.dw, k2.dw, k3.dw, k4.dw);
  n.h += combine(k1.dh, k2.dh, k3.dh, k4.dh);
  n.t = s.t + dt;

  n.phi = wrap_pi(n.phi);
  n.psi = wrap_pi(n.psi);
  n.theta = clamp(n.theta, -kThetaGuard, kThetaGuard);

  if (!n.finite()) {
    std::ostringstream msg;
    msg << "flight model: propagation produced a non-finite state at t=" << s.t;
    throw NumericalError(msg.str());
  }
  return n;
}

double FlightModel::load_factor(const AircraftState& s, const ControlCommand& surface) const {
  if (!s.finite() || !surface.finite()) {
    throw std::invalid_argument("load_factor: non-finite input");
  }
  const AeroModel& a = aero_;
  const double vt = s.airspeed();
  if (!(vt > 1e-9)) return 0.0;

  const ControlCommand c = surface.clamped();
  const double alpha = s.alpha();
  const double qbar = 0.5 * a.air_density_kgm3 * vt * vt;
  const double de = -c.elevator * a.elevator_max_rad;

  const double blend = stall_blend(alpha, a.alpha_stall_rad);
  const double cl = (1.0 - blend) * (a.cl0 + a.cl_alpha * alpha) +
                    blend * a.cl_flat * std::sin(2.0 * alpha) + a.cl_de * de;
  const double cd = a.cd0 + a.k_induced * cl * cl;
  const double fz_aero = qbar * a.wing_area_m2 * (-cl * std::cos(alpha) - cd * std::sin(alpha));
  return -fz_aero / (a.mass_kg * kG0);
}

double climb_rate(const AircraftState& s) {
  const double sth = std::sin(s.theta), cth = std::cos(s.theta);
  return s.u * sth - s.v * std::sin(s.phi) * cth - s.w * std::cos(s.phi) * cth;
}

double flight_path_angle(const AircraftState& s) {
  const double vt = s.airspeed();
  if (!(vt > 0.0)) {
    throw std::invalid_argument("flight_path_angle: airspeed must be positive");
  }
  return std::asin(clamp(climb_rate(s) / vt, -1.0, 1.0));
}

namespace {

AircraftState level_state(double airspeed, double altitude, double alpha) {
  AircraftState s;
  s.theta = alpha;  // theta = alpha gives gamma = 0 in symmetric flight
  s.u = airspeed * std::cos(alpha);
  s.w = airspeed * std::sin(alpha);
  s.h = altitude;
  return s;
}

}  // namespace

TrimResult FlightModel::trim(double airspeed, double altitude, bool enforce_envelope) const {
  if (!(airspeed > 0.0) || !std::isfinite(altitude)) {
    throw std::invalid_argument("trim: airspeed must be positive and altitude finite");
  }
  if (enforce_envelope && (airspeed < aero_.trim_v_min || airspeed > aero_.trim_v_max)) {
    std::ostringstream msg;
    msg << "trim: airspeed " << airspeed << " m/s outside envelope [" << aero_.trim_v_min
        << ", " << aero_.trim_v_max << "]";
    throw TrimInfeasible(msg.str());
  }

  // Unknowns: alpha, elevator stick, thrust. Residual: (udot, wdot, qdot).
  const double lo[3] = {-0.6, -1.0, 0.0};
  const double hi[3] = {0.8, 1.0, aero_.thrust_max_n};
  Eigen::Vector3d x(0.05, 0.0, 0.25 * aero_.thrust_max_n);

  auto residual = [&](const Eigen::Vector3d& y) {
    FlightModel m(aero_);
    m.thrust_n_ = y[2];
    const AircraftState s = level_state(airspeed, altitude, y[0]);
    const ControlCommand c{0.0, y[1]};
    const Derivatives d = m.derivatives(s, c);
    return Eigen::Vector3d(d.du, d.dw, d.dq);
  };

  constexpr int kMaxIter = 100;
  constexpr double kTol = 1e-8;
  Eigen::Vector3d f = residual(x);
  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    if (f.lpNorm<Eigen::Infinity>() < kTol) break;

    Eigen::Matrix3d jac;
    for (int j = 0; j < 3; ++j) {
      const double eps = (j == 2) ? std::max(1.0, 1e-7 * aero_.thrust_max_n) : 1e-7;
      Eigen::Vector3d xp = x;
      xp[j] = clamp(xp[j] + eps, lo[j], hi[j]);
      const double dstep = xp[j] - x[j];
      if (dstep == 0.0) {
        xp[j] = x[j] - eps;
        jac.col(j) = (f - residual(xp)) / eps;
      } else {
        jac.col(j) = (residual(xp) - f) / dstep;
      }
    }

    const Eigen::Vector3d delta = jac.fullPivLu().solve(-f);
    if (!delta.allFinite()) break;

    // Damped update with projection onto bounds
    double lambda = 1.0;
    const double f0 = f.norm();
    Eigen::Vector3d xn, fn;
    bool accepted = false;
    while (lambda > 1.0 / 1024.0) {
      xn = x + lambda * delta;
      for (int j = 0; j < 3; ++j) xn[j] = clamp(xn[j], lo[j], hi[j]);
      fn = residual(xn);
      if (fn.norm() < f0 * (1.0 - 1e-4 * lambda) || fn.norm() < kTol) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    x = xn;
    f = fn;
  }

  if (!(f.lpNorm<Eigen::Infinity>() < 1e-6)) {
    std::ostringstream msg;
    msg << "trim infeasible at V=" << airspeed << " m/s, h=" << altitude
        << " m (residual " << f.lpNorm<Eigen::Infinity>() << " after " << iter
        << " iterations)";
    throw TrimInfeasible(msg.str());
  }

  TrimResult out;
  out.state = level_state(airspeed, altitude, x[0]);
  out.command = ControlCommand{0.0, x[1]};
  out.thrust_n = x[2];
  out.residual = f.lpNorm<Eigen::Infinity>();
  out.iterations = iter;
  return out;
}

}  // namespace pars::flightdyn
