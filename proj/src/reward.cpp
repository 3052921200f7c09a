#include "pars/reward.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "pars/errors.hpp"

namespace pars::reward {

const char* to_string(Source s) {
  switch (s) {
    case Source::phi: return "phi";
    case Source::gamma: return "gamma";
    case Source::aileron_rate: return "aileron_rate";
    case Source::elevator_rate: return "elevator_rate";
  }
  return "?";
}

const char* to_string(Scheme s) {
  return s == Scheme::asymptotic ? "asymptotic" : "linear";
}

Source source_from_string(const std::string& s) {
  if (s == "phi") return Source::phi;
  if (s == "gamma") return Source::gamma;
  if (s == "aileron_rate") return Source::aileron_rate;
  if (s == "elevator_rate") return Source::elevator_rate;
  throw ConfigError("reward spec: unknown source '" + s + "'");
}

namespace {

bool is_angular(Source s) { return s == Source::phi || s == Source::gamma; }

}  // namespace

const RewardComponent* RewardSpec::find(const std::string& id) const {
  for (const auto& c : components) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void RewardSpec::validate() const {
  if (components.empty()) {
    throw ConfigError("reward spec: at least one component required");
  }
  std::map<std::string, const RewardComponent*> by_id;
  for (const auto& c : components) {
    if (c.id.empty()) throw ConfigError("reward spec: component id must not be empty");
    if (!by_id.emplace(c.id, &c).second) {
      throw ConfigError("reward spec: duplicate component id '" + c.id + "'");
    }
    if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
      throw ConfigError("reward spec: component '" + c.id + "' scale must be > 0");
    }
    if (!std::isfinite(c.weight) || c.weight == 0.0) {
      throw ConfigError("reward spec: component '" + c.id + "' weight must be nonzero");
    }
    if (!std::isfinite(c.target)) {
      throw ConfigError("reward spec: component '" + c.id + "' target must be finite");
    }
  }
  double positive_sum = 0.0;
  for (const auto& c : components) {
    if (c.weight > 0.0) positive_sum += c.weight;
    if (!c.depends_on) continue;
    if (c.weight < 0.0) {
      throw ConfigError("reward spec: punishment '" + c.id + "' cannot be sequential");
    }
    auto it = by_id.find(*c.depends_on);
    if (it == by_id.end()) {
      throw ConfigError("reward spec: '" + c.id + "' depends on unknown component '" +
                        *c.depends_on + "'");
    }
    if (it->second == &c) {
      throw ConfigError("reward spec: '" + c.id + "' cannot depend on itself");
    }
    if (it->second->depends_on) {
      throw ConfigError("reward spec: dependency chains deeper than one are not supported ('" +
                        c.id + "' -> '" + *c.depends_on + "' -> ...)");
    }
    if (it->second->weight < 0.0) {
      throw ConfigError("reward spec: '" + c.id + "' cannot depend on a punishment");
    }
  }
  if (std::abs(positive_sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "reward spec: positive weights must sum to 1 (got " << positive_sum << ")";
    throw ConfigError(msg.str());
  }
  if (g_floor && !std::isfinite(*g_floor)) {
    throw ConfigError("reward spec: g_floor must be finite");
  }
}

double absolute_error(double x, double target, bool angular) {
  if (!std::isfinite(x) || !std::isfinite(target)) {
    throw std::invalid_argument("absolute_error: non-finite input");
  }
  if (angular) return std::abs(wrap_pi(target - x));
  return std::abs(target - x);
}

double asymptotic_error(double e_abs, double scale) {
  const double e_scaled = e_abs / scale;
  return e_scaled / (1.0 + e_scaled);
}

double linear_error(double e_abs, double max_err) {
  return std::min(e_abs / max_err, 1.0);
}

double sequential_modulate(double base_reward, double dependent_reward, double weight) {
  return weight * base_reward * dependent_reward;
}

RewardBreakdown total_reward(const RewardSpec& spec, double phi, double gamma,
                             const flightdyn::ControlCommand& action,
                             const flightdyn::ControlCommand& prev_action, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("total_reward: dt must be > 0");

  RewardBreakdown out;
  out.components.reserve(spec.components.size());

  // First pass: per-component errors and un-gated rewards.
  for (const auto& c : spec.components) {
    double e_abs = 0.0;
    switch (c.source) {
      case Source::phi:
        e_abs = absolute_error(phi, c.target, true);
        break;
      case Source::gamma:
        e_abs = absolute_error(gamma, c.target, true);
        break;
      case Source::aileron_rate: {
        const double delta = std::abs(action.aileron - prev_action.aileron);
        e_abs = spec.rate_per_second ? delta / dt : delta;
        break;
      }
      case Source::elevator_rate: {
        const double delta = std::abs(action.elevator - prev_action.elevator);
        e_abs = spec.rate_per_second ? delta / dt : delta;
        break;
      }
    }
    if (is_angular(c.source) && c.unit == AngleUnit::degrees) e_abs = rad2deg(e_abs);

    ComponentResult r;
    r.id = c.id;
    r.e_abs = e_abs;
    r.error = c.scheme == Scheme::asymptotic ? asymptotic_error(e_abs, c.scale)
                                             : linear_error(e_abs, c.scale);
    r.reward = 1.0 - r.error;
    out.components.push_back(std::move(r));
  }

  // Second pass: weighted contributions with sequential gating.
  for (size_t i = 0; i < spec.components.size(); ++i) {
    const auto& c = spec.components[i];
    auto& r = out.components[i];
    if (c.weight < 0.0) {
      r.contribution = c.weight * r.error;
    } else if (c.depends_on) {
      double dep_reward = 0.0;
      for (size_t j = 0; j < spec.components.size(); ++j) {
        if (spec.components[j].id == *c.depends_on) {
          dep_reward = out.components[j].reward;
          break;
        }
      }
      r.contribution = sequential_modulate(r.reward, dep_reward, c.weight);
    } else {
      r.contribution = c.weight * r.reward;
    }
    out.total += r.contribution;
  }
  return out;
}

RewardSpec preset(int iteration, SequentialOrder order, double control_dt,
                  bool rate_per_second) {
  if (iteration < 1 || iteration > 4) {
    throw ConfigError("reward preset: iteration must be 1..4");
  }
  if (!(control_dt > 0.0)) throw ConfigError("reward preset: control_dt must be > 0");

  // Maximum command-rate error: a full stick reversal within one control
  // period.
  const double max_rate = rate_per_second ? 2.0 / control_dt : 2.0;

  auto attitude = [](const char* id, Source src, double scale, double weight) {
    RewardComponent c;
    c.id = id;
    c.source = src;
    c.scheme = Scheme::asymptotic;
    c.scale = scale;
    c.weight = weight;
    return c;
  };
  auto punishment = [max_rate](const char* id, Source src) {
    RewardComponent c;
    c.id = id;
    c.source = src;
    c.scheme = Scheme::linear;
    c.scale = max_rate;
    c.weight = -0.1;
    return c;
  };

  RewardSpec spec;
  spec.rate_per_second = rate_per_second;

  const double phi_scale = 0.157;
  const double gamma_scale = 4.5;

  switch (iteration) {
    case 1:
      spec.components = {attitude("phi", Source::phi, phi_scale, 0.5),
                         attitude("gamma", Source::gamma, gamma_scale, 0.5)};
      break;
    case 2:
      spec.components = {attitude("phi", Source::phi, phi_scale, 0.5),
                         attitude("gamma", Source::gamma, gamma_scale, 0.5),
                         punishment("aileron_rate", Source::aileron_rate),
                         punishment("elevator_rate", Source::elevator_rate)};
      break;
    case 3:
      spec.components = {attitude("phi", Source::phi, phi_scale, 0.5),
                         attitude("gamma", Source::gamma, gamma_scale, 0.5),
                         punishment("aileron_rate", Source::aileron_rate),
                         punishment("elevator_rate", Source::elevator_rate)};
      if (order == SequentialOrder::gamma_first) {
        spec.components[0].depends_on = "gamma";
      } else {
        spec.components[1].depends_on = "phi";
      }
      break;
    case 4:
      spec.components = {attitude("phi", Source::phi, phi_scale, 0.25),
                         attitude("gamma", Source::gamma, gamma_scale, 0.75),
                         punishment("aileron_rate", Source::aileron_rate),
                         punishment("elevator_rate", Source::elevator_rate)};
      spec.components[0].depends_on = "gamma";
      spec.g_floor = -2.0;
      break;
  }
  spec.validate();
  return spec;
}

}  // namespace pars::reward
