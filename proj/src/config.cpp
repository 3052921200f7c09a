#include "pars/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "pars/errors.hpp"

namespace pars::config {

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
  }
}

void save_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& what) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError(what + ": unknown key '" + item.key() + "'");
    }
  }
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

flightdyn::AeroModel aero_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("aero profile: expected a JSON object");
  flightdyn::AeroModel m;
  const std::set<std::string> known = {
      "name",         "mass_kg",     "wing_area_m2", "span_m",
      "chord_m",      "ixx_kgm2",    "iyy_kgm2",     "izz_kgm2",
      "air_density_kgm3", "cl0",     "cl_alpha",     "cl_de",
      "cd0",          "k_induced",   "cy_beta",      "cl_flat",
      "croll_da",
      "croll_p",      "cm0",         "cm_alpha",     "cm_q",
      "cm_de",        "cn_beta",     "cn_r",         "alpha_stall_rad",
      "aileron_max_rad", "elevator_max_rad", "thrust_max_n",
      "trim_v_min",   "trim_v_max"};
  reject_unknown_keys(j, known, "aero profile");
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError("'name' must be a string");
    m.name = j.at("name").get<std::string>();
  }
  m.mass_kg = get_number(j, "mass_kg", m.mass_kg);
  m.wing_area_m2 = get_number(j, "wing_area_m2", m.wing_area_m2);
  m.span_m = get_number(j, "span_m", m.span_m);
  m.chord_m = get_number(j, "chord_m", m.chord_m);
  m.ixx_kgm2 = get_number(j, "ixx_kgm2", m.ixx_kgm2);
  m.iyy_kgm2 = get_number(j, "iyy_kgm2", m.iyy_kgm2);
  m.izz_kgm2 = get_number(j, "izz_kgm2", m.izz_kgm2);
  m.air_density_kgm3 = get_number(j, "air_density_kgm3", m.air_density_kgm3);
  m.cl0 = get_number(j, "cl0", m.cl0);
  m.cl_alpha = get_number(j, "cl_alpha", m.cl_alpha);
  m.cl_de = get_number(j, "cl_de", m.cl_de);
  m.cd0 = get_number(j, "cd0", m.cd0);
  m.k_induced = get_number(j, "k_induced", m.k_induced);
  m.cy_beta = get_number(j, "cy_beta", m.cy_beta);
  m.cl_flat = get_number(j, "cl_flat", m.cl_flat);
  m.croll_da = get_number(j, "croll_da", m.croll_da);
  m.croll_p = get_number(j, "croll_p", m.croll_p);
  m.cm0 = get_number(j, "cm0", m.cm0);
  m.cm_alpha = get_number(j, "cm_alpha", m.cm_alpha);
  m.cm_q = get_number(j, "cm_q", m.cm_q);
  m.cm_de = get_number(j, "cm_de", m.cm_de);
  m.cn_beta = get_number(j, "cn_beta", m.cn_beta);
  m.cn_r = get_number(j, "cn_r", m.cn_r);
  m.alpha_stall_rad = get_number(j, "alpha_stall_rad", m.alpha_stall_rad);
  m.aileron_max_rad = get_number(j, "aileron_max_rad", m.aileron_max_rad);
  m.elevator_max_rad = get_number(j, "elevator_max_rad", m.elevator_max_rad);
  m.thrust_max_n = get_number(j, "thrust_max_n", m.thrust_max_n);
  m.trim_v_min = get_number(j, "trim_v_min", m.trim_v_min);
  m.trim_v_max = get_number(j, "trim_v_max", m.trim_v_max);
  m.validate();
  return m;
}

json aero_to_json(const flightdyn::AeroModel& m) {
  json j;
  j["name"] = m.name;
  j["mass_kg"] = m.mass_kg;
  j["wing_area_m2"] = m.wing_area_m2;
  j["span_m"] = m.span_m;
  j["chord_m"] = m.chord_m;
  j["ixx_kgm2"] = m.ixx_kgm2;
  j["iyy_kgm2"] = m.iyy_kgm2;
  j["izz_kgm2"] = m.izz_kgm2;
  j["air_density_kgm3"] = m.air_density_kgm3;
  j["cl0"] = m.cl0;
  j["cl_alpha"] = m.cl_alpha;
  j["cl_de"] = m.cl_de;
  j["cd0"] = m.cd0;
  j["k_induced"] = m.k_induced;
  j["cy_beta"] = m.cy_beta;
  j["cl_flat"] = m.cl_flat;
  j["croll_da"] = m.croll_da;
  j["croll_p"] = m.croll_p;
  j["cm0"] = m.cm0;
  j["cm_alpha"] = m.cm_alpha;
  j["cm_q"] = m.cm_q;
  j["cm_de"] = m.cm_de;
  j["cn_beta"] = m.cn_beta;
  j["cn_r"] = m.cn_r;
  j["alpha_stall_rad"] = m.alpha_stall_rad;
  j["aileron_max_rad"] = m.aileron_max_rad;
  j["elevator_max_rad"] = m.elevator_max_rad;
  j["thrust_max_n"] = m.thrust_max_n;
  j["trim_v_min"] = m.trim_v_min;
  j["trim_v_max"] = m.trim_v_max;
  return j;
}

reward::RewardSpec reward_spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("reward spec: expected a JSON object");
  reject_unknown_keys(j, {"components", "g_floor", "rate_per_second"}, "reward spec");
  if (!j.contains("components") || !j.at("components").is_array()) {
    throw ConfigError("reward spec: 'components' array required");
  }
  reward::RewardSpec spec;
  if (j.contains("rate_per_second")) {
    if (!j.at("rate_per_second").is_boolean()) {
      throw ConfigError("reward spec: 'rate_per_second' must be a boolean");
    }
    spec.rate_per_second = j.at("rate_per_second").get<bool>();
  }
  if (j.contains("g_floor") && !j.at("g_floor").is_null()) {
    if (!j.at("g_floor").is_number()) {
      throw ConfigError("reward spec: 'g_floor' must be a number");
    }
    spec.g_floor = j.at("g_floor").get<double>();
  }
  for (const auto& cj : j.at("components")) {
    if (!cj.is_object()) throw ConfigError("reward spec: components must be objects");
    reject_unknown_keys(
        cj, {"id", "source", "target", "scheme", "scale", "weight", "unit", "depends_on"},
        "reward component");
    for (const char* key : {"source", "scheme", "scale", "weight"}) {
      if (!cj.contains(key)) {
        throw ConfigError(std::string("reward component: '") + key + "' required");
      }
    }
    reward::RewardComponent c;
    c.source = reward::source_from_string(cj.at("source").get<std::string>());
    const std::string scheme = cj.at("scheme").get<std::string>();
    if (scheme == "asymptotic") {
      c.scheme = reward::Scheme::asymptotic;
    } else if (scheme == "linear") {
      c.scheme = reward::Scheme::linear;
    } else {
      throw ConfigError("reward component: unknown scheme '" + scheme + "'");
    }
    c.scale = cj.at("scale").get<double>();
    c.weight = cj.at("weight").get<double>();
    c.id = cj.contains("id") ? cj.at("id").get<std::string>()
                             : std::string(reward::to_string(c.source));
    c.target = get_number(cj, "target", 0.0);
    if (cj.contains("unit")) {
      const std::string unit = cj.at("unit").get<std::string>();
      if (unit == "radians") {
        c.unit = reward::AngleUnit::radians;
      } else if (unit == "degrees") {
        c.unit = reward::AngleUnit::degrees;
      } else {
        throw ConfigError("reward component: unknown unit '" + unit + "'");
      }
    }
    if (cj.contains("depends_on") && !cj.at("depends_on").is_null()) {
      c.depends_on = cj.at("depends_on").get<std::string>();
    }
    spec.components.push_back(std::move(c));
  }
  spec.validate();
  return spec;
}

json reward_spec_to_json(const reward::RewardSpec& spec) {
  json j;
  j["rate_per_second"] = spec.rate_per_second;
  if (spec.g_floor) j["g_floor"] = *spec.g_floor;
  j["components"] = json::array();
  for (const auto& c : spec.components) {
    json cj;
    cj["id"] = c.id;
    cj["source"] = reward::to_string(c.source);
    cj["target"] = c.target;
    cj["scheme"] = reward::to_string(c.scheme);
    cj["scale"] = c.scale;
    cj["weight"] = c.weight;
    cj["unit"] = c.unit == reward::AngleUnit::degrees ? "degrees" : "radians";
    if (c.depends_on) cj["depends_on"] = *c.depends_on;
    j["components"].push_back(std::move(cj));
  }
  return j;
}

namespace {

long get_int(const json& j, const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw ConfigError("'" + key + "' must be an integer");
  }
  return j.at(key).get<long>();
}

double get_deg_as_rad(const json& j, const std::string& key, double fallback_rad) {
  if (!j.contains(key)) return fallback_rad;
  return deg2rad(get_number(j, key, 0.0));
}

}  // namespace

env::EnvConfig env_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("env config: expected a JSON object");
  reject_unknown_keys(j,
                      {"aero", "reward", "reward_preset", "control_dt_s", "substeps",
                       "timeout_s", "success", "sampler", "actuator", "airspeed_ms",
                       "altitude_min_m", "altitude_max_m", "v_min_ms", "v_max_ms",
                       "alpha_limit_deg", "incremental_actions"},
                      "env config");
  env::EnvConfig cfg;
  if (j.contains("aero")) cfg.aero = aero_from_json(j.at("aero"));
  cfg.control_dt_s = get_number(j, "control_dt_s", cfg.control_dt_s);
  cfg.substeps = static_cast<int>(get_int(j, "substeps", cfg.substeps));
  cfg.timeout_s = get_number(j, "timeout_s", cfg.timeout_s);

  if (j.contains("reward") && j.contains("reward_preset")) {
    throw ConfigError("env config: 'reward' and 'reward_preset' are exclusive");
  }
  if (j.contains("reward")) {
    cfg.reward_spec = reward_spec_from_json(j.at("reward"));
  } else if (j.contains("reward_preset")) {
    cfg.reward_spec = reward::preset(static_cast<int>(get_int(j, "reward_preset", 4)),
                                     reward::SequentialOrder::gamma_first,
                                     cfg.control_dt_s);
  }

  if (j.contains("success")) {
    const json& s = j.at("success");
    reject_unknown_keys(s, {"max_angle_deg", "max_rate_dps", "hold_s"}, "success thresholds");
    cfg.success.max_angle_rad = get_deg_as_rad(s, "max_angle_deg", cfg.success.max_angle_rad);
    cfg.success.max_rate_rads = get_deg_as_rad(s, "max_rate_dps", cfg.success.max_rate_rads);
    cfg.success.hold_s = get_number(s, "hold_s", cfg.success.hold_s);
  }
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    reject_unknown_keys(
        s, {"phi_cells", "gamma_cells", "gamma_min_deg", "gamma_max_deg", "upset"},
        "sampler config");
    cfg.sampler.phi_cells = static_cast<int>(get_int(s, "phi_cells", cfg.sampler.phi_cells));
    cfg.sampler.gamma_cells =
        static_cast<int>(get_int(s, "gamma_cells", cfg.sampler.gamma_cells));
    cfg.sampler.gamma_min_rad = get_deg_as_rad(s, "gamma_min_deg", cfg.sampler.gamma_min_rad);
    cfg.sampler.gamma_max_rad = get_deg_as_rad(s, "gamma_max_deg", cfg.sampler.gamma_max_rad);
    if (s.contains("upset")) {
      const json& u = s.at("upset");
      reject_unknown_keys(u, {"nose_up_deg", "nose_down_deg", "bank_deg"}, "upset thresholds");
      auto& t = cfg.sampler.thresholds;
      t.nose_up_rad = get_deg_as_rad(u, "nose_up_deg", t.nose_up_rad);
      t.nose_down_rad = get_deg_as_rad(u, "nose_down_deg", t.nose_down_rad);
      t.bank_rad = get_deg_as_rad(u, "bank_deg", t.bank_rad);
    }
  }
  if (j.contains("actuator")) {
    const json& a = j.at("actuator");
    reject_unknown_keys(a, {"tau_s", "rate_limit_per_s"}, "actuator config");
    cfg.actuator.tau_s = get_number(a, "tau_s", cfg.actuator.tau_s);
    cfg.actuator.rate_limit_per_s =
        get_number(a, "rate_limit_per_s", cfg.actuator.rate_limit_per_s);
  }

  cfg.airspeed_ms = get_number(j, "airspeed_ms", cfg.airspeed_ms);
  cfg.altitude_min_m = get_number(j, "altitude_min_m", cfg.altitude_min_m);
  cfg.altitude_max_m = get_number(j, "altitude_max_m", cfg.altitude_max_m);
  cfg.v_min_ms = get_number(j, "v_min_ms", cfg.v_min_ms);
  cfg.v_max_ms = get_number(j, "v_max_ms", cfg.v_max_ms);
  cfg.alpha_limit_rad = get_deg_as_rad(j, "alpha_limit_deg", cfg.alpha_limit_rad);
  if (j.contains("incremental_actions")) {
    if (!j.at("incremental_actions").is_boolean()) {
      throw ConfigError("env config: 'incremental_actions' must be a boolean");
    }
    cfg.incremental_actions = j.at("incremental_actions").get<bool>();
  }
  cfg.validate();
  return cfg;
}

json env_config_to_json(const env::EnvConfig& cfg) {
  json j;
  j["aero"] = aero_to_json(cfg.aero);
  j["reward"] = reward_spec_to_json(cfg.reward_spec);
  j["control_dt_s"] = cfg.control_dt_s;
  j["substeps"] = cfg.substeps;
  j["timeout_s"] = cfg.timeout_s;
  j["success"] = {{"max_angle_deg", rad2deg(cfg.success.max_angle_rad)},
                  {"max_rate_dps", rad2deg(cfg.success.max_rate_rads)},
                  {"hold_s", cfg.success.hold_s}};
  j["sampler"] = {{"phi_cells", cfg.sampler.phi_cells},
                  {"gamma_cells", cfg.sampler.gamma_cells},
                  {"gamma_min_deg", rad2deg(cfg.sampler.gamma_min_rad)},
                  {"gamma_max_deg", rad2deg(cfg.sampler.gamma_max_rad)},
                  {"upset",
                   {{"nose_up_deg", rad2deg(cfg.sampler.thresholds.nose_up_rad)},
                    {"nose_down_deg", rad2deg(cfg.sampler.thresholds.nose_down_rad)},
                    {"bank_deg", rad2deg(cfg.sampler.thresholds.bank_rad)}}}};
  j["actuator"] = {{"tau_s", cfg.actuator.tau_s},
                   {"rate_limit_per_s", cfg.actuator.rate_limit_per_s}};
  j["airspeed_ms"] = cfg.airspeed_ms;
  j["altitude_min_m"] = cfg.altitude_min_m;
  j["altitude_max_m"] = cfg.altitude_max_m;
  j["v_min_ms"] = cfg.v_min_ms;
  j["v_max_ms"] = cfg.v_max_ms;
  j["alpha_limit_deg"] = rad2deg(cfg.alpha_limit_rad);
  j["incremental_actions"] = cfg.incremental_actions;
  return j;
}

}  // namespace pars::config
