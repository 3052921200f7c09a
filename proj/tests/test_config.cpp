#include <doctest.h>

#include "pars/config.hpp"
#include "pars/errors.hpp"

using namespace pars;
using namespace pars::config;

TEST_CASE("aero profile round-trips through JSON") {
  flightdyn::AeroModel a;
  a.name = "test-bird";
  a.mass_kg = 5200.0;
  a.cm_q = -10.5;
  const flightdyn::AeroModel b = aero_from_json(aero_to_json(a));
  CHECK(b.name == a.name);
  CHECK(b.mass_kg == a.mass_kg);
  CHECK(b.cm_q == a.cm_q);
  CHECK(b.cl_alpha == a.cl_alpha);
  CHECK(b.trim_v_max == a.trim_v_max);
}

TEST_CASE("aero profile parsing is strict") {
  CHECK_THROWS_AS(aero_from_json(json::parse(R"({"mass_kg": "heavy"})")), ConfigError);
  CHECK_THROWS_AS(aero_from_json(json::parse(R"({"mass_kgg": 4500})")), ConfigError);
  CHECK_THROWS_AS(aero_from_json(json::parse(R"({"mass_kg": -4})")), ConfigError);
  CHECK_THROWS_AS(aero_from_json(json::parse("[1,2]")), ConfigError);

  // Partial profiles inherit the remaining defaults.
  const auto m = aero_from_json(json::parse(R"({"mass_kg": 5000})"));
  CHECK(m.mass_kg == 5000.0);
  CHECK(m.wing_area_m2 == flightdyn::AeroModel{}.wing_area_m2);
}

TEST_CASE("reward spec round-trips through JSON") {
  const reward::RewardSpec p4 = reward::preset(4);
  const reward::RewardSpec back = reward_spec_from_json(reward_spec_to_json(p4));

  REQUIRE(back.components.size() == p4.components.size());
  REQUIRE(back.g_floor.has_value());
  CHECK(*back.g_floor == -2.0);
  CHECK(back.rate_per_second == p4.rate_per_second);
  for (size_t i = 0; i < p4.components.size(); ++i) {
    CHECK(back.components[i].id == p4.components[i].id);
    CHECK(back.components[i].source == p4.components[i].source);
    CHECK(back.components[i].scheme == p4.components[i].scheme);
    CHECK(back.components[i].scale == p4.components[i].scale);
    CHECK(back.components[i].weight == p4.components[i].weight);
    CHECK(back.components[i].depends_on == p4.components[i].depends_on);
  }

  const flightdyn::ControlCommand hold{0.0, 0.0};
  const double t1 = reward::total_reward(p4, 0.4, -0.2, hold, hold, 0.1).total;
  const double t2 = reward::total_reward(back, 0.4, -0.2, hold, hold, 0.1).total;
  CHECK(t1 == t2);
}

TEST_CASE("reward spec parsing validates content") {
  const char* missing_weight = R"({
    "components": [
      {"id": "phi", "source": "phi", "scheme": "asymptotic", "scale": 0.157}
    ]
  })";
  CHECK_THROWS_AS(reward_spec_from_json(json::parse(missing_weight)), ConfigError);

  const char* bad_sum = R"({
    "components": [
      {"id": "phi", "source": "phi", "scheme": "asymptotic", "scale": 0.157, "weight": 0.6},
      {"id": "gamma", "source": "gamma", "scheme": "asymptotic", "scale": 4.5, "weight": 0.6}
    ]
  })";
  CHECK_THROWS_AS(reward_spec_from_json(json::parse(bad_sum)), ConfigError);

  const char* bad_source = R"({
    "components": [
      {"id": "x", "source": "rudder", "scheme": "linear", "scale": 1.0, "weight": 1.0}
    ]
  })";
  CHECK_THROWS_AS(reward_spec_from_json(json::parse(bad_source)), ConfigError);

  const char* unknown_key = R"({
    "components": [
      {"id": "phi", "source": "phi", "scheme": "asymptotic", "scale": 0.157,
       "weight": 1.0, "wieght": 1.0}
    ]
  })";
  CHECK_THROWS_AS(reward_spec_from_json(json::parse(unknown_key)), ConfigError);
}

TEST_CASE("json file io reports path on failure") {
  CHECK_THROWS_AS(load_json_file("/nonexistent/nope.json"), IoError);

  const auto tmp = std::filesystem::temp_directory_path() / "pars_cfg_test.json";
  save_json_file(tmp, aero_to_json(flightdyn::AeroModel{}));
  const auto j = load_json_file(tmp);
  CHECK(j.at("mass_kg").get<double>() == 4500.0);
  std::filesystem::remove(tmp);
}

TEST_CASE("env config round-trips through JSON with degrees at the boundary") {
  env::EnvConfig cfg;
  cfg.timeout_s = 45.0;
  cfg.success.max_angle_rad = deg2rad(1.5);
  cfg.sampler.thresholds.bank_rad = deg2rad(40.0);
  cfg.actuator.tau_s = 0.07;
  cfg.incremental_actions = true;

  const json j = env_config_to_json(cfg);
  CHECK(j.at("success").at("max_angle_deg").get<double>() == doctest::Approx(1.5));
  CHECK(j.at("sampler").at("upset").at("bank_deg").get<double>() == doctest::Approx(40.0));
  CHECK(j.at("alpha_limit_deg").get<double>() == doctest::Approx(45.0));

  const env::EnvConfig back = env_config_from_json(j);
  CHECK(back.timeout_s == 45.0);
  CHECK(back.success.max_angle_rad == doctest::Approx(deg2rad(1.5)));
  CHECK(back.sampler.thresholds.bank_rad == doctest::Approx(deg2rad(40.0)));
  CHECK(back.actuator.tau_s == 0.07);
  CHECK(back.incremental_actions);
  CHECK(back.reward_spec.components.size() == cfg.reward_spec.components.size());
}

TEST_CASE("env config parsing: presets, partial overrides, strictness") {
  const env::EnvConfig preset3 =
      env_config_from_json(json{{"reward_preset", 3}, {"timeout_s", 30.0}});
  CHECK(preset3.timeout_s == 30.0);
  CHECK(preset3.control_dt_s == 0.1);   // untouched default
  CHECK(preset3.reward_spec.components.size() ==
        reward::preset(3).components.size());

  CHECK_THROWS_AS(env_config_from_json(json{{"timout_s", 30.0}}), ConfigError);
  CHECK_THROWS_AS(env_config_from_json(json{{"sampler", {{"phi_bins", 4}}}}),
                  ConfigError);
  CHECK_THROWS_AS(
      env_config_from_json(json{{"reward_preset", 4},
                                {"reward", reward_spec_to_json(reward::preset(1))}}),
      ConfigError);
  CHECK_THROWS_AS(env_config_from_json(json{{"substeps", 0}}), ConfigError);
}
