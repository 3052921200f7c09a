#pragma once

// JSON config I/O for aero profiles and reward specs. Schemas are documented
// in the README; parsing is strict (unknown keys rejected) so typos fail
// loudly instead of silently falling back to defaults.

#include <filesystem>
#include <nlohmann/json.hpp>

#include "pars/env.hpp"
#include "pars/flightdyn.hpp"
#include "pars/reward.hpp"

namespace pars::config {

using json = nlohmann::json;

// Throws IoError if the file is missing/unreadable, ConfigError on bad JSON.
json load_json_file(const std::filesystem::path& path);

// Writes pretty-printed JSON, creating parent directories as needed.
void save_json_file(const std::filesystem::path& path, const json& j);

// Aero profile. Every field of AeroModel is a key; omitted keys keep the
// default jet-trainer value, unknown keys are rejected.
flightdyn::AeroModel aero_from_json(const json& j);
json aero_to_json(const flightdyn::AeroModel& m);

// Reward spec. Validated before return.
reward::RewardSpec reward_spec_from_json(const json& j);
json reward_spec_to_json(const reward::RewardSpec& spec);

// Environment config. Angles are degrees in JSON, radians in the struct.
// Nested objects ("aero", "reward", "success", "sampler", "actuator")
// override partially like the top level; a "reward_preset" integer picks
// a preset instead of (and exclusive with) an explicit "reward" object.
env::EnvConfig env_config_from_json(const json& j);
json env_config_to_json(const env::EnvConfig& cfg);

}  // namespace pars::config
