#pragma once

// Adapts UpsetEnv to the learner-facing RlEnv surface: 12-entry scaled
// observation in, [aileron, elevator] stick commands out.

#include <memory>
#include <optional>

#include "pars/env.hpp"
#include "pars/sac.hpp"

namespace pars::sac {

inline Vector observation_vector(const env::Observation& obs) {
  Vector v(env::Observation::kSize);
  for (int i = 0; i < env::Observation::kSize; ++i) v(i) = obs.v[static_cast<size_t>(i)];
  return v;
}

class UpsetTask : public RlEnv {
 public:
  UpsetTask(const env::EnvConfig& cfg, uint64_t seed,
            std::optional<env::InitialCondition> fixed_ic = std::nullopt)
      : env_(cfg, seed), fixed_ic_(fixed_ic) {}

  int observation_size() const override { return env::Observation::kSize; }
  int action_size() const override { return 2; }

  Vector reset() override {
    const env::Observation obs = fixed_ic_ ? env_.reset(*fixed_ic_) : env_.reset();
    return observation_vector(obs);
  }

  Step step(const Vector& action) override {
    if (action.size() != 2) throw std::invalid_argument("upset task: expected 2 actions");
    const env::StepOutcome out = env_.step({action(0), action(1)});
    return {observation_vector(out.observation), out.reward, out.terminated, out.truncated};
  }

  const env::UpsetEnv& env() const { return env_; }
  env::UpsetEnv& env() { return env_; }

 private:
  env::UpsetEnv env_;
  std::optional<env::InitialCondition> fixed_ic_;
};

inline EnvFactory upset_env_factory(env::EnvConfig cfg) {
  return [cfg](uint64_t seed) -> std::unique_ptr<RlEnv> {
    return std::make_unique<UpsetTask>(cfg, seed);
  };
}

}  // namespace pars::sac
