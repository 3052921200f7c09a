#pragma once

// Double-integrator regulator used to sanity-check the learner: 1-D force
// in [-1,1], dense reward peaking at the origin, fixed 200-step episodes
// that truncate rather than terminate.

#include "pars/mathutil.hpp"
#include "pars/rng.hpp"
#include "pars/sac.hpp"

namespace pars::testutil {

class DoubleIntegrator : public sac::RlEnv {
 public:
  explicit DoubleIntegrator(uint64_t seed) : rng_(seed) {}

  int observation_size() const override { return 2; }
  int action_size() const override { return 1; }

  sac::Vector reset() override {
    x_ = rng_.uniform(-2.0, 2.0);
    v_ = rng_.uniform(-1.0, 1.0);
    steps_ = 0;
    return obs();
  }

  Step step(const sac::Vector& action) override {
    const double u = clamp(action(0), -1.0, 1.0);
    v_ += u * kDt;
    x_ += v_ * kDt;
    ++steps_;
    const double r = 1.0 / (1.0 + 8.0 * x_ * x_ + v_ * v_);
    return {obs(), r, false, steps_ >= kEpisodeSteps};
  }

  static constexpr double kDt = 0.05;
  static constexpr int kEpisodeSteps = 200;

 private:
  sac::Vector obs() const {
    sac::Vector o(2);
    o << x_, v_;
    return o;
  }

  Rng rng_;
  double x_ = 0.0, v_ = 0.0;
  int steps_ = 0;
};

inline sac::EnvFactory double_integrator_factory() {
  return [](uint64_t seed) -> std::unique_ptr<sac::RlEnv> {
    return std::make_unique<DoubleIntegrator>(seed);
  };
}

// Mean return of uniform random actions, the baseline a learned policy
// must beat.
inline double random_policy_return(uint64_t seed, int episodes) {
  DoubleIntegrator env(seed);
  Rng act_rng(derive_seed(seed, 7));
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    while (true) {
      sac::Vector a(1);
      a << act_rng.uniform(-1.0, 1.0);
      const auto sr = env.step(a);
      total += sr.reward;
      if (sr.terminated || sr.truncated) break;
    }
  }
  return total / episodes;
}

}  // namespace pars::testutil
