#pragma once

// Soft actor-critic: squashed-Gaussian policy, twin critics with soft
// target updates, auto-tuned entropy temperature, uniform replay, and a
// deterministic single-threaded training loop.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pars/nn.hpp"
#include "pars/rng.hpp"

namespace pars::sac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SacConfig {
  int batch_size = 128;
  int buffer_size = 10000;
  double discount = 0.9;                      // serialized as "gamma"
  double learning_rate = 4.83785052402479e-4;
  long learning_starts = 10000;
  double log_std_init = -2.193334342451813;
  std::vector<int> net_arch = {64, 64};
  double tau = 0.08;
  long train_freq = 512;                      // env steps between update bursts
  long gradient_steps = 512;                  // updates per burst
  long total_steps = 300000;
  uint64_t seed = 1;
  long eval_interval = 10000;
  int eval_episodes = 5;

  void validate() const;
};

SacConfig sac_config_from_json(const nlohmann::json& j);
nlohmann::json sac_config_to_json(const SacConfig& cfg);

// Minimal episodic environment surface the learner trains against.
struct RlEnv {
  virtual ~RlEnv() = default;
  virtual int observation_size() const = 0;
  virtual int action_size() const = 0;
  virtual Vector reset() = 0;
  struct Step {
    Vector obs;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
  };
  virtual Step step(const Vector& action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<RlEnv>(uint64_t seed)>;

struct Transition {
  Vector obs;
  Vector action;
  double reward = 0.0;
  Vector next_obs;
  bool done = false;   // true termination only, never truncation
};

struct Batch {
  Matrix obs;        // obs_dim x B
  Matrix action;     // act_dim x B
  Vector reward;     // B
  Matrix next_obs;   // obs_dim x B
  Vector done;       // B, 1.0 for true termination
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);
  void push(Transition t);
  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& at(size_t i) const { return data_.at(i); }
  // Distinct uniform indices via Floyd's algorithm.
  std::vector<size_t> sample_indices(size_t batch, Rng& rng) const;
  Batch gather(const std::vector<size_t>& indices) const;

 private:
  size_t capacity_;
  size_t write_ = 0;
  std::vector<Transition> data_;
};

struct GaussianPolicy {
  nn::Mlp<double> net;   // obs -> [mean; log_std], 2 * act_dim outputs
  int act_dim = 0;
  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;

  static GaussianPolicy make(int obs_dim, int act_dim,
                             const std::vector<int>& arch,
                             double log_std_init, Rng& rng);

  struct Sample {
    Vector action;
    double log_prob = 0.0;
  };
  Sample sample(const Vector& obs, Rng& rng) const;
  Vector mean_action(const Vector& obs) const;
  // Log density of an arbitrary in-range action under pi(.|obs).
  double log_prob(const Vector& obs, const Vector& action) const;
};

// target' = (1 - tau) * target + tau * online, parameter-wise.
void soft_update(nn::Mlp<double>& target, const nn::Mlp<double>& online,
                 double tau);

struct Losses {
  double critic = 0.0;
  double actor = 0.0;
  double alpha_loss = 0.0;
  double alpha = 0.0;
  bool finite = true;
};

class SacLearner {
 public:
  SacLearner(const SacConfig& cfg, int obs_dim, int act_dim);

  const GaussianPolicy& policy() const { return policy_; }
  GaussianPolicy& policy() { return policy_; }
  nn::Mlp<double>& critic1() { return q1_; }
  nn::Mlp<double>& critic2() { return q2_; }
  nn::Mlp<double>& target1() { return q1t_; }
  nn::Mlp<double>& target2() { return q2t_; }
  double alpha() const { return alpha_; }
  void set_alpha(double a);
  double target_entropy() const { return target_entropy_; }
  long nonfinite_updates() const { return nonfinite_updates_; }
  Rng& rng() { return rng_; }

  // y = r + (1 - done) * discount * (min(Q'1, Q'2)(s', a') - alpha * log pi),
  // with a' freshly sampled from the current policy.
  Vector compute_targets(const Batch& batch);

  // Critics, then actor, then temperature, then soft target update.
  Losses update(const Batch& batch);

 private:
  struct PolicyEval {
    Matrix mu, log_std, sigma, xi, z, a, clamp_mask;
    Vector log_prob;
  };
  PolicyEval eval_policy(const Matrix& obs, nn::GradientTape<double>* tape);

  SacConfig cfg_;
  int obs_dim_, act_dim_;
  GaussianPolicy policy_;
  nn::Mlp<double> q1_, q2_, q1t_, q2t_;
  nn::AdamState<double> opt_pi_, opt_q1_, opt_q2_;
  nn::GradientTape<double> tape_pi_, tape_q1_, tape_q2_, tape_a1_, tape_a2_;
  double log_alpha_ = 0.0;
  double alpha_ = 1.0;
  double alpha_m_ = 0.0, alpha_v_ = 0.0;
  long alpha_steps_ = 0;
  double target_entropy_;
  long nonfinite_updates_ = 0;
  Rng rng_;
};

struct CurvePoint {
  long step = 0;
  double episode_return = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
};

void write_curve_csv(const std::string& path,
                     const std::vector<CurvePoint>& curve);

struct EvalRecord {
  long step = 0;
  double mean_return = 0.0;
  std::vector<double> returns;
};

struct TrainResult {
  std::vector<CurvePoint> curve;       // one row per finished episode
  std::vector<EvalRecord> evals;
  GaussianPolicy final_policy;
  GaussianPolicy best_policy;
  long best_step = 0;
  double best_eval = 0.0;
  long total_env_steps = 0;
  long gradient_updates = 0;
  long nonfinite_updates = 0;
  double wall_seconds = 0.0;
};

// Return false to stop training after this evaluation (early stopping).
using ProgressFn = std::function<bool(long step, const EvalRecord&)>;

// Runs total_steps interactions: uniform actions until learning_starts,
// then a gradient burst every train_freq steps and a deterministic
// evaluation every eval_interval steps (best checkpoint kept by mean
// return). Deterministic for a fixed config and seed.
TrainResult train(const EnvFactory& factory, const SacConfig& cfg,
                  const ProgressFn& on_eval = nullptr);

// Deterministic rollout of the policy mean; returns the episode return.
double evaluate_episode(RlEnv& env, const GaussianPolicy& policy,
                        long max_steps = 1000000);

// Trained-policy checkpoint: weights plus everything needed to rebuild
// the run (learner config, an opaque environment description, counters).
struct Checkpoint {
  GaussianPolicy policy;
  SacConfig config;
  nlohmann::json env = nlohmann::json::object();
  long trained_steps = 0;
  double best_eval = 0.0;
};

nlohmann::json checkpoint_to_json(const Checkpoint& ck);
// Rejects missing/foreign format tags and unsupported versions.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pars::sac
