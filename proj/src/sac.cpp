#include "pars/sac.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "pars/errors.hpp"
#include "pars/mathutil.hpp"

namespace pars::sac {
namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2*pi)/2

// log(1 - tanh(z)^2), stable for large |z|.
double log_one_minus_tanh_sq(double z) {
  return 2.0 * (std::log(2.0) - z - softplus(-2.0 * z));
}

double get_number(const nlohmann::json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError("sac config: '" + key + "' must be a number");
  return j.at(key).get<double>();
}

long get_integer(const nlohmann::json& j, const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw ConfigError("sac config: '" + key + "' must be an integer");
  }
  return j.at(key).get<long>();
}

}  // namespace

void SacConfig::validate() const {
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("sac config: gamma must be in (0,1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("sac config: tau must be in (0,1]");
  if (batch_size < 1) throw ConfigError("sac config: batch_size must be positive");
  if (buffer_size < batch_size) throw ConfigError("sac config: batch_size exceeds buffer_size");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("sac config: learning_rate must be positive");
  }
  if (learning_starts < 0) throw ConfigError("sac config: learning_starts must be nonnegative");
  if (net_arch.empty()) throw ConfigError("sac config: net_arch must not be empty");
  for (int w : net_arch) {
    if (w < 1) throw ConfigError("sac config: net_arch widths must be positive");
  }
  if (train_freq < 1) throw ConfigError("sac config: train_freq must be positive");
  if (gradient_steps < 0) throw ConfigError("sac config: gradient_steps must be nonnegative");
  if (total_steps < 0) throw ConfigError("sac config: total_steps must be nonnegative");
  if (eval_interval < 1) throw ConfigError("sac config: eval_interval must be positive");
  if (eval_episodes < 0) throw ConfigError("sac config: eval_episodes must be nonnegative");
  if (log_std_init < GaussianPolicy::kLogStdMin || log_std_init > GaussianPolicy::kLogStdMax) {
    throw ConfigError("sac config: log_std_init outside the clamp range");
  }
}

SacConfig sac_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("sac config: expected a JSON object");
  static const std::vector<std::string> known = {
      "batch_size", "buffer_size", "gamma", "learning_rate", "learning_starts",
      "log_std_init", "net_arch", "tau", "train_freq", "gradient_steps",
      "total_steps", "seed", "eval_interval", "eval_episodes"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("sac config: unknown key '" + key + "'");
    }
  }
  SacConfig cfg;
  cfg.batch_size = static_cast<int>(get_integer(j, "batch_size", cfg.batch_size));
  cfg.buffer_size = static_cast<int>(get_integer(j, "buffer_size", cfg.buffer_size));
  cfg.discount = get_number(j, "gamma", cfg.discount);
  cfg.learning_rate = get_number(j, "learning_rate", cfg.learning_rate);
  cfg.learning_starts = get_integer(j, "learning_starts", cfg.learning_starts);
  cfg.log_std_init = get_number(j, "log_std_init", cfg.log_std_init);
  if (j.contains("net_arch")) {
    if (!j.at("net_arch").is_array()) throw ConfigError("sac config: net_arch must be an array");
    cfg.net_arch = j.at("net_arch").get<std::vector<int>>();
  }
  cfg.tau = get_number(j, "tau", cfg.tau);
  cfg.train_freq = get_integer(j, "train_freq", cfg.train_freq);
  cfg.gradient_steps = j.contains("gradient_steps")
                           ? get_integer(j, "gradient_steps", cfg.train_freq)
                           : cfg.train_freq;
  cfg.total_steps = get_integer(j, "total_steps", cfg.total_steps);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer()) throw ConfigError("sac config: seed must be an integer");
    cfg.seed = j.at("seed").get<uint64_t>();
  }
  cfg.eval_interval = get_integer(j, "eval_interval", cfg.eval_interval);
  cfg.eval_episodes = static_cast<int>(get_integer(j, "eval_episodes", cfg.eval_episodes));
  cfg.validate();
  return cfg;
}

nlohmann::json sac_config_to_json(const SacConfig& cfg) {
  return nlohmann::json{{"batch_size", cfg.batch_size},
                        {"buffer_size", cfg.buffer_size},
                        {"gamma", cfg.discount},
                        {"learning_rate", cfg.learning_rate},
                        {"learning_starts", cfg.learning_starts},
                        {"log_std_init", cfg.log_std_init},
                        {"net_arch", cfg.net_arch},
                        {"tau", cfg.tau},
                        {"train_freq", cfg.train_freq},
                        {"gradient_steps", cfg.gradient_steps},
                        {"total_steps", cfg.total_steps},
                        {"seed", cfg.seed},
                        {"eval_interval", cfg.eval_interval},
                        {"eval_episodes", cfg.eval_episodes}};
}

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay buffer: capacity must be positive");
  data_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[write_] = std::move(t);
    write_ = (write_ + 1) % capacity_;
  }
}

std::vector<size_t> ReplayBuffer::sample_indices(size_t batch, Rng& rng) const {
  const size_t n = data_.size();
  if (batch > n) throw std::invalid_argument("replay buffer: batch larger than current size");
  std::vector<size_t> out;
  out.reserve(batch);
  std::vector<char> used(n, 0);
  for (size_t j = n - batch; j < n; ++j) {
    size_t pick = static_cast<size_t>(rng.below(j + 1));
    if (used[pick]) pick = j;
    used[pick] = 1;
    out.push_back(pick);
  }
  return out;
}

Batch ReplayBuffer::gather(const std::vector<size_t>& indices) const {
  if (indices.empty()) throw std::invalid_argument("replay buffer: empty batch");
  const int obs_dim = static_cast<int>(data_.at(indices[0]).obs.size());
  const int act_dim = static_cast<int>(data_.at(indices[0]).action.size());
  const int b = static_cast<int>(indices.size());
  Batch batch;
  batch.obs.resize(obs_dim, b);
  batch.action.resize(act_dim, b);
  batch.reward.resize(b);
  batch.next_obs.resize(obs_dim, b);
  batch.done.resize(b);
  for (int i = 0; i < b; ++i) {
    const Transition& t = data_.at(indices[static_cast<size_t>(i)]);
    batch.obs.col(i) = t.obs;
    batch.action.col(i) = t.action;
    batch.reward(i) = t.reward;
    batch.next_obs.col(i) = t.next_obs;
    batch.done(i) = t.done ? 1.0 : 0.0;
  }
  return batch;
}

GaussianPolicy GaussianPolicy::make(int obs_dim, int act_dim,
                                    const std::vector<int>& arch,
                                    double log_std_init, Rng& rng) {
  if (obs_dim < 1 || act_dim < 1) throw ConfigError("policy: dimensions must be positive");
  std::vector<int> sizes;
  sizes.push_back(obs_dim);
  sizes.insert(sizes.end(), arch.begin(), arch.end());
  sizes.push_back(2 * act_dim);
  GaussianPolicy p;
  p.net = nn::Mlp<double>::he_init(sizes, rng);
  p.act_dim = act_dim;
  // Start the log-std head as a constant so sigma = exp(log_std_init)
  // exactly on a fresh policy; the weights learn from there.
  auto& last_w = p.net.weights.back();
  auto& last_b = p.net.biases.back();
  for (int i = act_dim; i < 2 * act_dim; ++i) {
    last_w.row(i).setZero();
    last_b(i) = log_std_init;
  }
  return p;
}

namespace {

void check_policy_output(const Vector& head) {
  if (!head.allFinite()) {
    std::ostringstream os;
    os << "policy network produced a non-finite output: [" << head.transpose() << "]";
    throw NumericalError(os.str());
  }
}

}  // namespace

GaussianPolicy::Sample GaussianPolicy::sample(const Vector& obs, Rng& rng) const {
  const Vector head = net.forward(obs);
  check_policy_output(head);
  Sample out;
  out.action.resize(act_dim);
  for (int i = 0; i < act_dim; ++i) {
    const double mu = head(i);
    const double log_std = clamp(head(act_dim + i), kLogStdMin, kLogStdMax);
    const double sigma = std::exp(log_std);
    const double xi = rng.normal();
    const double z = mu + sigma * xi;
    const double a = std::tanh(z);
    out.action(i) = a;
    out.log_prob += -log_std - kHalfLog2Pi - 0.5 * xi * xi - log_one_minus_tanh_sq(z);
  }
  return out;
}

Vector GaussianPolicy::mean_action(const Vector& obs) const {
  const Vector head = net.forward(obs);
  check_policy_output(head);
  Vector a(act_dim);
  for (int i = 0; i < act_dim; ++i) a(i) = std::tanh(head(i));
  return a;
}

double GaussianPolicy::log_prob(const Vector& obs, const Vector& action) const {
  if (action.size() != act_dim) throw std::invalid_argument("policy: action dimension mismatch");
  const Vector head = net.forward(obs);
  check_policy_output(head);
  double lp = 0.0;
  for (int i = 0; i < act_dim; ++i) {
    const double a = action(i);
    if (!(std::abs(a) < 1.0)) throw std::invalid_argument("policy: action outside (-1,1)");
    const double mu = head(i);
    const double log_std = clamp(head(act_dim + i), kLogStdMin, kLogStdMax);
    const double sigma = std::exp(log_std);
    const double z = std::atanh(a);
    const double xi = (z - mu) / sigma;
    lp += -log_std - kHalfLog2Pi - 0.5 * xi * xi - log_one_minus_tanh_sq(z);
  }
  return lp;
}

void soft_update(nn::Mlp<double>& target, const nn::Mlp<double>& online, double tau) {
  if (target.sizes != online.sizes) {
    throw std::invalid_argument("soft update: architecture mismatch");
  }
  for (size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = (1.0 - tau) * target.weights[l] + tau * online.weights[l];
    target.biases[l] = (1.0 - tau) * target.biases[l] + tau * online.biases[l];
  }
}

SacLearner::SacLearner(const SacConfig& cfg, int obs_dim, int act_dim)
    : cfg_([&] {
        cfg.validate();
        return cfg;
      }()),
      obs_dim_(obs_dim),
      act_dim_(act_dim),
      policy_([&] {
        Rng init_rng(derive_seed(cfg.seed, 20));
        return GaussianPolicy::make(obs_dim, act_dim, cfg.net_arch, cfg.log_std_init, init_rng);
      }()),
      q1_([&] {
        Rng init_rng(derive_seed(cfg.seed, 21));
        std::vector<int> sizes;
        sizes.push_back(obs_dim + act_dim);
        sizes.insert(sizes.end(), cfg.net_arch.begin(), cfg.net_arch.end());
        sizes.push_back(1);
        return nn::Mlp<double>::he_init(sizes, init_rng);
      }()),
      q2_([&] {
        Rng init_rng(derive_seed(cfg.seed, 22));
        return nn::Mlp<double>::he_init(q1_.sizes, init_rng);
      }()),
      q1t_(q1_),
      q2t_(q2_),
      opt_pi_(policy_.net, cfg.learning_rate),
      opt_q1_(q1_, cfg.learning_rate),
      opt_q2_(q2_, cfg.learning_rate),
      target_entropy_(-static_cast<double>(act_dim)),
      rng_(derive_seed(cfg.seed, 23)) {}

void SacLearner::set_alpha(double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  alpha_ = a;
  log_alpha_ = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
}

SacLearner::PolicyEval SacLearner::eval_policy(const Matrix& obs,
                                               nn::GradientTape<double>* tape) {
  const Matrix head = tape ? policy_.net.forward(obs, *tape) : policy_.net.forward(obs);
  const int b = static_cast<int>(obs.cols());
  const int a_dim = act_dim_;
  PolicyEval pe;
  pe.mu = head.topRows(a_dim);
  const Matrix raw = head.bottomRows(a_dim);
  pe.log_std = raw.array()
                   .max(GaussianPolicy::kLogStdMin)
                   .min(GaussianPolicy::kLogStdMax)
                   .matrix();
  pe.clamp_mask = ((raw.array() > GaussianPolicy::kLogStdMin) &&
                   (raw.array() < GaussianPolicy::kLogStdMax))
                      .cast<double>()
                      .matrix();
  pe.sigma = pe.log_std.array().exp().matrix();
  pe.xi.resize(a_dim, b);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < a_dim; ++i) pe.xi(i, j) = rng_.normal();
  }
  pe.z = pe.mu + pe.sigma.cwiseProduct(pe.xi);
  pe.a = pe.z.array().tanh().matrix();
  pe.log_prob = Vector::Zero(b);
  for (int j = 0; j < b; ++j) {
    double lp = 0.0;
    for (int i = 0; i < a_dim; ++i) {
      lp += -pe.log_std(i, j) - kHalfLog2Pi - 0.5 * pe.xi(i, j) * pe.xi(i, j) -
            log_one_minus_tanh_sq(pe.z(i, j));
    }
    pe.log_prob(j) = lp;
  }
  return pe;
}

Vector SacLearner::compute_targets(const Batch& batch) {
  const int b = static_cast<int>(batch.obs.cols());
  const PolicyEval next = eval_policy(batch.next_obs, nullptr);
  Matrix input(obs_dim_ + act_dim_, b);
  input.topRows(obs_dim_) = batch.next_obs;
  input.bottomRows(act_dim_) = next.a;
  const Matrix q1 = q1t_.forward(input);
  const Matrix q2 = q2t_.forward(input);
  Vector y(b);
  for (int j = 0; j < b; ++j) {
    const double qmin = std::min(q1(0, j), q2(0, j));
    y(j) = batch.reward(j) + (1.0 - batch.done(j)) * cfg_.discount *
                                 (qmin - alpha_ * next.log_prob(j));
  }
  return y;
}

Losses SacLearner::update(const Batch& batch) {
  const int b = static_cast<int>(batch.obs.cols());
  Losses out;
  out.alpha = alpha_;

  // Critics toward the entropy-regularized bootstrap target.
  const Vector y = compute_targets(batch);
  Matrix input(obs_dim_ + act_dim_, b);
  input.topRows(obs_dim_) = batch.obs;
  input.bottomRows(act_dim_) = batch.action;
  const Matrix q1 = q1_.forward(input, tape_q1_);
  const Matrix q2 = q2_.forward(input, tape_q2_);
  const Vector d1 = q1.row(0).transpose() - y;
  const Vector d2 = q2.row(0).transpose() - y;
  out.critic = 0.5 * (d1.squaredNorm() + d2.squaredNorm()) / b;
  if (!std::isfinite(out.critic)) {
    ++nonfinite_updates_;
    out.finite = false;
    return out;
  }
  tape_q1_.backward(q1_, Matrix((2.0 / b) * d1.transpose()));
  tape_q2_.backward(q2_, Matrix((2.0 / b) * d2.transpose()));
  adam_step(q1_, tape_q1_, opt_q1_);
  adam_step(q2_, tape_q2_, opt_q2_);

  // Actor against the updated critics, through the reparameterized sample.
  const PolicyEval pe = eval_policy(batch.obs, &tape_pi_);
  Matrix input_pi(obs_dim_ + act_dim_, b);
  input_pi.topRows(obs_dim_) = batch.obs;
  input_pi.bottomRows(act_dim_) = pe.a;
  const Matrix q1a = q1_.forward(input_pi, tape_a1_);
  const Matrix q2a = q2_.forward(input_pi, tape_a2_);
  Matrix gout1 = Matrix::Zero(1, b);
  Matrix gout2 = Matrix::Zero(1, b);
  double actor_loss = 0.0;
  for (int j = 0; j < b; ++j) {
    const double qmin = std::min(q1a(0, j), q2a(0, j));
    actor_loss += alpha_ * pe.log_prob(j) - qmin;
    if (q1a(0, j) <= q2a(0, j)) {
      gout1(0, j) = -1.0 / b;
    } else {
      gout2(0, j) = -1.0 / b;
    }
  }
  actor_loss /= b;
  out.actor = actor_loss;
  const double mean_log_prob = pe.log_prob.mean();
  if (!std::isfinite(actor_loss) || !std::isfinite(mean_log_prob)) {
    ++nonfinite_updates_;
    out.finite = false;
    return out;
  }
  const Matrix gin1 = tape_a1_.backward(q1_, gout1);
  const Matrix gin2 = tape_a2_.backward(q2_, gout2);
  const Matrix grad_a = gin1.bottomRows(act_dim_) + gin2.bottomRows(act_dim_);
  const Eigen::ArrayXXd one_minus_a2 = 1.0 - pe.a.array().square();
  const Eigen::ArrayXXd sig_xi = pe.sigma.array() * pe.xi.array();
  const Eigen::ArrayXXd grad_mu =
      (alpha_ / b) * 2.0 * pe.a.array() + grad_a.array() * one_minus_a2;
  const Eigen::ArrayXXd grad_log_std =
      ((alpha_ / b) * (-1.0 + 2.0 * pe.a.array() * sig_xi) +
       grad_a.array() * one_minus_a2 * sig_xi) *
      pe.clamp_mask.array();
  Matrix gout_pi(2 * act_dim_, b);
  gout_pi.topRows(act_dim_) = grad_mu.matrix();
  gout_pi.bottomRows(act_dim_) = grad_log_std.matrix();
  tape_pi_.backward(policy_.net, gout_pi);
  adam_step(policy_.net, tape_pi_, opt_pi_);

  // Temperature toward the target entropy.
  const double excess = mean_log_prob + target_entropy_;
  out.alpha_loss = -log_alpha_ * excess;
  const double g = -excess;
  if (std::isfinite(g) && std::isfinite(log_alpha_)) {
    ++alpha_steps_;
    alpha_m_ = 0.9 * alpha_m_ + 0.1 * g;
    alpha_v_ = 0.999 * alpha_v_ + 0.001 * g * g;
    const double mhat = alpha_m_ / (1.0 - std::pow(0.9, alpha_steps_));
    const double vhat = alpha_v_ / (1.0 - std::pow(0.999, alpha_steps_));
    log_alpha_ -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + 1e-8);
    alpha_ = std::exp(log_alpha_);
  }
  out.alpha = alpha_;

  soft_update(q1t_, q1_, cfg_.tau);
  soft_update(q2t_, q2_, cfg_.tau);
  return out;
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "step,episode_return,critic_loss,actor_loss,alpha\n";
  for (const CurvePoint& c : curve) {
    out << c.step << ',' << c.episode_return << ',' << c.critic_loss << ','
        << c.actor_loss << ',' << c.alpha << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

double evaluate_episode(RlEnv& env, const GaussianPolicy& policy, long max_steps) {
  Vector obs = env.reset();
  double total = 0.0;
  for (long i = 0; i < max_steps; ++i) {
    const RlEnv::Step sr = env.step(policy.mean_action(obs));
    total += sr.reward;
    if (sr.terminated || sr.truncated) return total;
    obs = sr.obs;
  }
  return total;
}

TrainResult train(const EnvFactory& factory, const SacConfig& cfg,
                  const ProgressFn& on_eval) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::unique_ptr<RlEnv> env = factory(derive_seed(cfg.seed, 0));
  if (!env) throw ConfigError("train: env factory returned null");
  const int obs_dim = env->observation_size();
  const int act_dim = env->action_size();

  SacLearner learner(cfg, obs_dim, act_dim);
  ReplayBuffer buffer(static_cast<size_t>(cfg.buffer_size));
  Rng act_rng(derive_seed(cfg.seed, 1));
  Rng replay_rng(derive_seed(cfg.seed, 2));

  TrainResult result;
  result.best_eval = -std::numeric_limits<double>::infinity();

  Vector obs = env->reset();
  double ep_return = 0.0;
  double last_critic = 0.0, last_actor = 0.0;
  long nonfinite_streak = 0;
  long steps_run = 0;

  for (long step = 1; step <= cfg.total_steps; ++step) {
    steps_run = step;
    Vector action(act_dim);
    if (step <= cfg.learning_starts) {
      for (int i = 0; i < act_dim; ++i) action(i) = act_rng.uniform(-1.0, 1.0);
    } else {
      action = learner.policy().sample(obs, act_rng).action;
    }
    const RlEnv::Step sr = env->step(action);
    buffer.push({obs, action, sr.reward, sr.obs, sr.terminated});
    ep_return += sr.reward;
    if (sr.terminated || sr.truncated) {
      result.curve.push_back({step, ep_return, last_critic, last_actor, learner.alpha()});
      ep_return = 0.0;
      obs = env->reset();
    } else {
      obs = sr.obs;
    }

    if (static_cast<long>(buffer.size()) >= cfg.learning_starts &&
        step % cfg.train_freq == 0 && cfg.gradient_steps > 0) {
      double sum_critic = 0.0, sum_actor = 0.0;
      long applied = 0;
      for (long g = 0; g < cfg.gradient_steps; ++g) {
        const Batch batch = buffer.gather(
            buffer.sample_indices(static_cast<size_t>(cfg.batch_size), replay_rng));
        const Losses losses = learner.update(batch);
        ++result.gradient_updates;
        if (!losses.finite) {
          if (++nonfinite_streak > 10) {
            throw NumericalError("train: more than 10 consecutive non-finite updates");
          }
          continue;
        }
        nonfinite_streak = 0;
        sum_critic += losses.critic;
        sum_actor += losses.actor;
        ++applied;
      }
      if (applied > 0) {
        last_critic = sum_critic / static_cast<double>(applied);
        last_actor = sum_actor / static_cast<double>(applied);
      }
    }

    if (cfg.eval_episodes > 0 && step % cfg.eval_interval == 0) {
      EvalRecord rec;
      rec.step = step;
      for (int e = 0; e < cfg.eval_episodes; ++e) {
        std::unique_ptr<RlEnv> eval_env =
            factory(derive_seed(cfg.seed, 1000 + static_cast<uint64_t>(e)));
        rec.returns.push_back(evaluate_episode(*eval_env, learner.policy()));
      }
      rec.mean_return =
          std::accumulate(rec.returns.begin(), rec.returns.end(), 0.0) /
          static_cast<double>(rec.returns.size());
      result.evals.push_back(rec);
      if (rec.mean_return > result.best_eval) {
        result.best_eval = rec.mean_return;
        result.best_step = step;
        result.best_policy = learner.policy();
      }
      if (on_eval && !on_eval(step, rec)) break;
    }
  }

  result.final_policy = learner.policy();
  if (result.evals.empty()) {
    result.best_policy = learner.policy();
    result.best_step = cfg.total_steps;
    result.best_eval = result.curve.empty() ? 0.0 : result.curve.back().episode_return;
  }
  result.total_env_steps = steps_run;
  result.nonfinite_updates = learner.nonfinite_updates();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

nlohmann::json checkpoint_to_json(const Checkpoint& ck) {
  return nlohmann::json{{"format", "pars-checkpoint"},
                        {"version", 1},
                        {"policy", nn::to_json(ck.policy.net)},
                        {"act_dim", ck.policy.act_dim},
                        {"sac", sac_config_to_json(ck.config)},
                        {"env", ck.env},
                        {"trained_steps", ck.trained_steps},
                        {"best_eval", ck.best_eval}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "pars-checkpoint") {
    throw ConfigError("checkpoint: missing 'pars-checkpoint' format tag");
  }
  if (j.value("version", 0) != 1) {
    throw ConfigError("checkpoint: unsupported version " +
                      std::to_string(j.value("version", 0)));
  }
  Checkpoint ck;
  ck.policy.net = nn::mlp_from_json(j.at("policy"));
  ck.policy.act_dim = j.at("act_dim").get<int>();
  if (ck.policy.act_dim < 1 ||
      ck.policy.net.output_size() != 2 * ck.policy.act_dim) {
    throw ConfigError("checkpoint: policy head does not match act_dim");
  }
  ck.config = sac_config_from_json(j.at("sac"));
  ck.env = j.value("env", nlohmann::json::object());
  ck.trained_steps = j.value("trained_steps", 0L);
  ck.best_eval = j.value("best_eval", 0.0);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint: " + path.string());
  out << checkpoint_to_json(ck).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace pars::sac
