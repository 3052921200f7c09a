#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "pars/errors.hpp"
#include "pars/mathutil.hpp"
#include "pars/sac.hpp"
#include "pars/upset_task.hpp"
#include "toy_env.hpp"

using namespace pars;
using sac::Batch;
using sac::GaussianPolicy;
using sac::Matrix;
using sac::ReplayBuffer;
using sac::SacConfig;
using sac::SacLearner;
using sac::Transition;
using sac::Vector;

namespace {

void zero_net(nn::Mlp<double>& net, double final_bias) {
  for (auto& w : net.weights) w.setZero();
  for (auto& b : net.biases) b.setZero();
  net.biases.back().fill(final_bias);
}

// Collapses the policy to a deterministic constant: mean 0, sigma at the
// clamp floor.
void collapse_policy(GaussianPolicy& p) {
  for (auto& w : p.net.weights) w.setZero();
  for (auto& b : p.net.biases) b.setZero();
  for (int i = p.act_dim; i < 2 * p.act_dim; ++i) {
    p.net.biases.back()(i) = GaussianPolicy::kLogStdMin;
  }
}

Batch make_batch(int obs_dim, int act_dim, int b, Rng& rng) {
  Batch batch;
  batch.obs.resize(obs_dim, b);
  batch.action.resize(act_dim, b);
  batch.reward.resize(b);
  batch.next_obs.resize(obs_dim, b);
  batch.done.resize(b);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < obs_dim; ++i) {
      batch.obs(i, j) = rng.normal();
      batch.next_obs(i, j) = rng.normal();
    }
    for (int i = 0; i < act_dim; ++i) batch.action(i, j) = rng.uniform(-1.0, 1.0);
    batch.reward(j) = rng.uniform(-1.0, 1.0);
    batch.done(j) = j % 2 == 0 ? 1.0 : 0.0;
  }
  return batch;
}

SacConfig small_config() {
  SacConfig cfg;
  cfg.net_arch = {8, 8};
  cfg.batch_size = 4;
  cfg.buffer_size = 64;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("sac config: defaults carry the published hyperparameters") {
  const SacConfig cfg = sac::sac_config_from_json(nlohmann::json::object());
  CHECK(cfg.batch_size == 128);
  CHECK(cfg.buffer_size == 10000);
  CHECK(cfg.discount == 0.9);
  CHECK(cfg.learning_rate == 4.83785052402479e-4);
  CHECK(cfg.learning_starts == 10000);
  CHECK(cfg.log_std_init == -2.193334342451813);
  CHECK(cfg.net_arch == std::vector<int>{64, 64});
  CHECK(cfg.tau == 0.08);
  CHECK(cfg.train_freq == 512);
  CHECK(cfg.gradient_steps == 512);
}

TEST_CASE("sac config: json round trip and key handling") {
  SacConfig cfg;
  cfg.total_steps = 12345;
  cfg.seed = 99;
  cfg.gradient_steps = 32;
  const SacConfig back = sac::sac_config_from_json(sac::sac_config_to_json(cfg));
  CHECK(back.total_steps == 12345);
  CHECK(back.seed == 99);
  CHECK(back.gradient_steps == 32);
  CHECK(back.tau == cfg.tau);

  // gradient_steps follows train_freq when not given
  const SacConfig follow = sac::sac_config_from_json({{"train_freq", 100}});
  CHECK(follow.train_freq == 100);
  CHECK(follow.gradient_steps == 100);

  CHECK_THROWS_AS(sac::sac_config_from_json({{"learning_rte", 1e-3}}), ConfigError);
  CHECK_THROWS_AS(sac::sac_config_from_json({{"gamma", 1.0}}), ConfigError);
  CHECK_THROWS_AS(sac::sac_config_from_json({{"tau", 0.0}}), ConfigError);
  CHECK_THROWS_AS(sac::sac_config_from_json({{"batch_size", 200}, {"buffer_size", 100}}),
                  ConfigError);
  CHECK_THROWS_AS(sac::sac_config_from_json({{"net_arch", nlohmann::json::array()}}),
                  ConfigError);
}

TEST_CASE("policy: fresh log-std head equals its configured init") {
  Rng rng(1);
  const double init = -2.193334342451813;
  GaussianPolicy p = GaussianPolicy::make(12, 2, {64, 64}, init, rng);
  Vector obs = Vector::Zero(12);
  for (int i = 0; i < 12; ++i) obs(i) = rng.normal();
  const Vector head = p.net.forward(obs);
  for (int i = 2; i < 4; ++i) {
    CHECK(head(i) == init);
  }
  const double sigma = std::exp(init);
  CHECK(sigma == doctest::Approx(0.1115).epsilon(1e-3));
}

TEST_CASE("policy: sigma at the clamp floor makes sampling deterministic") {
  Rng rng(2);
  GaussianPolicy p = GaussianPolicy::make(3, 2, {8}, -2.0, rng);
  for (int i = p.act_dim; i < 2 * p.act_dim; ++i) {
    p.net.biases.back()(i) = -30.0;   // clamped up to kLogStdMin
    p.net.weights.back().row(i).setZero();
  }
  Vector obs(3);
  obs << 0.3, -0.7, 1.1;
  const Vector det = p.mean_action(obs);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector a = p.sample(obs, rng).action;
    CHECK((a - det).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("policy: samples always land inside the unit box") {
  Rng rng(3);
  GaussianPolicy p = GaussianPolicy::make(4, 2, {16}, 1.5, rng);
  for (auto& w : p.net.weights) w *= 10.0;   // push means far out
  for (int trial = 0; trial < 1000; ++trial) {
    Vector obs(4);
    for (int i = 0; i < 4; ++i) obs(i) = 5.0 * rng.normal();
    const Vector a = p.sample(obs, rng).action;
    for (int i = 0; i < 2; ++i) {
      CHECK(a(i) >= -1.0);   // tanh saturates to exactly +-1 in doubles
      CHECK(a(i) <= 1.0);
    }
  }
}

TEST_CASE("policy: log-prob matches a monte carlo density estimate") {
  Rng rng(4);
  GaussianPolicy p = GaussianPolicy::make(2, 1, {16, 16}, -2.193334342451813, rng);
  Vector obs(2);
  obs << 0.4, -0.9;
  const Vector head = p.net.forward(obs);
  const double mu = head(0);
  const double sigma = std::exp(head(1));
  const double target_action = std::tanh(mu + 0.5 * sigma);
  const double model_density = std::exp(p.log_prob(obs, Vector::Constant(1, target_action)));

  const int n = 400000;
  const double half_width = 0.002;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double a = p.sample(obs, rng).action(0);
    if (std::abs(a - target_action) <= half_width) ++hits;
  }
  const double mc_density = hits / (2.0 * half_width * n);
  CHECK(mc_density == doctest::Approx(model_density).epsilon(0.05));
}

TEST_CASE("policy: non-finite network output raises a numerical error") {
  Rng rng(5);
  GaussianPolicy p = GaussianPolicy::make(2, 1, {4}, -2.0, rng);
  p.net.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  Vector obs(2);
  obs << 1.0, 1.0;
  CHECK_THROWS_AS(p.sample(obs, rng), NumericalError);
  CHECK_THROWS_AS(p.mean_action(obs), NumericalError);
}

TEST_CASE("critic targets: done truncates the bootstrap exactly") {
  SacLearner learner(small_config(), 3, 2);
  collapse_policy(learner.policy());
  zero_net(learner.target1(), 3.0);
  zero_net(learner.target2(), 2.0);
  learner.set_alpha(0.0);

  Rng rng(6);
  Batch batch = make_batch(3, 2, 6, rng);
  const Vector y = learner.compute_targets(batch);
  for (int j = 0; j < 6; ++j) {
    if (batch.done(j) == 1.0) {
      CHECK(y(j) == batch.reward(j));                 // no bootstrap at all
    } else {
      CHECK(y(j) == batch.reward(j) + 0.9 * 2.0);     // min of the twin heads
    }
  }

  // Perturbing next states cannot leak into finished transitions.
  batch.next_obs.setConstant(1e6);
  const Vector y2 = learner.compute_targets(batch);
  for (int j = 0; j < 6; ++j) {
    if (batch.done(j) == 1.0) CHECK(y2(j) == y(j));
  }
}

TEST_CASE("soft update: tau blends parameters elementwise") {
  Rng rng(7);
  nn::Mlp<double> online = nn::Mlp<double>::he_init({3, 5, 2}, rng);
  nn::Mlp<double> target = nn::Mlp<double>::he_init({3, 5, 2}, rng);
  const nn::Mlp<double> before = target;

  SUBCASE("tau = 1 copies the online net") {
    sac::soft_update(target, online, 1.0);
    for (int l = 0; l < online.layer_count(); ++l) {
      CHECK((target.weights[l] - online.weights[l]).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("tau = 0.08 mixes 92/8") {
    sac::soft_update(target, online, 0.08);
    for (int l = 0; l < online.layer_count(); ++l) {
      for (int k = 0; k < online.weights[l].size(); ++k) {
        const double expect = 0.92 * before.weights[l](k) + 0.08 * online.weights[l](k);
        CHECK(target.weights[l](k) == doctest::Approx(expect).epsilon(1e-15));
      }
      for (int k = 0; k < online.biases[l].size(); ++k) {
        const double expect = 0.92 * before.biases[l](k) + 0.08 * online.biases[l](k);
        CHECK(target.biases[l](k) == doctest::Approx(expect).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("replay buffer: fifo eviction and distinct sampling") {
  ReplayBuffer buf(4);
  Rng rng(8);
  for (int i = 0; i < 6; ++i) {
    Transition t;
    t.obs = Vector::Constant(1, static_cast<double>(i));
    t.action = Vector::Constant(1, 0.0);
    t.reward = i;
    t.next_obs = t.obs;
    t.done = false;
    buf.push(std::move(t));
  }
  CHECK(buf.size() == 4);
  std::multiset<double> kept;
  for (size_t i = 0; i < buf.size(); ++i) kept.insert(buf.at(i).reward);
  CHECK(kept == std::multiset<double>({2.0, 3.0, 4.0, 5.0}));

  const auto idx = buf.sample_indices(4, rng);
  CHECK(std::set<size_t>(idx.begin(), idx.end()).size() == 4);
  CHECK_THROWS_AS(buf.sample_indices(5, rng), std::invalid_argument);

  for (int trial = 0; trial < 50; ++trial) {
    const auto some = buf.sample_indices(2, rng);
    CHECK(some[0] != some[1]);
  }
}

TEST_CASE("update: one step moves every network and stays finite") {
  SacConfig cfg = small_config();
  cfg.batch_size = 8;
  SacLearner learner(cfg, 3, 2);
  const nn::Mlp<double> q1_before = learner.critic1();
  const nn::Mlp<double> pi_before = learner.policy().net;
  const nn::Mlp<double> t1_before = learner.target1();

  Rng rng(9);
  const Batch batch = make_batch(3, 2, 8, rng);
  const sac::Losses losses = learner.update(batch);
  CHECK(losses.finite);
  CHECK(std::isfinite(losses.critic));
  CHECK(std::isfinite(losses.actor));
  CHECK(std::isfinite(losses.alpha_loss));
  CHECK(losses.alpha > 0.0);
  CHECK((learner.critic1().weights[0] - q1_before.weights[0]).cwiseAbs().maxCoeff() > 0.0);
  CHECK((learner.policy().net.weights[0] - pi_before.weights[0]).cwiseAbs().maxCoeff() > 0.0);
  // Target trails the online net: moved, but not all the way.
  const double moved =
      (learner.target1().weights[0] - t1_before.weights[0]).cwiseAbs().maxCoeff();
  const double online_gap =
      (learner.critic1().weights[0] - t1_before.weights[0]).cwiseAbs().maxCoeff();
  CHECK(moved > 0.0);
  CHECK(moved < online_gap);
}

TEST_CASE("train: stopping before learning_starts performs zero updates") {
  SacConfig cfg;
  cfg.net_arch = {8, 8};
  cfg.buffer_size = 2000;
  cfg.batch_size = 32;
  cfg.learning_starts = 5000;
  cfg.total_steps = 800;
  cfg.eval_interval = 1000;
  cfg.eval_episodes = 0;
  cfg.seed = 12;
  const sac::TrainResult res = sac::train(testutil::double_integrator_factory(), cfg);
  CHECK(res.gradient_updates == 0);
  CHECK(res.total_env_steps == 800);
  CHECK(res.curve.size() == 4);   // 800 steps / 200-step episodes
}

TEST_CASE("train: identical config and seed reproduce the curve bit for bit") {
  SacConfig cfg;
  cfg.net_arch = {16, 16};
  cfg.batch_size = 64;
  cfg.buffer_size = 2000;
  cfg.learning_starts = 400;
  cfg.train_freq = 64;
  cfg.gradient_steps = 8;
  cfg.total_steps = 2500;
  cfg.eval_interval = 1000;
  cfg.eval_episodes = 2;
  cfg.seed = 11;
  const sac::TrainResult a = sac::train(testutil::double_integrator_factory(), cfg);
  const sac::TrainResult b = sac::train(testutil::double_integrator_factory(), cfg);
  REQUIRE(a.curve.size() == b.curve.size());
  for (size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].step == b.curve[i].step);
    CHECK(a.curve[i].episode_return == b.curve[i].episode_return);
    CHECK(a.curve[i].critic_loss == b.curve[i].critic_loss);
    CHECK(a.curve[i].actor_loss == b.curve[i].actor_loss);
    CHECK(a.curve[i].alpha == b.curve[i].alpha);
  }
  REQUIRE(a.evals.size() == b.evals.size());
  for (size_t i = 0; i < a.evals.size(); ++i) {
    CHECK(a.evals[i].mean_return == b.evals[i].mean_return);
  }
  CHECK(a.gradient_updates == b.gradient_updates);
  CHECK(a.gradient_updates > 0);
}

TEST_CASE("train: learns the double integrator well past the random baseline") {
  SacConfig cfg;
  cfg.net_arch = {32, 32};
  cfg.batch_size = 128;
  cfg.buffer_size = 10000;
  cfg.discount = 0.98;
  cfg.learning_rate = 7e-4;
  cfg.learning_starts = 1000;
  cfg.log_std_init = -2.193334342451813;
  cfg.tau = 0.08;
  cfg.train_freq = 64;
  cfg.gradient_steps = 64;
  cfg.total_steps = 20000;
  cfg.eval_interval = 5000;
  cfg.eval_episodes = 3;
  cfg.seed = 3;
  const sac::TrainResult res = sac::train(testutil::double_integrator_factory(), cfg);

  const double random_return = testutil::random_policy_return(1234, 40);
  testutil::DoubleIntegrator eval_env(777);
  double det_return = 0.0;
  const int eval_n = 5;
  for (int e = 0; e < eval_n; ++e) {
    det_return += sac::evaluate_episode(eval_env, res.best_policy);
  }
  det_return /= eval_n;
  MESSAGE("deterministic return ", det_return, " vs random ", random_return);
  CHECK(det_return >= 2.0 * random_return);

  // At the temperature equilibrium the policy entropy sits near the
  // -dim(action) target.
  Rng rng(55);
  testutil::DoubleIntegrator ent_env(888);
  double mean_logp = 0.0;
  int count = 0;
  Vector obs = ent_env.reset();
  for (int i = 0; i < 2000; ++i) {
    const GaussianPolicy::Sample s = res.final_policy.sample(obs, rng);
    mean_logp += s.log_prob;
    ++count;
    const auto sr = ent_env.step(s.action);
    obs = sr.terminated || sr.truncated ? ent_env.reset() : sr.obs;
  }
  mean_logp /= count;
  const double entropy = -mean_logp;
  MESSAGE("policy entropy ", entropy);
  CHECK(entropy == doctest::Approx(-1.0).epsilon(0.3));
}

TEST_CASE("upset task: adapter exposes the 12-entry observation and 2 actions") {
  env::EnvConfig cfg;
  sac::UpsetTask task(cfg, 42, env::InitialCondition{deg2rad(-50.0), deg2rad(30.0)});
  CHECK(task.observation_size() == 12);
  CHECK(task.action_size() == 2);
  const Vector obs = task.reset();
  REQUIRE(obs.size() == 12);
  CHECK(obs(0) == doctest::Approx(deg2rad(-50.0) / kPi));
  Vector action(2);
  action << 0.2, -0.1;
  const sac::RlEnv::Step sr = task.step(action);
  CHECK(std::isfinite(sr.reward));
  CHECK(sr.obs.size() == 12);
  Vector bad(3);
  bad << 0, 0, 0;
  CHECK_THROWS_AS(task.step(bad), std::invalid_argument);

  const sac::EnvFactory factory = sac::upset_env_factory(cfg);
  auto e1 = factory(1);
  auto e2 = factory(1);
  const Vector o1 = e1->reset();
  const Vector o2 = e2->reset();
  CHECK((o1 - o2).cwiseAbs().maxCoeff() == 0.0);   // same seed, same upset
}

TEST_CASE("checkpoint: exact round trip and versioned rejection") {
  Rng rng(8);
  sac::Checkpoint ck;
  ck.policy = GaussianPolicy::make(12, 2, {16, 16}, -2.0, rng);
  ck.config.tau = 0.05;
  ck.env = {{"kind", "toy"}};
  ck.trained_steps = 4200;
  ck.best_eval = 17.5;

  const auto tmp = std::filesystem::temp_directory_path() / "pars_test_ck.json";
  sac::save_checkpoint(tmp, ck);
  const sac::Checkpoint back = sac::load_checkpoint(tmp);
  std::filesystem::remove(tmp);

  CHECK(back.config.tau == 0.05);
  CHECK(back.env.at("kind") == "toy");
  CHECK(back.trained_steps == 4200);
  CHECK(back.best_eval == 17.5);
  CHECK(back.policy.act_dim == 2);
  Vector obs = Vector::LinSpaced(12, -0.5, 0.5);
  const Vector a = ck.policy.mean_action(obs);
  const Vector b = back.policy.mean_action(obs);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);   // weights survive bit for bit

  nlohmann::json j = sac::checkpoint_to_json(ck);
  j["version"] = 2;
  CHECK_THROWS_AS(sac::checkpoint_from_json(j), ConfigError);
  j["version"] = 1;
  j["format"] = "pars-mlp";
  CHECK_THROWS_AS(sac::checkpoint_from_json(j), ConfigError);
  j["format"] = "pars-checkpoint";
  j["act_dim"] = 3;   // head is 4 wide, mismatch
  CHECK_THROWS_AS(sac::checkpoint_from_json(j), ConfigError);
  CHECK_THROWS_AS(sac::load_checkpoint("/nonexistent/ck.json"), IoError);
}
