#include "pars/hpo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include "pars/errors.hpp"

namespace pars::hpo {

namespace {

constexpr size_t kStartupTrials = 10;
constexpr double kTopQuantile = 0.25;
constexpr double kExploreProb = 0.25;
constexpr int kPruneMinTrials = 5;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& what) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError(what + ": unknown key '" + item.key() + "'");
    }
  }
}

Range range_from_json(const json& j, const std::string& key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("search space: '" + key + "' must be a [lo, hi] pair");
  }
  return Range{v[0].get<double>(), v[1].get<double>()};
}

template <typename T>
std::vector<T> options_from_json(const json& j, const std::string& key,
                                 std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError("search space: '" + key + "' must be an array");
  return v.get<std::vector<T>>();
}

void check_range(const Range& r, const std::string& name, bool positive) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo <= r.hi)) {
    throw ConfigError("search space: '" + name + "' bounds out of order");
  }
  if (positive && !(r.lo > 0.0)) {
    throw ConfigError("search space: '" + name + "' bounds must be positive");
  }
}

// Scored history entry for the two-population split. Pruned trials score
// by their last reported value so bad configs still inform the split.
struct Scored {
  double score;
  const TrialRecord* trial;
};

std::vector<Scored> scored_history(const std::vector<TrialRecord>& history) {
  std::vector<Scored> out;
  for (const auto& t : history) {
    if (t.status == TrialStatus::complete && t.objective.has_value()) {
      out.push_back({*t.objective, &t});
    } else if (t.status == TrialStatus::pruned && !t.intermediate.empty()) {
      out.push_back({t.intermediate.back(), &t});
    }
  }
  return out;
}

}  // namespace

void SearchSpace::validate() const {
  check_range(learning_rate, "learning_rate", true);
  check_range(tau, "tau", true);
  check_range(log_std_init, "log_std_init", false);
  if (batch_size.empty() || buffer_size.empty() || learning_starts.empty() ||
      train_freq.empty() || discount.empty() || net_arch.empty()) {
    throw ConfigError("search space: every categorical needs at least one option");
  }
  for (int b : batch_size) {
    if (b < 1) throw ConfigError("search space: batch_size options must be positive");
  }
  for (int b : buffer_size) {
    if (b < 1) throw ConfigError("search space: buffer_size options must be positive");
  }
  for (double g : discount) {
    if (!(g > 0.0 && g < 1.0)) throw ConfigError("search space: gamma options must be in (0,1)");
  }
  for (const auto& arch : net_arch) {
    if (arch.empty()) throw ConfigError("search space: net_arch options must be non-empty");
  }
}

json search_space_to_json(const SearchSpace& s) {
  return json{{"learning_rate", {s.learning_rate.lo, s.learning_rate.hi}},
              {"tau", {s.tau.lo, s.tau.hi}},
              {"log_std_init", {s.log_std_init.lo, s.log_std_init.hi}},
              {"batch_size", s.batch_size},
              {"buffer_size", s.buffer_size},
              {"learning_starts", s.learning_starts},
              {"train_freq", s.train_freq},
              {"gamma", s.discount},
              {"net_arch", s.net_arch}};
}

SearchSpace search_space_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("search space: expected a JSON object");
  reject_unknown_keys(j,
                      {"learning_rate", "tau", "log_std_init", "batch_size",
                       "buffer_size", "learning_starts", "train_freq", "gamma",
                       "net_arch"},
                      "search space");
  SearchSpace s;
  s.learning_rate = range_from_json(j, "learning_rate", s.learning_rate);
  s.tau = range_from_json(j, "tau", s.tau);
  s.log_std_init = range_from_json(j, "log_std_init", s.log_std_init);
  s.batch_size = options_from_json(j, "batch_size", s.batch_size);
  s.buffer_size = options_from_json(j, "buffer_size", s.buffer_size);
  s.learning_starts = options_from_json(j, "learning_starts", s.learning_starts);
  s.train_freq = options_from_json(j, "train_freq", s.train_freq);
  s.discount = options_from_json(j, "gamma", s.discount);
  s.net_arch = options_from_json(j, "net_arch", s.net_arch);
  s.validate();
  return s;
}

void TrialRecord::validate() const {
  if (id < 0) throw ConfigError("trial record: negative id");
  if (status == TrialStatus::pruned && intermediate.empty()) {
    throw ConfigError("trial record: pruned trial without intermediate values");
  }
  if (status == TrialStatus::complete && !objective.has_value()) {
    throw ConfigError("trial record: complete trial without an objective");
  }
}

json trial_to_json(const TrialRecord& t) {
  const char* status = t.status == TrialStatus::complete ? "complete"
                       : t.status == TrialStatus::pruned ? "pruned"
                                                         : "failed";
  json j{{"id", t.id},
         {"config", sac::sac_config_to_json(t.config)},
         {"intermediate", t.intermediate},
         {"status", status}};
  j["objective"] = t.objective.has_value() ? json(*t.objective) : json(nullptr);
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

TrialRecord trial_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("trial record: expected a JSON object");
  reject_unknown_keys(j, {"id", "config", "intermediate", "objective", "status", "error"},
                      "trial record");
  TrialRecord t;
  t.id = j.at("id").get<int>();
  t.config = sac::sac_config_from_json(j.at("config"));
  t.intermediate = j.at("intermediate").get<std::vector<double>>();
  if (!j.at("objective").is_null()) t.objective = j.at("objective").get<double>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "complete") {
    t.status = TrialStatus::complete;
  } else if (status == "pruned") {
    t.status = TrialStatus::pruned;
  } else if (status == "failed") {
    t.status = TrialStatus::failed;
  } else {
    throw ConfigError("trial record: unknown status '" + status + "'");
  }
  if (j.contains("error")) t.error = j.at("error").get<std::string>();
  t.validate();
  return t;
}

sac::SacConfig suggest(const std::vector<TrialRecord>& history,
                       const SearchSpace& space, Rng& rng) {
  space.validate();

  std::vector<Scored> scored = scored_history(history);
  std::vector<const TrialRecord*> good;
  if (history.size() >= kStartupTrials && scored.size() >= 2) {
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    const size_t n_good = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(kTopQuantile * static_cast<double>(scored.size()))));
    for (size_t i = 0; i < n_good; ++i) good.push_back(scored[i].trial);
  }
  const bool informed = !good.empty();

  // Continuous: resample a top-quartile value with Gaussian jitter in the
  // (possibly log) transformed domain, bandwidth an eighth of its width.
  auto pick_continuous = [&](const Range& r, bool log_scale, auto field) {
    const double lo = log_scale ? std::log(r.lo) : r.lo;
    const double hi = log_scale ? std::log(r.hi) : r.hi;
    double x;
    if (informed && rng.uniform() > kExploreProb) {
      const TrialRecord* t = good[rng.below(good.size())];
      const double center = log_scale ? std::log(field(t->config)) : field(t->config);
      x = std::clamp(center + rng.normal() * (hi - lo) / 8.0, lo, hi);
    } else {
      x = rng.uniform(lo, hi);
    }
    return log_scale ? std::exp(x) : x;
  };

  // Categorical: option weight = occurrences in the top quartile plus one.
  auto pick_option = [&](const auto& options, auto field) {
    using Option = std::decay_t<decltype(options[0])>;
    if (!informed) return options[rng.below(options.size())];
    std::vector<double> weight(options.size(), 1.0);
    for (const TrialRecord* t : good) {
      const auto value = field(t->config);
      for (size_t i = 0; i < options.size(); ++i) {
        if (options[i] == Option(value)) weight[i] += 1.0;
      }
    }
    double total = 0.0;
    for (double w : weight) total += w;
    double u = rng.uniform(0.0, total);
    for (size_t i = 0; i < options.size(); ++i) {
      u -= weight[i];
      if (u < 0.0) return options[i];
    }
    return options.back();
  };

  sac::SacConfig cfg;
  cfg.learning_rate = pick_continuous(space.learning_rate, true,
                                      [](const sac::SacConfig& c) { return c.learning_rate; });
  cfg.tau = pick_continuous(space.tau, true,
                            [](const sac::SacConfig& c) { return c.tau; });
  cfg.log_std_init = pick_continuous(space.log_std_init, false,
                                     [](const sac::SacConfig& c) { return c.log_std_init; });
  cfg.batch_size = pick_option(space.batch_size,
                               [](const sac::SacConfig& c) { return c.batch_size; });
  cfg.buffer_size = pick_option(space.buffer_size,
                                [](const sac::SacConfig& c) { return c.buffer_size; });
  cfg.learning_starts = pick_option(space.learning_starts, [](const sac::SacConfig& c) {
    return static_cast<int>(c.learning_starts);
  });
  cfg.train_freq = pick_option(space.train_freq, [](const sac::SacConfig& c) {
    return static_cast<int>(c.train_freq);
  });
  cfg.discount = pick_option(space.discount,
                             [](const sac::SacConfig& c) { return c.discount; });
  cfg.net_arch = pick_option(space.net_arch,
                             [](const sac::SacConfig& c) { return c.net_arch; });
  cfg.gradient_steps = cfg.train_freq;
  cfg.batch_size = std::min(cfg.batch_size, cfg.buffer_size);
  cfg.log_std_init = std::clamp(cfg.log_std_init, sac::GaussianPolicy::kLogStdMin,
                                sac::GaussianPolicy::kLogStdMax);
  cfg.validate();
  return cfg;
}

bool should_prune(const TrialRecord& record,
                  const std::vector<TrialRecord>& history, int checkpoint) {
  if (checkpoint < 0 || checkpoint >= static_cast<int>(record.intermediate.size())) {
    throw std::invalid_argument("should_prune: record has no value at this checkpoint");
  }
  std::vector<double> peers;
  for (const auto& t : history) {
    if (t.status != TrialStatus::complete) continue;
    if (checkpoint < static_cast<int>(t.intermediate.size())) {
      peers.push_back(t.intermediate[checkpoint]);
    }
  }
  if (static_cast<int>(peers.size()) < kPruneMinTrials) return false;
  std::sort(peers.begin(), peers.end());
  const size_t n = peers.size();
  const double median =
      n % 2 == 1 ? peers[n / 2] : 0.5 * (peers[n / 2 - 1] + peers[n / 2]);
  return record.intermediate[static_cast<size_t>(checkpoint)] < median;
}

TrialContext::TrialContext(int id, std::vector<TrialRecord> history)
    : id_(id), history_(std::move(history)) {
  partial_.id = id;
}

bool TrialContext::report(double value) {
  partial_.intermediate.push_back(value);
  const int checkpoint = static_cast<int>(partial_.intermediate.size()) - 1;
  if (!prune_requested_ && should_prune(partial_, history_, checkpoint)) {
    prune_requested_ = true;
  }
  return prune_requested_;
}

const TrialRecord& StudyResult::best() const {
  if (best_index < 0 || best_index >= static_cast<int>(trials.size())) {
    throw ConfigError("study: no completed trials");
  }
  return trials[static_cast<size_t>(best_index)];
}

namespace {

struct StoreHeader {
  uint64_t seed = 0;
  json space;
};

// Loads an existing study store: header line, then one trial per line.
StoreHeader load_store(const std::filesystem::path& path,
                       std::vector<TrialRecord>& trials) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read study store: " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("study store is empty: " + path.string());
  }
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() ||
      header.value("format", "") != "pars-study" || header.value("version", 0) != 1) {
    throw ConfigError("study store has a bad header: " + path.string());
  }
  StoreHeader out;
  out.seed = header.at("seed").get<uint64_t>();
  out.space = header.at("space");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    trials.push_back(trial_from_json(json::parse(line)));
  }
  return out;
}

}  // namespace

StudyResult run_study(const TrialFn& objective, const SearchSpace& space,
                      const StudyOptions& opts) {
  space.validate();
  if (!objective) throw ConfigError("study: null objective");
  if (opts.n_trials < 1) throw ConfigError("study: n_trials must be positive");
  if (opts.workers < 1) throw ConfigError("study: workers must be positive");

  StudyResult result;
  uint64_t seed = opts.seed;
  std::ofstream store;

  if (!opts.store.empty()) {
    if (std::filesystem::exists(opts.store)) {
      const StoreHeader header = load_store(opts.store, result.trials);
      if (header.space != search_space_to_json(space)) {
        throw ConfigError("study store was created with a different search space");
      }
      seed = header.seed;
      store.open(opts.store, std::ios::app);
    } else {
      if (opts.store.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(opts.store.parent_path(), ec);
      }
      store.open(opts.store);
      if (store) {
        store << json{{"format", "pars-study"},
                      {"version", 1},
                      {"seed", seed},
                      {"space", search_space_to_json(space)}}
                     .dump()
              << '\n';
        store.flush();
      }
    }
    if (!store) throw IoError("cannot write study store: " + opts.store.string());
  }

  std::mutex mu;
  std::atomic<int> dispatched{0};
  int next_id = 0;
  for (const auto& t : result.trials) next_id = std::max(next_id, t.id + 1);

  auto worker = [&]() {
    for (;;) {
      if (dispatched.fetch_add(1) >= opts.n_trials) break;
      int id;
      std::vector<TrialRecord> snapshot;
      {
        std::lock_guard<std::mutex> lock(mu);
        id = next_id++;
        snapshot = result.trials;
      }
      Rng rng(derive_seed(seed, 0x7000 + static_cast<uint64_t>(id)));
      TrialRecord rec;
      rec.id = id;
      TrialContext ctx(id, snapshot);
      try {
        rec.config = suggest(snapshot, space, rng);
        const double final_value = objective(rec.config, ctx);
        rec.intermediate = ctx.values();
        if (ctx.prune_requested()) {
          rec.status = TrialStatus::pruned;
        } else {
          rec.status = TrialStatus::complete;
          rec.objective = final_value;
        }
      } catch (const std::exception& e) {
        rec.intermediate = ctx.values();
        rec.status = TrialStatus::failed;
        rec.objective.reset();
        rec.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        result.trials.push_back(rec);
        if (store.is_open()) {
          store << trial_to_json(rec).dump() << '\n';
          store.flush();
        }
      }
    }
  };

  if (opts.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < opts.workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (size_t i = 0; i < result.trials.size(); ++i) {
    const TrialRecord& t = result.trials[i];
    if (t.status != TrialStatus::complete || !t.objective.has_value()) continue;
    if (result.best_index < 0 ||
        *t.objective > *result.trials[static_cast<size_t>(result.best_index)].objective) {
      result.best_index = static_cast<int>(i);
    }
  }
  return result;
}

}  // namespace pars::hpo
