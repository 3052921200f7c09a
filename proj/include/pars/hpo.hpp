#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pars/rng.hpp"
#include "pars/sac.hpp"

namespace pars::hpo {

using nlohmann::json;

// Continuous search interval, [lo, hi].
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Searchable learner hyperparameters. Continuous domains are log-uniform
// except log_std_init (plain uniform, it is already a log quantity); the
// rest are categorical option sets. Defaults bracket the published tuned
// values a decade either side, with standard option grids.
struct SearchSpace {
  Range learning_rate{4.83785052402479e-5, 4.83785052402479e-3};
  Range tau{0.008, 0.8};
  Range log_std_init{-4.0, -0.5};
  std::vector<int> batch_size{64, 128, 256, 512};
  std::vector<int> buffer_size{10000, 50000, 100000};
  std::vector<int> learning_starts{1000, 5000, 10000};
  std::vector<int> train_freq{64, 128, 256, 512, 1024};
  std::vector<double> discount{0.9, 0.95, 0.98, 0.99};
  std::vector<std::vector<int>> net_arch{{64, 64}, {128, 128}, {256, 256}};

  void validate() const;
};

json search_space_to_json(const SearchSpace& space);
SearchSpace search_space_from_json(const json& j);

enum class TrialStatus { complete, pruned, failed };

struct TrialRecord {
  int id = 0;
  sac::SacConfig config;
  std::vector<double> intermediate;   // objective at each checkpoint
  std::optional<double> objective;    // final objective, complete trials only
  TrialStatus status = TrialStatus::complete;
  std::string error;                  // failed trials

  void validate() const;
};

json trial_to_json(const TrialRecord& t);
TrialRecord trial_from_json(const json& j);

// Draws the next candidate config. The first 10 trials sample every domain
// uniformly; afterwards each parameter is drawn from the top quartile of
// the scored history (pruned trials score by their last intermediate
// value), with add-one smoothing over categorical options and jittered
// resampling for continuous domains, plus a uniform exploration floor.
// Unsampled SacConfig fields (budgets, seed) keep their defaults;
// gradient_steps follows train_freq.
sac::SacConfig suggest(const std::vector<TrialRecord>& history,
                       const SearchSpace& space, Rng& rng);

// Median rule: true iff at least 5 completed trials in history carry a
// value at this checkpoint and the record's value there is strictly below
// their median. Fewer comparable trials never prune.
bool should_prune(const TrialRecord& record,
                  const std::vector<TrialRecord>& history, int checkpoint);

// Handed to the objective for intermediate reporting. report() returns
// true when the median rule asks to stop; once that happens the trial is
// recorded as pruned and the objective's return value is ignored.
class TrialContext {
 public:
  TrialContext(int id, std::vector<TrialRecord> history);

  int id() const { return id_; }
  bool report(double value);
  bool prune_requested() const { return prune_requested_; }
  const std::vector<double>& values() const { return partial_.intermediate; }

 private:
  int id_;
  std::vector<TrialRecord> history_;
  TrialRecord partial_;
  bool prune_requested_ = false;
};

using TrialFn = std::function<double(const sac::SacConfig&, TrialContext&)>;

struct StudyOptions {
  int n_trials = 30;     // new trials this invocation
  uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path store;   // JSONL persistence; empty keeps in memory
};

struct StudyResult {
  std::vector<TrialRecord> trials;
  int best_index = -1;   // argmax final objective; -1 if nothing completed

  const TrialRecord& best() const;
};

// Runs trials against the objective, suggesting each config from the
// history so far. Objective exceptions mark the trial failed and the study
// continues. With a store path the study appends one JSON line per trial
// under a header carrying the space and seed; rerunning against an
// existing store resumes it (ids continue, the stored seed wins, the space
// must match). Serial studies (workers = 1) are reproducible by seed.
StudyResult run_study(const TrialFn& objective, const SearchSpace& space,
                      const StudyOptions& opts);

}  // namespace pars::hpo
