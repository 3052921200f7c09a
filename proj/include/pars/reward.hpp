#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pars/flightdyn.hpp"

namespace pars::reward {

// Observed quantity a component scores.
enum class Source { phi, gamma, aileron_rate, elevator_rate };

// Error normalization scheme. Asymptotic: e/(1+e) after dividing by the
// scale factor; saturating, smooth near the target. Linear: error divided
// by its maximum attainable value, clamped at 1; constant sensitivity.
enum class Scheme { asymptotic, linear };

// Unit in which an angular error is expressed before scaling.
enum class AngleUnit { radians, degrees };

const char* to_string(Source s);
const char* to_string(Scheme s);
Source source_from_string(const std::string& s);

struct RewardComponent {
  std::string id;          // unique label; referenced by depends_on and CSV columns
  Source source = Source::phi;
  double target = 0.0;     // same units as the source (radians for angles)
  Scheme scheme = Scheme::asymptotic;
  double scale = 1.0;      // asymptotic divisor, or the linear maximum error
  double weight = 0.0;     // positive: reward; negative: punishment
  AngleUnit unit = AngleUnit::radians;
  std::optional<std::string> depends_on;  // sequential gating, depth 1
};

// One reward-design iteration: an ordered component list plus the optional
// load-factor termination floor.
struct RewardSpec {
  std::vector<RewardComponent> components;
  std::optional<double> g_floor;   // episode terminates below this, g units
  bool rate_per_second = true;     // command-rate errors as |da|/dt, else |da|

  void validate() const;  // throws ConfigError
  const RewardComponent* find(const std::string& id) const;
};

struct ComponentResult {
  std::string id;
  double e_abs = 0.0;
  double error = 0.0;         // normalized per the component scheme
  double reward = 0.0;        // 1 - error (meaningful for positive weights)
  double contribution = 0.0;  // weighted, sequential gating applied
};

struct RewardBreakdown {
  std::vector<ComponentResult> components;
  double total = 0.0;
};

// |target - x|; for angular quantities the difference is taken on the
// circle (shortest arc), so it never exceeds pi.
double absolute_error(double x, double target, bool angular);

// e_scaled = e_abs / scale; returns e_scaled / (1 + e_scaled), in [0, 1).
double asymptotic_error(double e_abs, double scale);

// min(e_abs / max_err, 1).
double linear_error(double e_abs, double max_err);

// Sequential gating: weight * base_reward * dependent_reward.
double sequential_modulate(double base_reward, double dependent_reward, double weight);

// Evaluates every component at the given attitude and command pair.
// Positive components contribute weight * (1 - error), gated by their
// dependency's reward when one is declared; negative components contribute
// weight * error. Requires a validated spec and dt > 0.
RewardBreakdown total_reward(const RewardSpec& spec, double phi, double gamma,
                             const flightdyn::ControlCommand& action,
                             const flightdyn::ControlCommand& prev_action, double dt);

// Direction of the sequential coupling between the two attitude targets.
enum class SequentialOrder {
  gamma_first,  // phi reward gated by gamma progress
  phi_first,    // gamma reward gated by phi progress
};

// The four reward-design iterations. control_dt fixes the maximum
// command-rate error used by the linear punishments.
//   1: base phi/gamma asymptotic errors, equal weights
//   2: iteration 1 plus linear command-derivative punishments
//   3: iteration 2 with a sequential dependency (direction selectable)
//   4: final design: tuned weights (phi 0.25 / gamma 0.75), phi gated by
//      gamma, command punishments, and the -2 g termination floor
RewardSpec preset(int iteration, SequentialOrder order = SequentialOrder::gamma_first,
                  double control_dt = 0.1, bool rate_per_second = true);

}  // namespace pars::reward
