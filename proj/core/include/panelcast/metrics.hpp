#ifndef PANELCAST_METRICS_HPP_
#define PANELCAST_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace panelcast {

/// A test-year prediction in unscaled violent-crime counts.
struct StatePrediction {
  std::string state;
  int year = 0;
  double predicted = 0.0;
  double actual = 0.0;

  friend bool operator==(const StatePrediction&, const StatePrediction&) = default;
};

/// Sum of |predicted - actual|. Throws EmptyInput.
double total_loss(std::span<const StatePrediction> predictions);

/// Mean of (predicted - actual)^2. Throws EmptyInput.
double test_mse(std::span<const StatePrediction> predictions);

/// Signed 100 * (predicted - actual) / actual. Throws ZeroActual.
double percent_error(double predicted, double actual);

struct StateOutcome {
  std::string state;
  double actual = 0.0;
  double predicted = 0.0;
  double signed_diff = 0.0;
  double percent_error = 0.0;

  friend bool operator==(const StateOutcome&, const StateOutcome&) = default;
};

struct TrialMetrics {
  int trial_id = 0;
  std::uint64_t seed = 0;
  double total_loss = 0.0;
  double test_mse = 0.0;
  std::vector<StateOutcome> per_state;  // sorted by state
  double wall_time_s = 0.0;
  double cpu_time_s = 0.0;
  int stopped_epoch = 0;

  friend bool operator==(const TrialMetrics&, const TrialMetrics&) = default;
};

/// Scores one trial's predictions; timing fields are left at zero.
TrialMetrics score_trial(int trial_id, std::uint64_t seed, std::span<const StatePrediction> predictions,
                         int stopped_epoch);

struct ScalarStats {
  double mean = 0.0;
  double range = 0.0;
  double std = 0.0;  // population

  friend bool operator==(const ScalarStats&, const ScalarStats&) = default;
};

/// Throws EmptyInput.
ScalarStats summarize(std::span<const double> values);

struct StateAggregate {
  std::string state;
  double actual = 0.0;
  double mean_predicted = 0.0;
  double adl = 0.0;  // mean signed difference across trials
  double ape = 0.0;  // mean signed percent error across trials

  friend bool operator==(const StateAggregate&, const StateAggregate&) = default;
};

struct AggregateReport {
  int n_trials = 0;
  ScalarStats total_loss;
  ScalarStats test_mse;
  ScalarStats percent_error;  // over every (trial, state) pair
  ScalarStats wall_time_s;
  ScalarStats cpu_time_s;
  ScalarStats stopped_epoch;
  std::vector<StateAggregate> per_state;

  friend bool operator==(const AggregateReport&, const AggregateReport&) = default;
};

/// Throws EmptyInput for no trials and InconsistentStateSets when trials
/// disagree on the states they cover or their actual values.
AggregateReport aggregate_trials(std::span<const TrialMetrics> trials);

}  // namespace panelcast

#endif  // PANELCAST_METRICS_HPP_
