#include "panelcast/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "panelcast/errors.hpp"

namespace panelcast {

double total_loss(std::span<const StatePrediction> predictions) {
  if (predictions.empty()) throw EmptyInput("total_loss needs at least one prediction");
  double sum = 0.0;
  for (const auto& p : predictions) sum += std::abs(p.predicted - p.actual);
  return sum;
}

double test_mse(std::span<const StatePrediction> predictions) {
  if (predictions.empty()) throw EmptyInput("test_mse needs at least one prediction");
  double sum = 0.0;
  for (const auto& p : predictions) sum += (p.predicted - p.actual) * (p.predicted - p.actual);
  return sum / static_cast<double>(predictions.size());
}

double percent_error(double predicted, double actual) {
  if (actual == 0.0) throw ZeroActual("percent error is undefined for an actual value of 0");
  return 100.0 * (predicted - actual) / actual;
}

TrialMetrics score_trial(int trial_id, std::uint64_t seed, std::span<const StatePrediction> predictions,
                         int stopped_epoch) {
  TrialMetrics m;
  m.trial_id = trial_id;
  m.seed = seed;
  m.total_loss = total_loss(predictions);
  m.test_mse = test_mse(predictions);
  m.stopped_epoch = stopped_epoch;
  for (const auto& p : predictions) {
    m.per_state.push_back({p.state, p.actual, p.predicted, p.predicted - p.actual, percent_error(p.predicted, p.actual)});
  }
  std::sort(m.per_state.begin(), m.per_state.end(),
            [](const StateOutcome& a, const StateOutcome& b) { return a.state < b.state; });
  return m;
}

ScalarStats summarize(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("cannot summarize an empty sample");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (const double v : values) sq += (v - mean) * (v - mean);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {mean, *hi - *lo, std::sqrt(sq / n)};
}

AggregateReport aggregate_trials(std::span<const TrialMetrics> trials) {
  if (trials.empty()) throw EmptyInput("aggregate_trials needs at least one trial");

  const auto& reference = trials.front().per_state;
  for (const auto& t : trials) {
    if (t.per_state.size() != reference.size()) {
      throw InconsistentStateSets("trial " + std::to_string(t.trial_id) + " covers a different number of states");
    }
    for (std::size_t s = 0; s < reference.size(); ++s) {
      if (t.per_state[s].state != reference[s].state || t.per_state[s].actual != reference[s].actual) {
        throw InconsistentStateSets("trial " + std::to_string(t.trial_id) + " disagrees on state " +
                                    reference[s].state);
      }
    }
  }

  const auto collect = [&](auto field) {
    std::vector<double> v;
    v.reserve(trials.size());
    for (const auto& t : trials) v.push_back(static_cast<double>(field(t)));
    return summarize(v);
  };

  AggregateReport r;
  r.n_trials = static_cast<int>(trials.size());
  r.total_loss = collect([](const TrialMetrics& t) { return t.total_loss; });
  r.test_mse = collect([](const TrialMetrics& t) { return t.test_mse; });
  r.wall_time_s = collect([](const TrialMetrics& t) { return t.wall_time_s; });
  r.cpu_time_s = collect([](const TrialMetrics& t) { return t.cpu_time_s; });
  r.stopped_epoch = collect([](const TrialMetrics& t) { return t.stopped_epoch; });

  std::vector<double> all_pe;
  for (const auto& t : trials) {
    for (const auto& s : t.per_state) all_pe.push_back(s.percent_error);
  }
  if (!all_pe.empty()) r.percent_error = summarize(all_pe);

  const auto n = static_cast<double>(trials.size());
  for (std::size_t s = 0; s < reference.size(); ++s) {
    StateAggregate a;
    a.state = reference[s].state;
    a.actual = reference[s].actual;
    for (const auto& t : trials) {
      a.mean_predicted += t.per_state[s].predicted;
      a.adl += t.per_state[s].signed_diff;
      a.ape += t.per_state[s].percent_error;
    }
    a.mean_predicted /= n;
    a.adl /= n;
    a.ape /= n;
    r.per_state.push_back(std::move(a));
  }
  return r;
}

}  // namespace panelcast
