#ifndef PANELCAST_TRIALS_HPP_
#define PANELCAST_TRIALS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "panelcast/features.hpp"
#include "panelcast/metrics.hpp"
#include "panelcast/network.hpp"
#include "panelcast/panel.hpp"
#include "panelcast/training.hpp"

namespace panelcast {

/// Sequences split by target year, plus the same split z-scored with a scaler
/// fit on the training rows.
struct PreparedData {
  SplitDataset raw;
  SplitDataset scaled;
  Scaler scaler;
};

PreparedData prepare_data(const PanelDataset& dataset, const FeatureOptions& options = {});

/// Eval-mode predictions for the test split, in unscaled units.
std::vector<StatePrediction> test_predictions(const NetworkParams& params, const PreparedData& data);

/// CSV with header `state,year,predicted,actual`.
void write_predictions_csv(std::span<const StatePrediction> predictions, std::ostream& out);
void write_predictions_csv(std::span<const StatePrediction> predictions, const std::filesystem::path& path);

struct TrialOptions {
  TrainConfig train;  // train.seed is replaced per trial
  FeatureOptions features;
  NetworkSpec network;
  int n_trials = 50;
  std::uint64_t base_seed = 0;
  int jobs = 1;
  bool omit_timing = false;  // write zero wall/cpu times for byte-stable output
  std::function<void(const TrialMetrics&)> on_trial_done;
};

struct TrialsResult {
  std::vector<TrialMetrics> trials;  // ordered by trial_id
  AggregateReport report;
};

/// Trial i trains with seed base_seed + i. Results do not depend on `jobs`
/// apart from timing. Failures are rethrown as TrialFailed.
TrialsResult run_trials(const PanelDataset& dataset, const TrialOptions& options);

/// `trial_id,seed,total_loss,test_mse,wall_time_s,cpu_time_s,stopped_epoch`
void write_trials_csv(std::span<const TrialMetrics> trials, std::ostream& out);
void write_trials_csv(std::span<const TrialMetrics> trials, const std::filesystem::path& path);

/// `state,actual,mean_predicted,adl,ape`
void write_per_state_csv(const AggregateReport& report, std::ostream& out);
void write_per_state_csv(const AggregateReport& report, const std::filesystem::path& path);

std::string report_to_json(const AggregateReport& report);
void write_report_json(const AggregateReport& report, const std::filesystem::path& path);

}  // namespace panelcast

#endif  // PANELCAST_TRIALS_HPP_
