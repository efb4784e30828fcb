#ifndef PANELCAST_TRAINING_HPP_
#define PANELCAST_TRAINING_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "panelcast/features.hpp"
#include "panelcast/network.hpp"

namespace panelcast {

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 100;
  int batch_size = 64;
  int es_patience = 10;
  int lr_patience = 5;
  double lr_factor = 0.5;
  double min_lr = 1e-6;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Validation loss must drop by more than this to count as an improvement.
inline constexpr double kImprovementThreshold = 1e-9;

struct MseResult {
  double loss = 0.0;
  std::vector<double> gradient;  // d loss / d prediction
};

/// Throws EmptyInput on empty input and ShapeMismatch on unequal lengths.
MseResult mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct AdamState {
  NetworkGradients first_moment;
  NetworkGradients second_moment;
  std::int64_t step_count = 0;

  static AdamState zeros_like(const NetworkParams& params);
};

/// One bias-corrected Adam update on flat buffers; `step` is the 1-based step
/// number after incrementing.
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::int64_t step, double lr, double beta1, double beta2, double epsilon);

void adam_step(NetworkParams& params, const NetworkGradients& grads, AdamState& state, double lr,
               const TrainConfig& config);

/// A seeded permutation of [0, n) cut into ceil(n / batch_size) batches.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n_samples, std::size_t batch_size,
                                                   std::uint64_t seed, std::uint64_t epoch);

struct EarlyStopState {
  int patience = 10;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improve = 0;
  int best_epoch = -1;
  std::optional<NetworkParams> best_params;
};

/// Records `val_loss` for `epoch`; snapshots `params` on improvement. Returns
/// true once `patience` consecutive epochs have passed without improvement.
bool early_stop_update(EarlyStopState& state, double val_loss, const NetworkParams& params, int epoch);

struct LrSchedulerState {
  double current_lr = 0.001;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improve = 0;
  int patience = 5;
  double factor = 0.5;
  double min_lr = 1e-6;

  static LrSchedulerState from_config(const TrainConfig& config);
};

/// Returns true when this update reduced the learning rate.
bool lr_scheduler_update(LrSchedulerState& state, double val_loss);

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double lr = 0.0;  // rate used while training this epoch
  bool lr_reduced = false;
  bool early_stopped = false;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainLog {
  std::vector<EpochRecord> records;
  int stopped_epoch = -1;
  int best_epoch = -1;

  friend bool operator==(const TrainLog&, const TrainLog&) = default;
};

/// CSV with header `epoch,train_mse,val_mse,lr,event`.
void write_train_log(const TrainLog& log, std::ostream& out);
void write_train_log(const TrainLog& log, const std::filesystem::path& path);

struct TrainResult {
  NetworkParams params;  // best-validation snapshot
  TrainLog log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on scaled data with plateau LR reduction and early
/// stopping. Deterministic given config.seed. Throws EmptySplit or
/// NonFiniteLoss.
TrainResult train_model(const SplitDataset& scaled, const TrainConfig& config, const NetworkSpec& spec = {},
                        const EpochCallback& on_epoch = {});

/// Eval-mode predictions, one per sequence.
std::vector<double> predict(const NetworkParams& params, std::span<const SampleSequence> sequences);

/// MSE of predicting each target with the last lagged violent_crime value.
/// Meaningful on scaled data, where inputs and targets share the crime scale.
double persistence_mse(std::span<const SampleSequence> sequences);

}  // namespace panelcast

#endif  // PANELCAST_TRAINING_HPP_
