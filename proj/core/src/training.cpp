#include "panelcast/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "panelcast/csv.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

double eval_mse(const NetworkParams& params, std::span<const SampleSequence> sequences) {
  double sum = 0.0;
  for (const auto& s : sequences) {
    const double d = network_forward(params, s.inputs, Mode::Eval).prediction - s.target;
    sum += d * d;
  }
  return sum / static_cast<double>(sequences.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate", "must be positive");
  }
  if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
  if (es_patience < 1) throw ConfigError("es_patience", "must be >= 1");
  if (lr_patience < 1) throw ConfigError("lr_patience", "must be >= 1");
  if (!(lr_factor > 0.0 && lr_factor < 1.0)) throw ConfigError("lr_factor", "must be in (0, 1)");
  if (!(min_lr > 0.0)) throw ConfigError("min_lr", "must be positive");
  if (!(learning_rate > min_lr)) throw ConfigError("learning_rate", "must exceed min_lr");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("adam_beta1", "must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("adam_beta2", "must be in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw ConfigError("adam_epsilon", "must be positive");
}

MseResult mse_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.empty()) throw EmptyInput("mse_loss needs at least one prediction");
  if (predictions.size() != targets.size()) throw ShapeMismatch("predictions and targets differ in length");
  const auto n = static_cast<double>(predictions.size());
  MseResult out;
  out.gradient.resize(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    out.loss += d * d;
    out.gradient[i] = 2.0 * d / n;
  }
  out.loss /= n;
  return out;
}

AdamState AdamState::zeros_like(const NetworkParams& params) {
  return {NetworkGradients::zeros_like(params), NetworkGradients::zeros_like(params), 0};
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::int64_t step, double lr, double beta1, double beta2, double epsilon) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    throw ShapeMismatch("Adam buffers differ in size");
  }
  const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

void adam_step(NetworkParams& params, const NetworkGradients& grads, AdamState& state, double lr,
               const TrainConfig& config) {
  auto p = tensor_spans(params);
  const auto g = tensor_spans(grads);
  auto m = tensor_spans(state.first_moment);
  auto v = tensor_spans(state.second_moment);
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw ShapeMismatch("Adam state does not mirror the parameters");
  }
  ++state.step_count;
  for (std::size_t i = 0; i < p.size(); ++i) {
    adam_update(p[i], g[i], m[i], v[i], state.step_count, lr, config.adam_beta1, config.adam_beta2,
                config.adam_epsilon);
  }
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n_samples, std::size_t batch_size,
                                                   std::uint64_t seed, std::uint64_t epoch) {
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, 0x5348554646ull, epoch));  // "SHUFF"
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n_samples; start += batch_size) {
    const auto end = std::min(start + batch_size, n_samples);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

bool early_stop_update(EarlyStopState& state, double val_loss, const NetworkParams& params, int epoch) {
  if (val_loss < state.best_val_loss - kImprovementThreshold) {
    state.best_val_loss = val_loss;
    state.epochs_since_improve = 0;
    state.best_epoch = epoch;
    state.best_params = params;
  } else {
    ++state.epochs_since_improve;
  }
  return state.epochs_since_improve >= state.patience;
}

LrSchedulerState LrSchedulerState::from_config(const TrainConfig& config) {
  LrSchedulerState s;
  s.current_lr = config.learning_rate;
  s.patience = config.lr_patience;
  s.factor = config.lr_factor;
  s.min_lr = config.min_lr;
  return s;
}

bool lr_scheduler_update(LrSchedulerState& state, double val_loss) {
  if (val_loss < state.best_val_loss - kImprovementThreshold) {
    state.best_val_loss = val_loss;
    state.epochs_since_improve = 0;
    return false;
  }
  if (++state.epochs_since_improve < state.patience) return false;
  state.epochs_since_improve = 0;
  const double reduced = std::max(state.current_lr * state.factor, state.min_lr);
  const bool changed = reduced < state.current_lr;
  state.current_lr = reduced;
  return changed;
}

void write_train_log(const TrainLog& log, std::ostream& out) {
  out << "epoch,train_mse,val_mse,lr,event\n";
  for (const auto& r : log.records) {
    std::string event;
    if (r.lr_reduced) event = "lr_reduced";
    if (r.early_stopped) event += event.empty() ? "early_stopped" : "|early_stopped";
    out << r.epoch << ',' << csv::format_double(r.train_mse) << ',' << csv::format_double(r.val_mse) << ','
        << csv::format_double(r.lr) << ',' << event << '\n';
  }
}

void write_train_log(const TrainLog& log, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_train_log(log, out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TrainResult train_model(const SplitDataset& scaled, const TrainConfig& config, const NetworkSpec& spec,
                        const EpochCallback& on_epoch) {
  config.validate();
  if (scaled.train.empty()) throw EmptySplit("training split is empty");
  if (scaled.validation.empty()) throw EmptySplit("validation split is empty");

  NetworkParams params = init_params(config.seed, spec);
  AdamState adam = AdamState::zeros_like(params);
  LrSchedulerState scheduler = LrSchedulerState::from_config(config);
  EarlyStopState stopper;
  stopper.patience = config.es_patience;

  const auto& train = scaled.train;
  TrainLog log;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.lr = scheduler.current_lr;

    double train_sq = 0.0;
    const auto batches = make_batches(train.size(), static_cast<std::size_t>(config.batch_size), config.seed,
                                      static_cast<std::uint64_t>(epoch));
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];
      const double scale = 2.0 / static_cast<double>(batch.size());
      NetworkGradients grads = NetworkGradients::zeros_like(params);
      for (const std::size_t idx : batch) {
        const auto mask_seed = derive_seed(config.seed, static_cast<std::uint64_t>(epoch), idx);
        const auto fwd = network_forward(params, train[idx].inputs, Mode::Train, mask_seed);
        const double err = fwd.prediction - train[idx].target;
        train_sq += err * err;
        grads += network_backward(params, fwd.cache, scale * err);
      }
      adam_step(params, grads, adam, scheduler.current_lr, config);
    }
    record.train_mse = train_sq / static_cast<double>(train.size());
    record.val_mse = eval_mse(params, scaled.validation);
    if (!std::isfinite(record.train_mse) || !std::isfinite(record.val_mse) || !all_finite(params)) {
      throw NonFiniteLoss(epoch);
    }

    record.lr_reduced = lr_scheduler_update(scheduler, record.val_mse);
    record.early_stopped = early_stop_update(stopper, record.val_mse, params, epoch);
    log.records.push_back(record);
    if (on_epoch) on_epoch(record);
    if (record.early_stopped) break;
  }

  log.stopped_epoch = log.records.back().epoch;
  log.best_epoch = stopper.best_epoch;
  return {std::move(*stopper.best_params), std::move(log)};
}

std::vector<double> predict(const NetworkParams& params, std::span<const SampleSequence> sequences) {
  std::vector<double> out;
  out.reserve(sequences.size());
  for (const auto& s : sequences) out.push_back(network_forward(params, s.inputs, Mode::Eval).prediction);
  return out;
}

double persistence_mse(std::span<const SampleSequence> sequences) {
  if (sequences.empty()) throw EmptyInput("persistence_mse needs at least one sequence");
  double sum = 0.0;
  for (const auto& s : sequences) {
    const double last = s.inputs(s.inputs.rows() - 1, static_cast<Eigen::Index>(Feature::ViolentCrime));
    sum += (last - s.target) * (last - s.target);
  }
  return sum / static_cast<double>(sequences.size());
}

}  // namespace panelcast
