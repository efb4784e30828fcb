#include "panelcast/trials.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "panelcast/csv.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

double thread_cpu_seconds() {
  rusage usage{};
  getrusage(RUSAGE_THREAD, &usage);
  const auto seconds = [](const timeval& tv) { return static_cast<double>(tv.tv_sec) + 1e-6 * static_cast<double>(tv.tv_usec); };
  return seconds(usage.ru_utime) + seconds(usage.ru_stime);
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  auto out = csv::open_output(path);
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TrialMetrics run_one(const PreparedData& data, const TrialOptions& options, int trial_id) {
  const auto start_wall = std::chrono::steady_clock::now();
  const double start_cpu = thread_cpu_seconds();

  TrainConfig config = options.train;
  config.seed = options.base_seed + static_cast<std::uint64_t>(trial_id);
  auto trained = train_model(data.scaled, config, options.network);
  const auto predictions = test_predictions(trained.params, data);
  auto metrics = score_trial(trial_id, config.seed, predictions, trained.log.stopped_epoch);

  if (!options.omit_timing) {
    metrics.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_wall).count();
    metrics.cpu_time_s = thread_cpu_seconds() - start_cpu;
  }
  return metrics;
}

}  // namespace

PreparedData prepare_data(const PanelDataset& dataset, const FeatureOptions& options) {
  PreparedData data;
  data.raw = time_series_split(build_sequences(dataset, options));
  data.scaler = fit_scaler(data.raw.train);
  data.scaled = apply_scaler(data.scaler, data.raw);
  return data;
}

std::vector<StatePrediction> test_predictions(const NetworkParams& params, const PreparedData& data) {
  const auto scaled = predict(params, data.scaled.test);
  std::vector<StatePrediction> out;
  out.reserve(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const auto& seq = data.raw.test[i];
    out.push_back({seq.state, seq.target_year, data.scaler.unscale_target(scaled[i]), seq.target});
  }
  return out;
}

void write_predictions_csv(std::span<const StatePrediction> predictions, std::ostream& out) {
  out << "state,year,predicted,actual\n";
  for (const auto& p : predictions) {
    out << p.state << ',' << p.year << ',' << csv::format_double(p.predicted) << ','
        << csv::format_double(p.actual) << '\n';
  }
}

void write_predictions_csv(std::span<const StatePrediction> predictions, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_predictions_csv(predictions, out); });
}

TrialsResult run_trials(const PanelDataset& dataset, const TrialOptions& options) {
  if (options.n_trials < 1) throw InvalidArgument("n_trials must be >= 1");
  if (options.jobs < 1) throw InvalidArgument("jobs must be >= 1");
  options.train.validate();
  const PreparedData data = prepare_data(dataset, options.features);

  const auto n = static_cast<std::size_t>(options.n_trials);
  std::vector<TrialMetrics> results(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = run_one(data, options, static_cast<int>(i));
        if (options.on_trial_done) {
          std::lock_guard lock(callback_mutex);
          options.on_trial_done(results[i]);
        }
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const auto threads = std::min(n, static_cast<std::size_t>(options.jobs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw TrialFailed(static_cast<int>(i), e.what());
    }
  }

  TrialsResult out;
  out.report = aggregate_trials(results);
  out.trials = std::move(results);
  return out;
}

void write_trials_csv(std::span<const TrialMetrics> trials, std::ostream& out) {
  out << "trial_id,seed,total_loss,test_mse,wall_time_s,cpu_time_s,stopped_epoch\n";
  for (const auto& t : trials) {
    out << t.trial_id << ',' << t.seed << ',' << csv::format_double(t.total_loss) << ','
        << csv::format_double(t.test_mse) << ',' << csv::format_double(t.wall_time_s) << ','
        << csv::format_double(t.cpu_time_s) << ',' << t.stopped_epoch << '\n';
  }
}

void write_trials_csv(std::span<const TrialMetrics> trials, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_trials_csv(trials, out); });
}

void write_per_state_csv(const AggregateReport& report, std::ostream& out) {
  out << "state,actual,mean_predicted,adl,ape\n";
  for (const auto& s : report.per_state) {
    out << s.state << ',' << csv::format_double(s.actual) << ',' << csv::format_double(s.mean_predicted) << ','
        << csv::format_double(s.adl) << ',' << csv::format_double(s.ape) << '\n';
  }
}

void write_per_state_csv(const AggregateReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_per_state_csv(report, out); });
}

std::string report_to_json(const AggregateReport& report) {
  using nlohmann::ordered_json;
  const auto stats = [](const ScalarStats& s) {
    return ordered_json{{"mean", s.mean}, {"range", s.range}, {"std", s.std}};
  };
  ordered_json doc;
  doc["n_trials"] = report.n_trials;
  doc["total_loss"] = stats(report.total_loss);
  doc["test_mse"] = stats(report.test_mse);
  doc["percent_error"] = stats(report.percent_error);
  doc["wall_time_s"] = stats(report.wall_time_s);
  doc["cpu_time_s"] = stats(report.cpu_time_s);
  doc["stopped_epoch"] = stats(report.stopped_epoch);
  auto per_state = ordered_json::array();
  for (const auto& s : report.per_state) {
    per_state.push_back({{"state", s.state},
                         {"actual", s.actual},
                         {"mean_predicted", s.mean_predicted},
                         {"adl", s.adl},
                         {"ape", s.ape}});
  }
  doc["per_state"] = std::move(per_state);
  return doc.dump(2) + "\n";
}

void write_report_json(const AggregateReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { out << report_to_json(report); });
}

}  // namespace panelcast
