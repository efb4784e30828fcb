#include "cli.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "panelcast/checkpoint.hpp"
#include "panelcast/config.hpp"
#include "panelcast/errors.hpp"
#include "panelcast/panel.hpp"
#include "panelcast/report.hpp"
#include "panelcast/trials.hpp"

namespace panelcast::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::string config_path;
  CLI::Option* out = nullptr;
  std::string out_dir = ".";
  CLI::Option* seed = nullptr;
  std::uint64_t seed_value = 0;
  int jobs = 1;
};

// Flags that override fields loaded from --config. Each registered flag
// applies itself only when given on the command line.
class Overrides {
 public:
  template <class T, class Set>
  void add(CLI::App* app, const std::string& name, T default_value, const std::string& description, Set set) {
    auto value = std::make_shared<T>(default_value);
    auto* opt = app->add_option(name, *value, description)->capture_default_str();
    apply_.push_back([opt, value, set](CliConfig& c) {
      if (opt->count() > 0) set(c, *value);
    });
  }

  void apply(CliConfig& config) const {
    for (const auto& f : apply_) f(config);
  }

 private:
  std::vector<std::function<void(CliConfig&)>> apply_;
};

void add_pipeline_flags(CLI::App* app, Overrides& o) {
  const CliConfig d;
  o.add(app, "--data", std::string(), "Panel CSV to read (overrides data_path)",
        [](CliConfig& c, const std::string& v) { c.data_path = v; });
  o.add(app, "--lr", d.train.learning_rate, "Adam learning rate",
        [](CliConfig& c, const double& v) { c.train.learning_rate = v; });
  o.add(app, "--epochs", d.train.epochs, "Maximum training epochs",
        [](CliConfig& c, const int& v) { c.train.epochs = v; });
  o.add(app, "--batch-size", d.train.batch_size, "Mini-batch size",
        [](CliConfig& c, const int& v) { c.train.batch_size = v; });
  o.add(app, "--es-patience", d.train.es_patience, "Early-stopping patience in epochs",
        [](CliConfig& c, const int& v) { c.train.es_patience = v; });
  o.add(app, "--lr-patience", d.train.lr_patience, "Plateau epochs before the learning rate is reduced",
        [](CliConfig& c, const int& v) { c.train.lr_patience = v; });
  o.add(app, "--lr-factor", d.train.lr_factor, "Learning-rate reduction factor",
        [](CliConfig& c, const double& v) { c.train.lr_factor = v; });
  o.add(app, "--min-lr", d.train.min_lr, "Learning-rate floor",
        [](CliConfig& c, const double& v) { c.train.min_lr = v; });
  o.add(app, "--lag", d.lag, "Timesteps per input sequence",
        [](CliConfig& c, const int& v) { c.lag = v; });
  o.add(app, "--rolling-mean-window", d.rolling_mean_window, "Window of the rolling crime mean",
        [](CliConfig& c, const int& v) { c.rolling_mean_window = v; });
  o.add(app, "--rolling-std-window", d.rolling_std_window, "Window of the rolling crime std",
        [](CliConfig& c, const int& v) { c.rolling_std_window = v; });
}

CliConfig resolve_config(const GlobalFlags& g, const Overrides& overrides, bool seed_is_base_seed) {
  CliConfig config = g.config_path.empty() ? CliConfig{} : load_config(g.config_path);
  overrides.apply(config);
  if (g.out->count() > 0) config.out_dir = g.out_dir;
  if (g.seed->count() > 0) {
    if (seed_is_base_seed) {
      config.base_seed = g.seed_value;
    } else {
      config.train.seed = g.seed_value;
    }
  }
  config.validate();
  if (config.data_path.empty()) throw ConfigError("data_path", "no panel given; use --data or set data_path");
  return config;
}

void print_issues(const ValidationReport& report, std::ostream& os) {
  for (const auto& issue : report.errors) {
    os << issue.state << ' ' << issue.year << ' ' << issue.field << ": " << issue.message << '\n';
  }
}

// Loads and validates the panel; returns false after printing the violations.
bool load_valid_panel(const fs::path& path, PanelDataset& dataset, std::ostream& err) {
  dataset = load_panel(path);
  const auto report = validate(dataset);
  if (report.is_valid()) return true;
  err << path.string() << ": " << report.errors.size() << " validation errors\n";
  print_issues(report, err);
  return false;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
}

int cmd_synth(const GlobalFlags& g, int states, int first_year, int years, const std::string& output,
              std::ostream& err) {
  const fs::path path = output.empty() ? fs::path(g.out_dir) / "panel.csv" : fs::path(output);
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  const auto dataset = synthesize_panel(g.seed_value, states, first_year, years);
  write_panel(dataset, path);
  err << "wrote " << dataset.size() << " records to " << path.string() << '\n';
  return kOk;
}

int cmd_validate(const GlobalFlags& g, std::string data, std::ostream& out) {
  if (data.empty() && !g.config_path.empty()) data = load_config(g.config_path).data_path.string();
  if (data.empty()) throw ConfigError("data_path", "no panel given; pass a path or use --config");
  const auto report = validate(load_panel(data));
  out << report.errors.size() << " errors\n";
  print_issues(report, out);
  return report.is_valid() ? kOk : kDataFailure;
}

int cmd_train(const GlobalFlags& g, const Overrides& overrides, std::ostream& err) {
  const auto config = resolve_config(g, overrides, false);
  const fs::path out_dir = config.out_dir;
  ensure_directory(out_dir);
  PanelDataset dataset;
  if (!load_valid_panel(config.data_path, dataset, err)) return kDataFailure;

  const auto data = prepare_data(dataset, config.feature_options());
  err << "training on " << data.scaled.train.size() << " sequences, validating on "
      << data.scaled.validation.size() << ", testing on " << data.scaled.test.size() << '\n';
  const auto result = train_model(data.scaled, config.train, {}, [&err](const EpochRecord& r) {
    err << "epoch " << r.epoch << " train_mse " << r.train_mse << " val_mse " << r.val_mse << " lr " << r.lr
        << (r.early_stopped ? " (early stop)" : "") << '\n';
  });
  const auto predictions = test_predictions(result.params, data);

  write_checkpoint(result.params, out_dir / "model.ckpt");
  write_train_log(result.log, out_dir / "train_log.csv");
  write_predictions_csv(predictions, out_dir / "predictions.csv");
  err << "best epoch " << result.log.best_epoch << ", test MSE " << test_mse(predictions) << ", total loss "
      << total_loss(predictions) << "; outputs in " << out_dir.string() << '\n';
  return kOk;
}

int cmd_trials(const GlobalFlags& g, const Overrides& overrides, int n_trials, bool n_trials_given,
               bool omit_timing, const ErrorBarOptions& chart_options, std::ostream& err) {
  auto config = resolve_config(g, overrides, true);
  if (n_trials_given) config.n_trials = n_trials;
  config.validate();
  const fs::path out_dir = config.out_dir;
  ensure_directory(out_dir);
  PanelDataset dataset;
  if (!load_valid_panel(config.data_path, dataset, err)) return kDataFailure;

  TrialOptions options;
  options.train = config.train;
  options.features = config.feature_options();
  options.n_trials = config.n_trials;
  options.base_seed = config.base_seed;
  options.jobs = g.jobs;
  options.omit_timing = omit_timing;
  options.on_trial_done = [&err, &config](const TrialMetrics& t) {
    err << "trial " << t.trial_id + 1 << '/' << config.n_trials << " seed " << t.seed << " total_loss "
        << t.total_loss << " test_mse " << t.test_mse << '\n';
  };
  const auto result = run_trials(dataset, options);

  write_trials_csv(result.trials, out_dir / "trials.csv");
  write_per_state_csv(result.report, out_dir / "per_state.csv");
  write_report_json(result.report, out_dir / "report.json");
  write_svg(render_error_bars(result.report, chart_options), out_dir / "error_bars.svg");
  err << "mean total loss " << result.report.total_loss.mean << ", mean test MSE " << result.report.test_mse.mean
      << ", mean percent error " << result.report.percent_error.mean << "; outputs in " << out_dir.string()
      << '\n';
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Panel forecasting of state violent crime with an LSTM-GRU network", "panelcast"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config_path, "JSON configuration file; flags override its fields");
  g.out = app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  g.seed = app.add_option("--seed", g.seed_value,
                          "Seed: generator seed for synth, training seed for train, base seed for trials")
               ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for trials")->capture_default_str()->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic panel CSV");
  int states = 50;
  int first_year = 2000;
  int years = 20;
  std::string output;
  const CLI::Validator state_bound(
      [](std::string& s) -> std::string {
        const int n = std::stoi(s);
        if (n < 1 || n > static_cast<int>(kStateCodes.size())) {
          return "states must be between 1 and 50 (there are 50 state codes), got " + s;
        }
        return {};
      },
      "1..50");
  synth->add_option("--states", states, "Number of states (at most 50)")->capture_default_str()->check(state_bound);
  synth->add_option("--first-year", first_year, "First year of the panel")->capture_default_str();
  synth->add_option("--years", years, "Years per state")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--output,-o", output, "Output CSV (default: <out>/panel.csv)");

  auto* validate_cmd = app.add_subcommand("validate", "Check a panel CSV against the schema and invariants");
  std::string validate_path;
  validate_cmd->add_option("data,--data", validate_path, "Panel CSV (default: data_path from --config)");

  auto* train = app.add_subcommand("train", "Train once and write checkpoint, train log, and test predictions");
  Overrides train_overrides;
  add_pipeline_flags(train, train_overrides);

  auto* trials = app.add_subcommand("trials", "Run seeded trials and write aggregate reports and the error-bar chart");
  Overrides trial_overrides;
  add_pipeline_flags(trials, trial_overrides);
  int n_trials = CliConfig{}.n_trials;
  bool omit_timing = false;
  ErrorBarOptions chart;
  auto* n_trials_opt =
      trials->add_option("--n-trials", n_trials, "Number of trials")->capture_default_str()->check(CLI::PositiveNumber);
  trials->add_flag("--omit-timing", omit_timing, "Write zero wall/CPU times so outputs are byte-stable");
  trials->add_option("--width", chart.width, "Chart width in pixels")->capture_default_str()->check(CLI::PositiveNumber);
  trials->add_option("--height", chart.height, "Chart height in pixels")->capture_default_str()->check(CLI::PositiveNumber);

  for (auto* sub : {synth, validate_cmd, train, trials}) {
    sub->fallthrough();
    sub->footer("Global options --config, --out [.], --seed [0] and --jobs [1] are accepted here too.");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (*synth) return cmd_synth(g, states, first_year, years, output, err);
    if (*validate_cmd) return cmd_validate(g, validate_path, out);
    if (*train) return cmd_train(g, train_overrides, err);
    return cmd_trials(g, trial_overrides, n_trials, n_trials_opt->count() > 0, omit_timing, chart, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataFailure;
  }
}

}  // namespace panelcast::cli
