#include "panelcast/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "panelcast/csv.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

void check_window(std::span<const double> series, int window, int min_window) {
  if (window < min_window) {
    throw InvalidArgument("rolling window must be >= " + std::to_string(min_window) + ", got " +
                          std::to_string(window));
  }
  if (static_cast<std::size_t>(window) > series.size()) {
    throw WindowTooLarge("window " + std::to_string(window) + " exceeds series length " +
                         std::to_string(series.size()));
  }
}

void check_options(const FeatureOptions& options) {
  if (options.lag < 1) throw InvalidArgument("lag must be >= 1");
  if (options.rolling_mean_window < 1) throw InvalidArgument("rolling_mean_window must be >= 1");
  if (options.rolling_std_window < 2) throw InvalidArgument("rolling_std_window must be >= 2");
}

int longest_window(const FeatureOptions& options) {
  return std::max(options.rolling_mean_window, options.rolling_std_window);
}

}  // namespace

double encode_political(PoliticalStatus status) noexcept {
  switch (status) {
    case PoliticalStatus::Republican:
      return -1.0;
    case PoliticalStatus::Democrat:
      return 1.0;
    case PoliticalStatus::Split:
      break;
  }
  return 0.0;
}

std::vector<std::optional<double>> rolling_mean(std::span<const double> series, int window) {
  check_window(series, window, 1);
  const auto w = static_cast<std::size_t>(window);
  std::vector<std::optional<double>> out(series.size());
  for (std::size_t t = w - 1; t < series.size(); ++t) {
    double sum = 0.0;
    for (std::size_t k = t + 1 - w; k <= t; ++k) sum += series[k];
    out[t] = sum / static_cast<double>(w);
  }
  return out;
}

std::vector<std::optional<double>> rolling_std(std::span<const double> series, int window) {
  check_window(series, window, 2);
  const auto w = static_cast<std::size_t>(window);
  std::vector<std::optional<double>> out(series.size());
  for (std::size_t t = w - 1; t < series.size(); ++t) {
    double sum = 0.0;
    for (std::size_t k = t + 1 - w; k <= t; ++k) sum += series[k];
    const double mean = sum / static_cast<double>(w);
    double ss = 0.0;
    for (std::size_t k = t + 1 - w; k <= t; ++k) ss += (series[k] - mean) * (series[k] - mean);
    out[t] = std::sqrt(ss / static_cast<double>(w));
  }
  return out;
}

std::vector<std::optional<FeatureVector>> engineer_features(std::span<const PanelRecord> rows,
                                                            const FeatureOptions& options) {
  check_options(options);
  std::vector<std::optional<FeatureVector>> out(rows.size());
  if (rows.size() < static_cast<std::size_t>(longest_window(options))) return out;

  std::vector<double> crime(rows.size());
  std::transform(rows.begin(), rows.end(), crime.begin(), [](const PanelRecord& r) { return r.violent_crime; });
  const auto mean = rolling_mean(crime, options.rolling_mean_window);
  const auto spread = rolling_std(crime, options.rolling_std_window);

  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (!mean[t] || !spread[t]) continue;
    const auto& r = rows[t];
    out[t] = FeatureVector{r.violent_crime,
                           r.population,
                           r.unemployment_rate,
                           r.median_income,
                           r.hs_grad_rate,
                           encode_political(r.political_status),
                           r.pct_male,
                           r.pct_female,
                           *mean[t],
                           *spread[t]};
  }
  return out;
}

std::vector<SampleSequence> build_sequences(const PanelDataset& dataset, const FeatureOptions& options) {
  check_options(options);
  const auto lag = static_cast<std::size_t>(options.lag);
  const auto warmup = static_cast<std::size_t>(longest_window(options)) - 1;

  std::vector<SampleSequence> sequences;
  for (const auto& state : dataset.states()) {
    const auto rows = dataset.state_records(state);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].year != rows[i - 1].year + 1) {
        throw DataError("state " + state + " has non-contiguous years around " +
                        std::to_string(rows[i].year) + "; validate the panel first");
      }
    }
    if (rows.size() < lag + warmup + 1) {
      throw InsufficientHistory("state " + state + " has " + std::to_string(rows.size()) +
                                " years; need at least " + std::to_string(lag + warmup + 1) +
                                " for lag " + std::to_string(lag) + " and the rolling windows");
    }

    const auto features = engineer_features(rows, options);
    for (std::size_t t = lag + warmup; t < rows.size(); ++t) {
      SampleSequence seq;
      seq.state = state;
      seq.target_year = rows[t].year;
      seq.target = rows[t].violent_crime;
      seq.inputs.resize(static_cast<Eigen::Index>(lag), static_cast<Eigen::Index>(kFeatureCount));
      for (std::size_t r = 0; r < lag; ++r) {
        const auto& row = *features[t - lag + r];
        for (std::size_t c = 0; c < kFeatureCount; ++c) {
          seq.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
        }
      }
      sequences.push_back(std::move(seq));
    }
  }
  return sequences;
}

SplitDataset time_series_split(std::vector<SampleSequence> sequences) {
  std::map<std::string, int> per_state;
  std::set<int> years;
  for (const auto& s : sequences) {
    ++per_state[s.state];
    years.insert(s.target_year);
  }
  for (const auto& [state, count] : per_state) {
    if (count < 3) {
      throw InsufficientHistory("state " + state + " has " + std::to_string(count) +
                                " sequences; the split needs at least 3");
    }
  }
  if (years.size() < 3) throw InsufficientHistory("need at least 3 distinct target years to split");

  const int test_year = *years.rbegin();
  const int validation_year = *std::next(years.rbegin());
  SplitDataset split;
  for (auto& s : sequences) {
    if (s.target_year == test_year) {
      split.test.push_back(std::move(s));
    } else if (s.target_year == validation_year) {
      split.validation.push_back(std::move(s));
    } else {
      split.train.push_back(std::move(s));
    }
  }
  return split;
}

Scaler fit_scaler(std::span<const SampleSequence> train) {
  if (train.empty()) throw EmptyTrainingSet("cannot fit a scaler on an empty training set");
  Scaler scaler;
  std::size_t n = 0;
  for (const auto& s : train) {
    for (Eigen::Index r = 0; r < s.inputs.rows(); ++r) {
      for (std::size_t c = 0; c < kFeatureCount; ++c) scaler.means[c] += s.inputs(r, static_cast<Eigen::Index>(c));
      ++n;
    }
  }
  for (auto& m : scaler.means) m /= static_cast<double>(n);

  FeatureVector ss{};
  for (const auto& s : train) {
    for (Eigen::Index r = 0; r < s.inputs.rows(); ++r) {
      for (std::size_t c = 0; c < kFeatureCount; ++c) {
        const double d = s.inputs(r, static_cast<Eigen::Index>(c)) - scaler.means[c];
        ss[c] += d * d;
      }
    }
  }
  for (std::size_t c = 0; c < kFeatureCount; ++c) {
    scaler.stds[c] = std::max(std::sqrt(ss[c] / static_cast<double>(n)), Scaler::kStdFloor);
  }
  return scaler;
}

std::vector<SampleSequence> apply_scaler(const Scaler& scaler, std::span<const SampleSequence> sequences) {
  std::vector<SampleSequence> out(sequences.begin(), sequences.end());
  for (auto& s : out) {
    for (Eigen::Index r = 0; r < s.inputs.rows(); ++r) {
      for (std::size_t c = 0; c < kFeatureCount; ++c) {
        auto& x = s.inputs(r, static_cast<Eigen::Index>(c));
        x = scaler.scale(c, x);
      }
    }
    s.target = scaler.scale(0, s.target);
  }
  return out;
}

SplitDataset apply_scaler(const Scaler& scaler, const SplitDataset& split) {
  return {apply_scaler(scaler, split.train), apply_scaler(scaler, split.validation),
          apply_scaler(scaler, split.test)};
}

void write_sequences_csv(std::span<const SampleSequence> sequences, std::ostream& out) {
  out << "state,target_year,timestep";
  for (const auto name : kFeatureNames) out << ',' << name;
  out << ",target\n";
  for (const auto& s : sequences) {
    for (Eigen::Index r = 0; r < s.inputs.rows(); ++r) {
      out << s.state << ',' << s.target_year << ',' << r;
      for (Eigen::Index c = 0; c < s.inputs.cols(); ++c) out << ',' << csv::format_double(s.inputs(r, c));
      out << ',' << csv::format_double(s.target) << '\n';
    }
  }
}

void write_sequences_csv(std::span<const SampleSequence> sequences, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  write_sequences_csv(sequences, out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace panelcast
