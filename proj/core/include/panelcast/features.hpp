#ifndef PANELCAST_FEATURES_HPP_
#define PANELCAST_FEATURES_HPP_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "panelcast/matrix.hpp"
#include "panelcast/panel.hpp"

namespace panelcast {

inline constexpr std::size_t kFeatureCount = 10;

/// Column order of every engineered feature vector.
enum class Feature : std::size_t {
  ViolentCrime = 0,
  Population,
  UnemploymentRate,
  MedianIncome,
  HsGradRate,
  PoliticalStatus,
  PctMale,
  PctFemale,
  CrimeRollingMean,
  CrimeRollingStd,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "violent_crime", "population", "unemployment_rate", "median_income", "hs_grad_rate",
    "political_status", "pct_male", "pct_female", "crime_rolling_mean", "crime_rolling_std"};

using FeatureVector = std::array<double, kFeatureCount>;

struct FeatureOptions {
  int lag = 5;
  int rolling_mean_window = 3;
  int rolling_std_window = 4;
};

/// A lag window of engineered rows (oldest first) and the value to predict.
struct SampleSequence {
  std::string state;
  int target_year = 0;
  Matrix inputs;  // lag x kFeatureCount
  double target = 0.0;
};

struct SplitDataset {
  std::vector<SampleSequence> train;
  std::vector<SampleSequence> validation;
  std::vector<SampleSequence> test;
};

/// Per-column z-score statistics fit on training rows only.
struct Scaler {
  static constexpr double kStdFloor = 1e-8;
  FeatureVector means{};
  FeatureVector stds{};

  double scale(std::size_t column, double value) const { return (value - means[column]) / stds[column]; }
  double unscale_target(double scaled) const { return scaled * stds[0] + means[0]; }
};

/// R -> -1, D -> +1, S -> 0.
double encode_political(PoliticalStatus status) noexcept;

/// Trailing-window statistics; entries before the first full window are nullopt.
/// Both throw WindowTooLarge when the window exceeds the series length.
std::vector<std::optional<double>> rolling_mean(std::span<const double> series, int window);
/// Population standard deviation (divides by `window`). Requires window >= 2.
std::vector<std::optional<double>> rolling_std(std::span<const double> series, int window);

/// Engineered feature rows for one state's contiguous records; rows whose
/// rolling columns are undefined are nullopt.
std::vector<std::optional<FeatureVector>> engineer_features(std::span<const PanelRecord> rows,
                                                            const FeatureOptions& options = {});

/// One sequence per state per target year with a fully defined lag window,
/// ordered by (state, target_year).
std::vector<SampleSequence> build_sequences(const PanelDataset& dataset, const FeatureOptions& options = {});

/// Chronological split: the latest target year is test, the one before it is
/// validation, and everything earlier is training.
SplitDataset time_series_split(std::vector<SampleSequence> sequences);

Scaler fit_scaler(std::span<const SampleSequence> train);

/// Scales every input column and the target (with the violent_crime column).
std::vector<SampleSequence> apply_scaler(const Scaler& scaler, std::span<const SampleSequence> sequences);
SplitDataset apply_scaler(const Scaler& scaler, const SplitDataset& split);

/// Debug export: one row per (state, target_year, timestep).
void write_sequences_csv(std::span<const SampleSequence> sequences, std::ostream& out);
void write_sequences_csv(std::span<const SampleSequence> sequences, const std::filesystem::path& path);

}  // namespace panelcast

#endif  // PANELCAST_FEATURES_HPP_
