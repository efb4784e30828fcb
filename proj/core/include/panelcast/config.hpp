#ifndef PANELCAST_CONFIG_HPP_
#define PANELCAST_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "panelcast/features.hpp"
#include "panelcast/training.hpp"

namespace panelcast {

struct CliConfig {
  std::filesystem::path data_path;
  std::filesystem::path out_dir = ".";
  TrainConfig train;
  int lag = 5;
  int rolling_mean_window = 3;
  int rolling_std_window = 4;
  int n_trials = 50;
  std::uint64_t base_seed = 0;

  FeatureOptions feature_options() const { return {lag, rolling_mean_window, rolling_std_window}; }

  /// Throws ConfigError naming the first offending field, including nested
  /// `train.*` fields.
  void validate() const;
  friend bool operator==(const CliConfig&, const CliConfig&) = default;
};

/// Parses a JSON document whose keys mirror CliConfig (and TrainConfig under
/// "train"). Missing keys keep their defaults; unknown keys and wrong types
/// throw ConfigError.
CliConfig parse_config(const std::string& json_text);
CliConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const CliConfig& config);
void save_config(const CliConfig& config, const std::filesystem::path& path);

}  // namespace panelcast

#endif  // PANELCAST_CONFIG_HPP_
