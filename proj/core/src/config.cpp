#include "panelcast/config.hpp"

#include <limits>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "panelcast/csv.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

using nlohmann::json;

template <class T>
void read_field(const json& obj, const std::string& key, const std::string& path, T& dest) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::filesystem::path>) {
      dest = it->template get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_unsigned()) {
          dest = it->template get<T>();
        } else if (it->template get<std::int64_t>() < 0) {
          throw ConfigError(path, "must be non-negative");
        } else {
          dest = static_cast<T>(it->template get<std::int64_t>());
        }
      } else {
        const auto v = it->template get<std::int64_t>();
        if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) {
          throw ConfigError(path, "out of range");
        }
        dest = static_cast<T>(v);
      }
    } else {
      if (!it->is_number()) throw ConfigError(path, "expected a number");
      dest = it->template get<T>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ConfigError(prefix + key, "unknown configuration key");
  }
}

TrainConfig parse_train(const json& obj) {
  if (!obj.is_object()) throw ConfigError("train", "expected an object");
  reject_unknown(obj,
                 {"learning_rate", "epochs", "batch_size", "es_patience", "lr_patience", "lr_factor", "min_lr",
                  "seed", "adam_beta1", "adam_beta2", "adam_epsilon"},
                 "train.");
  TrainConfig t;
  read_field(obj, "learning_rate", "train.learning_rate", t.learning_rate);
  read_field(obj, "epochs", "train.epochs", t.epochs);
  read_field(obj, "batch_size", "train.batch_size", t.batch_size);
  read_field(obj, "es_patience", "train.es_patience", t.es_patience);
  read_field(obj, "lr_patience", "train.lr_patience", t.lr_patience);
  read_field(obj, "lr_factor", "train.lr_factor", t.lr_factor);
  read_field(obj, "min_lr", "train.min_lr", t.min_lr);
  read_field(obj, "seed", "train.seed", t.seed);
  read_field(obj, "adam_beta1", "train.adam_beta1", t.adam_beta1);
  read_field(obj, "adam_beta2", "train.adam_beta2", t.adam_beta2);
  read_field(obj, "adam_epsilon", "train.adam_epsilon", t.adam_epsilon);
  return t;
}

}  // namespace

void CliConfig::validate() const {
  try {
    train.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("train." + e.field(), e.detail());
  }
  if (lag < 1) throw ConfigError("lag", "must be >= 1");
  if (rolling_mean_window < 1) throw ConfigError("rolling_mean_window", "must be >= 1");
  if (rolling_std_window < 2) throw ConfigError("rolling_std_window", "must be >= 2");
  if (n_trials < 1) throw ConfigError("n_trials", "must be >= 1");
}

CliConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(doc,
                 {"data_path", "out_dir", "train", "lag", "rolling_mean_window", "rolling_std_window", "n_trials",
                  "base_seed"},
                 "");
  CliConfig c;
  read_field(doc, "data_path", "data_path", c.data_path);
  read_field(doc, "out_dir", "out_dir", c.out_dir);
  if (const auto it = doc.find("train"); it != doc.end()) c.train = parse_train(*it);
  read_field(doc, "lag", "lag", c.lag);
  read_field(doc, "rolling_mean_window", "rolling_mean_window", c.rolling_mean_window);
  read_field(doc, "rolling_std_window", "rolling_std_window", c.rolling_std_window);
  read_field(doc, "n_trials", "n_trials", c.n_trials);
  read_field(doc, "base_seed", "base_seed", c.base_seed);
  return c;
}

CliConfig load_config(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const CliConfig& config) {
  const auto& t = config.train;
  json doc = {
      {"data_path", config.data_path.string()},
      {"out_dir", config.out_dir.string()},
      {"train",
       {{"learning_rate", t.learning_rate},
        {"epochs", t.epochs},
        {"batch_size", t.batch_size},
        {"es_patience", t.es_patience},
        {"lr_patience", t.lr_patience},
        {"lr_factor", t.lr_factor},
        {"min_lr", t.min_lr},
        {"seed", t.seed},
        {"adam_beta1", t.adam_beta1},
        {"adam_beta2", t.adam_beta2},
        {"adam_epsilon", t.adam_epsilon}}},
      {"lag", config.lag},
      {"rolling_mean_window", config.rolling_mean_window},
      {"rolling_std_window", config.rolling_std_window},
      {"n_trials", config.n_trials},
      {"base_seed", config.base_seed},
  };
  return doc.dump(2) + "\n";
}

void save_config(const CliConfig& config, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << config_to_json(config);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace panelcast
