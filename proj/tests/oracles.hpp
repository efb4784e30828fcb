#ifndef PANELCAST_TESTS_ORACLES_HPP_
#define PANELCAST_TESTS_ORACLES_HPP_

// Independent reference computations. Nothing here calls the library code it
// is used to check.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline std::vector<std::optional<double>> rolling_mean(const std::vector<double>& x, int w) {
  std::vector<std::optional<double>> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (static_cast<int>(t) + 1 < w) continue;
    double s = 0.0;
    for (int k = 0; k < w; ++k) s += x[t - static_cast<std::size_t>(k)];
    out[t] = s / w;
  }
  return out;
}

inline std::vector<std::optional<double>> rolling_std(const std::vector<double>& x, int w) {
  std::vector<std::optional<double>> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (static_cast<int>(t) + 1 < w) continue;
    double s = 0.0;
    for (int k = 0; k < w; ++k) s += x[t - static_cast<std::size_t>(k)];
    const double m = s / w;
    double q = 0.0;
    for (int k = 0; k < w; ++k) q += (x[t - static_cast<std::size_t>(k)] - m) * (x[t - static_cast<std::size_t>(k)] - m);
    out[t] = std::sqrt(q / w);
  }
  return out;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One-unit LSTM with scalar weights per gate, order i, f, g, o.
struct ScalarLstm {
  double w[4], u[4], b[4];
};

struct ScalarLstmTrace {
  std::vector<double> h, c;
};

inline ScalarLstmTrace unroll(const ScalarLstm& p, const std::vector<double>& x, double h, double c) {
  ScalarLstmTrace tr;
  for (const double xt : x) {
    const double i = sigmoid(p.w[0] * xt + p.u[0] * h + p.b[0]);
    const double f = sigmoid(p.w[1] * xt + p.u[1] * h + p.b[1]);
    const double g = std::tanh(p.w[2] * xt + p.u[2] * h + p.b[2]);
    const double o = sigmoid(p.w[3] * xt + p.u[3] * h + p.b[3]);
    c = f * c + i * g;
    h = o * std::tanh(c);
    tr.h.push_back(h);
    tr.c.push_back(c);
  }
  return tr;
}

// One-unit GRU, order z, r, n; reset applied to the recurrent term.
struct ScalarGru {
  double w[3], u[3], b[3];
};

inline std::vector<double> unroll(const ScalarGru& p, const std::vector<double>& x, double h) {
  std::vector<double> out;
  for (const double xt : x) {
    const double z = sigmoid(p.w[0] * xt + p.u[0] * h + p.b[0]);
    const double r = sigmoid(p.w[1] * xt + p.u[1] * h + p.b[1]);
    const double n = std::tanh(p.w[2] * xt + p.b[2] + r * (p.u[2] * h));
    h = (1.0 - z) * n + z * h;
    out.push_back(h);
  }
  return out;
}

struct Stats {
  double mean, range, std;
};

inline Stats brute_stats(const std::vector<double>& v) {
  double s = 0.0, lo = v[0], hi = v[0];
  for (const double x : v) {
    s += x;
    lo = x < lo ? x : lo;
    hi = x > hi ? x : hi;
  }
  const double m = s / static_cast<double>(v.size());
  double q = 0.0;
  for (const double x : v) q += (x - m) * (x - m);
  return {m, hi - lo, std::sqrt(q / static_cast<double>(v.size()))};
}

inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace oracle

namespace testing_support {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("panelcast_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support

#endif  // PANELCAST_TESTS_ORACLES_HPP_
