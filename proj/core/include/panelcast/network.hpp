#ifndef PANELCAST_NETWORK_HPP_
#define PANELCAST_NETWORK_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "panelcast/gru.hpp"
#include "panelcast/lstm.hpp"
#include "panelcast/matrix.hpp"

namespace panelcast {

enum class Mode { Train, Eval };

/// Layer widths for LSTM -> GRU -> dropout -> dense(1).
struct NetworkSpec {
  int input_size = 10;
  int lstm_hidden = 64;
  int gru_hidden = 32;
  double dropout_rate = 0.2;
};

struct DenseParams {
  RowVector weights;  // 1 x input
  double bias = 0.0;
};

struct NetworkParams {
  LstmParams lstm;
  GruParams gru;
  DenseParams head;
  double dropout_rate = 0.2;
  std::uint64_t seed = 0;  // init seed, carried into checkpoints

  NetworkSpec spec() const;
  friend bool operator==(const NetworkParams& a, const NetworkParams& b);
};

/// Same tensor layout as NetworkParams.
struct NetworkGradients {
  LstmParams lstm;
  GruParams gru;
  DenseParams head;

  static NetworkGradients zeros_like(const NetworkParams& params);
  NetworkGradients& operator+=(const NetworkGradients& other);
  NetworkGradients& operator*=(double k);
};

/// Calls f(name, std::span<double or const double>) for every learnable tensor
/// in checkpoint order: LSTM, GRU, head weights, head bias.
template <class P, class F>
void visit_tensors(P& p, F&& f) {
  LstmParams::visit(p.lstm, "lstm", f);
  GruParams::visit(p.gru, "gru", f);
  f(std::string("head.weights"), std::span(p.head.weights.data(), p.head.weights.size()));
  f(std::string("head.bias"), std::span(&p.head.bias, 1));
}

template <class P>
auto tensor_spans(P& p) {
  using Span = decltype(std::span(p.head.weights.data(), 1));
  std::vector<Span> out;
  visit_tensors(p, [&](const std::string&, Span s) { out.push_back(s); });
  return out;
}

std::size_t parameter_count(const NetworkParams& params);
bool all_finite(const NetworkParams& params);

/// Glorot-uniform weights (limit sqrt(6 / (fan_in + fan_out)) per matrix),
/// zero biases except the LSTM forget gate, which starts at 1.
NetworkParams init_params(std::uint64_t seed, const NetworkSpec& spec = {});

struct DropoutOutput {
  Vector output;
  Vector mask;  // 0 or 1/(1-rate) per entry
};

/// Inverted dropout. Eval mode is the identity. Throws InvalidRate unless 0 <= rate < 1.
DropoutOutput dropout_forward(const Vector& input, double rate, Mode mode, std::mt19937_64& rng);

struct ForwardCache {
  LstmCache lstm;
  GruCache gru;
  Vector dropout_mask;
  Vector head_input;  // GRU's last hidden state after dropout
  double prediction = 0.0;
};

struct NetworkForward {
  double prediction = 0.0;
  ForwardCache cache;
};

/// `dropout_seed` seeds the mask stream; ignored in eval mode.
NetworkForward network_forward(const NetworkParams& params, const Matrix& sequence, Mode mode,
                               std::uint64_t dropout_seed = 0);

/// Optional fault injection for the gradient checker's own tests.
struct GradientFault {
  std::optional<LstmGate> lstm;
  std::optional<GruGate> gru;
};

NetworkGradients network_backward(const NetworkParams& params, const ForwardCache& cache, double d_prediction,
                                  const GradientFault& fault = {});

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Central differences of the squared error (prediction - target)^2 in eval
/// mode against the analytic gradient, over every parameter. The relative
/// error is |a - n| / max(|a|, |n|, 1e-8).
GradientCheckReport gradient_check_report(const NetworkParams& params, const Matrix& sequence, double target,
                                          double epsilon, const GradientFault& fault = {});
double gradient_check(const NetworkParams& params, const Matrix& sequence, double target, double epsilon,
                      const GradientFault& fault = {});

}  // namespace panelcast

#endif  // PANELCAST_NETWORK_HPP_
