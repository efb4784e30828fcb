#ifndef PANELCAST_LSTM_HPP_
#define PANELCAST_LSTM_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>

#include "panelcast/matrix.hpp"

namespace panelcast {

enum class LstmGate : std::size_t { Input = 0, Forget = 1, Cell = 2, Output = 3 };
inline constexpr std::size_t kLstmGates = 4;

/// Peephole-free LSTM. Gate k uses input_weights[k] (hidden x input),
/// recurrent_weights[k] (hidden x hidden) and biases[k].
struct LstmParams {
  std::array<Matrix, kLstmGates> input_weights;
  std::array<Matrix, kLstmGates> recurrent_weights;
  std::array<Vector, kLstmGates> biases;

  static LstmParams zeros(Eigen::Index input_size, Eigen::Index hidden_size);
  Eigen::Index input_size() const { return input_weights[0].cols(); }
  Eigen::Index hidden_size() const { return input_weights[0].rows(); }

  const Matrix& w(LstmGate g) const { return input_weights[static_cast<std::size_t>(g)]; }
  const Matrix& u(LstmGate g) const { return recurrent_weights[static_cast<std::size_t>(g)]; }
  const Vector& b(LstmGate g) const { return biases[static_cast<std::size_t>(g)]; }

  /// Calls f(name, span) for every tensor in a fixed order.
  template <class Self, class F>
  static void visit(Self& self, std::string_view prefix, F&& f);
};

/// Everything the backward pass needs. Gate matrices are timesteps x hidden.
struct LstmCache {
  Matrix inputs;
  Vector h0;
  Vector c0;
  std::array<Matrix, kLstmGates> gates;
  Matrix cells;
  Matrix cells_tanh;
  Matrix hidden;
};

struct LstmOutput {
  Matrix hidden;  // timesteps x hidden
  LstmCache cache;
};

struct LstmGradients {
  LstmParams params;
  Matrix d_inputs;  // timesteps x input
  Vector d_h0;
  Vector d_c0;
};

/// Throws ShapeMismatch on inconsistent shapes.
LstmOutput lstm_forward(const LstmParams& params, const Matrix& sequence, const Vector& h0, const Vector& c0);

/// BPTT given dLoss/dh_t for every step. `severed` zeroes that gate's
/// pre-activation gradient; it exists only to prove the gradient checker can
/// catch a broken path.
LstmGradients lstm_backward(const LstmParams& params, const LstmCache& cache, const Matrix& d_hidden,
                            std::optional<LstmGate> severed = std::nullopt);

template <class Self, class F>
void LstmParams::visit(Self& self, std::string_view prefix, F&& f) {
  static constexpr std::array<const char*, kLstmGates> kNames = {"input", "forget", "cell", "output"};
  const std::string p(prefix);
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    f(p + ".input_weights." + kNames[k], std::span(self.input_weights[k].data(), self.input_weights[k].size()));
  }
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    f(p + ".recurrent_weights." + kNames[k],
      std::span(self.recurrent_weights[k].data(), self.recurrent_weights[k].size()));
  }
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    f(p + ".biases." + kNames[k], std::span(self.biases[k].data(), self.biases[k].size()));
  }
}

}  // namespace panelcast

#endif  // PANELCAST_LSTM_HPP_
