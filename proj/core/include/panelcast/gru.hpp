#ifndef PANELCAST_GRU_HPP_
#define PANELCAST_GRU_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>

#include "panelcast/matrix.hpp"

namespace panelcast {

enum class GruGate : std::size_t { Update = 0, Reset = 1, Candidate = 2 };
inline constexpr std::size_t kGruGates = 3;

/// GRU with the reset gate applied to the recurrent product:
///   n_t = tanh(W_n x_t + b_n + r_t * (U_n h_{t-1}))
///   h_t = (1 - z_t) * n_t + z_t * h_{t-1}
struct GruParams {
  std::array<Matrix, kGruGates> input_weights;
  std::array<Matrix, kGruGates> recurrent_weights;
  std::array<Vector, kGruGates> biases;

  static GruParams zeros(Eigen::Index input_size, Eigen::Index hidden_size);
  Eigen::Index input_size() const { return input_weights[0].cols(); }
  Eigen::Index hidden_size() const { return input_weights[0].rows(); }

  const Matrix& w(GruGate g) const { return input_weights[static_cast<std::size_t>(g)]; }
  const Matrix& u(GruGate g) const { return recurrent_weights[static_cast<std::size_t>(g)]; }
  const Vector& b(GruGate g) const { return biases[static_cast<std::size_t>(g)]; }

  template <class Self, class F>
  static void visit(Self& self, std::string_view prefix, F&& f);
};

struct GruCache {
  Matrix inputs;
  Vector h0;
  Matrix update;               // z
  Matrix reset;                // r
  Matrix candidate;            // n
  Matrix recurrent_candidate;  // U_n h_{t-1}, before the reset product
  Matrix hidden;
};

struct GruOutput {
  Matrix hidden;
  GruCache cache;
};

struct GruGradients {
  GruParams params;
  Matrix d_inputs;
  Vector d_h0;
};

GruOutput gru_forward(const GruParams& params, const Matrix& sequence, const Vector& h0);

GruGradients gru_backward(const GruParams& params, const GruCache& cache, const Matrix& d_hidden,
                          std::optional<GruGate> severed = std::nullopt);

template <class Self, class F>
void GruParams::visit(Self& self, std::string_view prefix, F&& f) {
  static constexpr std::array<const char*, kGruGates> kNames = {"update", "reset", "candidate"};
  const std::string p(prefix);
  for (std::size_t k = 0; k < kGruGates; ++k) {
    f(p + ".input_weights." + kNames[k], std::span(self.input_weights[k].data(), self.input_weights[k].size()));
  }
  for (std::size_t k = 0; k < kGruGates; ++k) {
    f(p + ".recurrent_weights." + kNames[k],
      std::span(self.recurrent_weights[k].data(), self.recurrent_weights[k].size()));
  }
  for (std::size_t k = 0; k < kGruGates; ++k) {
    f(p + ".biases." + kNames[k], std::span(self.biases[k].data(), self.biases[k].size()));
  }
}

}  // namespace panelcast

#endif  // PANELCAST_GRU_HPP_
