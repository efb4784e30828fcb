#include "panelcast/lstm.hpp"

#include "activations.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

constexpr auto kI = static_cast<std::size_t>(LstmGate::Input);
constexpr auto kF = static_cast<std::size_t>(LstmGate::Forget);
constexpr auto kG = static_cast<std::size_t>(LstmGate::Cell);
constexpr auto kO = static_cast<std::size_t>(LstmGate::Output);

void check_params(const LstmParams& p) {
  const auto in = p.input_size();
  const auto hid = p.hidden_size();
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    if (p.input_weights[k].rows() != hid || p.input_weights[k].cols() != in ||
        p.recurrent_weights[k].rows() != hid || p.recurrent_weights[k].cols() != hid ||
        p.biases[k].size() != hid) {
      throw ShapeMismatch("LSTM gate tensors disagree on input/hidden sizes");
    }
  }
}

}  // namespace

LstmParams LstmParams::zeros(Eigen::Index input_size, Eigen::Index hidden_size) {
  LstmParams p;
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    p.input_weights[k] = Matrix::Zero(hidden_size, input_size);
    p.recurrent_weights[k] = Matrix::Zero(hidden_size, hidden_size);
    p.biases[k] = Vector::Zero(hidden_size);
  }
  return p;
}

LstmOutput lstm_forward(const LstmParams& params, const Matrix& sequence, const Vector& h0, const Vector& c0) {
  check_params(params);
  const auto hid = params.hidden_size();
  if (sequence.cols() != params.input_size()) {
    throw ShapeMismatch("LSTM expects " + std::to_string(params.input_size()) + " input columns, got " +
                        std::to_string(sequence.cols()));
  }
  if (h0.size() != hid || c0.size() != hid) throw ShapeMismatch("LSTM initial state has the wrong size");

  const auto steps = sequence.rows();
  LstmCache cache;
  cache.inputs = sequence;
  cache.h0 = h0;
  cache.c0 = c0;
  for (auto& g : cache.gates) g.resize(steps, hid);
  cache.cells.resize(steps, hid);
  cache.cells_tanh.resize(steps, hid);
  cache.hidden.resize(steps, hid);

  Vector h = h0;
  Vector c = c0;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Vector x = sequence.row(t).transpose();
    auto pre = [&](std::size_t k) -> Vector {
      return params.input_weights[k] * x + params.recurrent_weights[k] * h + params.biases[k];
    };
    const Vector i = detail::sigmoid(pre(kI));
    const Vector f = detail::sigmoid(pre(kF));
    const Vector g = detail::tanh(pre(kG));
    const Vector o = detail::sigmoid(pre(kO));
    assert(detail::in_unit_interval(i) && detail::in_unit_interval(f) && detail::in_unit_interval(o));
    assert(detail::in_tanh_range(g));

    c = f.cwiseProduct(c) + i.cwiseProduct(g);
    const Vector tc = detail::tanh(c);
    h = o.cwiseProduct(tc);

    cache.gates[kI].row(t) = i.transpose();
    cache.gates[kF].row(t) = f.transpose();
    cache.gates[kG].row(t) = g.transpose();
    cache.gates[kO].row(t) = o.transpose();
    cache.cells.row(t) = c.transpose();
    cache.cells_tanh.row(t) = tc.transpose();
    cache.hidden.row(t) = h.transpose();
  }
  return {cache.hidden, std::move(cache)};
}

LstmGradients lstm_backward(const LstmParams& params, const LstmCache& cache, const Matrix& d_hidden,
                            std::optional<LstmGate> severed) {
  check_params(params);
  const auto steps = cache.inputs.rows();
  const auto hid = params.hidden_size();
  if (cache.hidden.rows() != steps || cache.hidden.cols() != hid) {
    throw ShapeMismatch("LSTM cache does not match the parameters");
  }
  if (d_hidden.rows() != steps || d_hidden.cols() != hid) {
    throw ShapeMismatch("LSTM upstream gradient must be timesteps x hidden");
  }

  LstmGradients grads;
  grads.params = LstmParams::zeros(params.input_size(), hid);
  grads.d_inputs = Matrix::Zero(steps, params.input_size());

  Vector dh_next = Vector::Zero(hid);
  Vector dc_next = Vector::Zero(hid);
  std::array<Vector, kLstmGates> d_pre;
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Vector i = cache.gates[kI].row(t).transpose();
    const Vector f = cache.gates[kF].row(t).transpose();
    const Vector g = cache.gates[kG].row(t).transpose();
    const Vector o = cache.gates[kO].row(t).transpose();
    const Vector tc = cache.cells_tanh.row(t).transpose();
    const Vector c_prev = t > 0 ? Vector(cache.cells.row(t - 1).transpose()) : cache.c0;
    const Vector h_prev = t > 0 ? Vector(cache.hidden.row(t - 1).transpose()) : cache.h0;
    const Vector x = cache.inputs.row(t).transpose();

    const Vector dh = d_hidden.row(t).transpose() + dh_next;
    const Vector d_o = dh.cwiseProduct(tc);
    const Vector dc = dh.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_next;

    d_pre[kI] = dc.cwiseProduct(g).cwiseProduct(i.cwiseProduct((1.0 - i.array()).matrix()));
    d_pre[kF] = dc.cwiseProduct(c_prev).cwiseProduct(f.cwiseProduct((1.0 - f.array()).matrix()));
    d_pre[kG] = dc.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());
    d_pre[kO] = d_o.cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));
    if (severed) d_pre[static_cast<std::size_t>(*severed)].setZero();

    dc_next = dc.cwiseProduct(f);
    dh_next.setZero();
    for (std::size_t k = 0; k < kLstmGates; ++k) {
      grads.params.input_weights[k].noalias() += d_pre[k] * x.transpose();
      grads.params.recurrent_weights[k].noalias() += d_pre[k] * h_prev.transpose();
      grads.params.biases[k] += d_pre[k];
      grads.d_inputs.row(t).noalias() += (params.input_weights[k].transpose() * d_pre[k]).transpose();
      dh_next.noalias() += params.recurrent_weights[k].transpose() * d_pre[k];
    }
  }
  grads.d_h0 = dh_next;
  grads.d_c0 = dc_next;
  return grads;
}

}  // namespace panelcast
