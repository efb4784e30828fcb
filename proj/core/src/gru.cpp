#include "panelcast/gru.hpp"

#include "activations.hpp"
#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

constexpr auto kZ = static_cast<std::size_t>(GruGate::Update);
constexpr auto kR = static_cast<std::size_t>(GruGate::Reset);
constexpr auto kN = static_cast<std::size_t>(GruGate::Candidate);

void check_params(const GruParams& p) {
  const auto in = p.input_size();
  const auto hid = p.hidden_size();
  for (std::size_t k = 0; k < kGruGates; ++k) {
    if (p.input_weights[k].rows() != hid || p.input_weights[k].cols() != in ||
        p.recurrent_weights[k].rows() != hid || p.recurrent_weights[k].cols() != hid ||
        p.biases[k].size() != hid) {
      throw ShapeMismatch("GRU gate tensors disagree on input/hidden sizes");
    }
  }
}

}  // namespace

GruParams GruParams::zeros(Eigen::Index input_size, Eigen::Index hidden_size) {
  GruParams p;
  for (std::size_t k = 0; k < kGruGates; ++k) {
    p.input_weights[k] = Matrix::Zero(hidden_size, input_size);
    p.recurrent_weights[k] = Matrix::Zero(hidden_size, hidden_size);
    p.biases[k] = Vector::Zero(hidden_size);
  }
  return p;
}

GruOutput gru_forward(const GruParams& params, const Matrix& sequence, const Vector& h0) {
  check_params(params);
  const auto hid = params.hidden_size();
  if (sequence.cols() != params.input_size()) {
    throw ShapeMismatch("GRU expects " + std::to_string(params.input_size()) + " input columns, got " +
                        std::to_string(sequence.cols()));
  }
  if (h0.size() != hid) throw ShapeMismatch("GRU initial state has the wrong size");

  const auto steps = sequence.rows();
  GruCache cache;
  cache.inputs = sequence;
  cache.h0 = h0;
  cache.update.resize(steps, hid);
  cache.reset.resize(steps, hid);
  cache.candidate.resize(steps, hid);
  cache.recurrent_candidate.resize(steps, hid);
  cache.hidden.resize(steps, hid);

  Vector h = h0;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Vector x = sequence.row(t).transpose();
    const Vector z =
        detail::sigmoid(params.input_weights[kZ] * x + params.recurrent_weights[kZ] * h + params.biases[kZ]);
    const Vector r =
        detail::sigmoid(params.input_weights[kR] * x + params.recurrent_weights[kR] * h + params.biases[kR]);
    const Vector uh = params.recurrent_weights[kN] * h;
    const Vector n = detail::tanh(params.input_weights[kN] * x + params.biases[kN] + r.cwiseProduct(uh));
    assert(detail::in_unit_interval(z) && detail::in_unit_interval(r) && detail::in_tanh_range(n));

    h = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h);

    cache.update.row(t) = z.transpose();
    cache.reset.row(t) = r.transpose();
    cache.candidate.row(t) = n.transpose();
    cache.recurrent_candidate.row(t) = uh.transpose();
    cache.hidden.row(t) = h.transpose();
  }
  return {cache.hidden, std::move(cache)};
}

GruGradients gru_backward(const GruParams& params, const GruCache& cache, const Matrix& d_hidden,
                          std::optional<GruGate> severed) {
  check_params(params);
  const auto steps = cache.inputs.rows();
  const auto hid = params.hidden_size();
  if (cache.hidden.rows() != steps || cache.hidden.cols() != hid) {
    throw ShapeMismatch("GRU cache does not match the parameters");
  }
  if (d_hidden.rows() != steps || d_hidden.cols() != hid) {
    throw ShapeMismatch("GRU upstream gradient must be timesteps x hidden");
  }

  GruGradients grads;
  grads.params = GruParams::zeros(params.input_size(), hid);
  grads.d_inputs = Matrix::Zero(steps, params.input_size());

  Vector dh_next = Vector::Zero(hid);
  std::array<Vector, kGruGates> d_pre;
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Vector z = cache.update.row(t).transpose();
    const Vector r = cache.reset.row(t).transpose();
    const Vector n = cache.candidate.row(t).transpose();
    const Vector uh = cache.recurrent_candidate.row(t).transpose();
    const Vector h_prev = t > 0 ? Vector(cache.hidden.row(t - 1).transpose()) : cache.h0;
    const Vector x = cache.inputs.row(t).transpose();

    const Vector dh = d_hidden.row(t).transpose() + dh_next;
    const Vector dz = dh.cwiseProduct(h_prev - n);
    const Vector dn = dh.cwiseProduct((1.0 - z.array()).matrix());

    d_pre[kN] = dn.cwiseProduct((1.0 - n.array().square()).matrix());
    d_pre[kR] = d_pre[kN].cwiseProduct(uh).cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));
    d_pre[kZ] = dz.cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));
    if (severed) d_pre[static_cast<std::size_t>(*severed)].setZero();

    // The candidate's recurrent product is gated by r before the tanh.
    const Vector d_uh = d_pre[kN].cwiseProduct(r);

    dh_next = dh.cwiseProduct(z);
    dh_next.noalias() += params.recurrent_weights[kZ].transpose() * d_pre[kZ];
    dh_next.noalias() += params.recurrent_weights[kR].transpose() * d_pre[kR];
    dh_next.noalias() += params.recurrent_weights[kN].transpose() * d_uh;

    grads.params.recurrent_weights[kZ].noalias() += d_pre[kZ] * h_prev.transpose();
    grads.params.recurrent_weights[kR].noalias() += d_pre[kR] * h_prev.transpose();
    grads.params.recurrent_weights[kN].noalias() += d_uh * h_prev.transpose();
    for (std::size_t k = 0; k < kGruGates; ++k) {
      grads.params.input_weights[k].noalias() += d_pre[k] * x.transpose();
      grads.params.biases[k] += d_pre[k];
      grads.d_inputs.row(t).noalias() += (params.input_weights[k].transpose() * d_pre[k]).transpose();
    }
  }
  grads.d_h0 = dh_next;
  return grads;
}

}  // namespace panelcast
