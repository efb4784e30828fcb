#include "panelcast/network.hpp"

#include <algorithm>
#include <cmath>

#include "panelcast/errors.hpp"

namespace panelcast {

namespace {

void glorot_fill(Matrix& m, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.cols() + m.rows()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

double eval_prediction(const NetworkParams& params, const Matrix& sequence) {
  return network_forward(params, sequence, Mode::Eval).prediction;
}

}  // namespace

NetworkSpec NetworkParams::spec() const {
  return {static_cast<int>(lstm.input_size()), static_cast<int>(lstm.hidden_size()),
          static_cast<int>(gru.hidden_size()), dropout_rate};
}

bool operator==(const NetworkParams& a, const NetworkParams& b) {
  if (a.dropout_rate != b.dropout_rate || a.seed != b.seed) return false;
  const auto sa = tensor_spans(a);
  const auto sb = tensor_spans(b);
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (!std::equal(sa[i].begin(), sa[i].end(), sb[i].begin(), sb[i].end())) return false;
  }
  return true;
}

NetworkGradients NetworkGradients::zeros_like(const NetworkParams& params) {
  NetworkGradients g;
  g.lstm = LstmParams::zeros(params.lstm.input_size(), params.lstm.hidden_size());
  g.gru = GruParams::zeros(params.gru.input_size(), params.gru.hidden_size());
  g.head.weights = RowVector::Zero(params.head.weights.size());
  g.head.bias = 0.0;
  return g;
}

NetworkGradients& NetworkGradients::operator+=(const NetworkGradients& other) {
  auto mine = tensor_spans(*this);
  const auto theirs = tensor_spans(other);
  if (mine.size() != theirs.size()) throw ShapeMismatch("gradient layouts differ");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].size() != theirs[i].size()) throw ShapeMismatch("gradient tensor sizes differ");
    std::transform(mine[i].begin(), mine[i].end(), theirs[i].begin(), mine[i].begin(), std::plus<>());
  }
  return *this;
}

NetworkGradients& NetworkGradients::operator*=(double k) {
  for (auto s : tensor_spans(*this)) {
    for (auto& v : s) v *= k;
  }
  return *this;
}

std::size_t parameter_count(const NetworkParams& params) {
  std::size_t n = 0;
  for (const auto s : tensor_spans(params)) n += s.size();
  return n;
}

bool all_finite(const NetworkParams& params) {
  for (const auto s : tensor_spans(params)) {
    if (!std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); })) return false;
  }
  return true;
}

NetworkParams init_params(std::uint64_t seed, const NetworkSpec& spec) {
  if (spec.input_size < 1 || spec.lstm_hidden < 1 || spec.gru_hidden < 1) {
    throw InvalidArgument("layer sizes must be positive");
  }
  if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0)) {
    throw InvalidArgument("dropout_rate must be in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  NetworkParams p;
  p.seed = seed;
  p.dropout_rate = spec.dropout_rate;
  p.lstm = LstmParams::zeros(spec.input_size, spec.lstm_hidden);
  p.gru = GruParams::zeros(spec.lstm_hidden, spec.gru_hidden);
  for (auto& m : p.lstm.input_weights) glorot_fill(m, rng);
  for (auto& m : p.lstm.recurrent_weights) glorot_fill(m, rng);
  p.lstm.biases[static_cast<std::size_t>(LstmGate::Forget)].setOnes();
  for (auto& m : p.gru.input_weights) glorot_fill(m, rng);
  for (auto& m : p.gru.recurrent_weights) glorot_fill(m, rng);

  Matrix head(1, spec.gru_hidden);
  glorot_fill(head, rng);
  p.head.weights = head.row(0);
  p.head.bias = 0.0;
  return p;
}

DropoutOutput dropout_forward(const Vector& input, double rate, Mode mode, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidRate("dropout rate must be in [0, 1), got " + std::to_string(rate));
  DropoutOutput out;
  if (mode == Mode::Eval || rate == 0.0) {
    out.output = input;
    out.mask = Vector::Ones(input.size());
    return out;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.mask.resize(input.size());
  for (Eigen::Index i = 0; i < input.size(); ++i) out.mask[i] = unit(rng) < rate ? 0.0 : keep_scale;
  out.output = input.cwiseProduct(out.mask);
  return out;
}

NetworkForward network_forward(const NetworkParams& params, const Matrix& sequence, Mode mode,
                               std::uint64_t dropout_seed) {
  if (params.gru.input_size() != params.lstm.hidden_size() ||
      params.head.weights.size() != params.gru.hidden_size()) {
    throw ShapeMismatch("network layers do not chain");
  }
  if (sequence.rows() < 1) throw ShapeMismatch("sequence must have at least one timestep");

  auto lstm = lstm_forward(params.lstm, sequence, Vector::Zero(params.lstm.hidden_size()),
                           Vector::Zero(params.lstm.hidden_size()));
  auto gru = gru_forward(params.gru, lstm.hidden, Vector::Zero(params.gru.hidden_size()));
  const Vector last = gru.hidden.row(gru.hidden.rows() - 1).transpose();

  std::mt19937_64 rng(dropout_seed);
  auto dropped = dropout_forward(last, params.dropout_rate, mode, rng);

  NetworkForward out;
  out.prediction = params.head.weights.dot(dropped.output) + params.head.bias;
  out.cache.lstm = std::move(lstm.cache);
  out.cache.gru = std::move(gru.cache);
  out.cache.dropout_mask = std::move(dropped.mask);
  out.cache.head_input = std::move(dropped.output);
  out.cache.prediction = out.prediction;
  return out;
}

NetworkGradients network_backward(const NetworkParams& params, const ForwardCache& cache, double d_prediction,
                                  const GradientFault& fault) {
  if (cache.head_input.size() != params.head.weights.size() ||
      cache.dropout_mask.size() != params.gru.hidden_size()) {
    throw ShapeMismatch("forward cache does not match the network");
  }
  NetworkGradients g;
  g.head.weights = d_prediction * cache.head_input.transpose();
  g.head.bias = d_prediction;

  const Vector d_last = (d_prediction * params.head.weights.transpose()).cwiseProduct(cache.dropout_mask);
  Matrix d_gru_hidden = Matrix::Zero(cache.gru.hidden.rows(), cache.gru.hidden.cols());
  d_gru_hidden.row(d_gru_hidden.rows() - 1) = d_last.transpose();

  auto gru = gru_backward(params.gru, cache.gru, d_gru_hidden, fault.gru);
  auto lstm = lstm_backward(params.lstm, cache.lstm, gru.d_inputs, fault.lstm);
  g.gru = std::move(gru.params);
  g.lstm = std::move(lstm.params);
  return g;
}

GradientCheckReport gradient_check_report(const NetworkParams& params, const Matrix& sequence, double target,
                                          double epsilon, const GradientFault& fault) {
  const auto fwd = network_forward(params, sequence, Mode::Eval);
  const auto analytic = network_backward(params, fwd.cache, 2.0 * (fwd.prediction - target), fault);

  NetworkParams probe = params;
  auto probe_spans = tensor_spans(probe);
  const auto grad_spans = tensor_spans(analytic);
  std::vector<std::string> names;
  visit_tensors(analytic, [&](const std::string& name, auto) { names.push_back(name); });

  GradientCheckReport report;
  for (std::size_t t = 0; t < probe_spans.size(); ++t) {
    auto& values = probe_spans[t];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + epsilon;
      const double up = eval_prediction(probe, sequence);
      values[i] = original - epsilon;
      const double down = eval_prediction(probe, sequence);
      values[i] = original;

      // (up - t)^2 - (down - t)^2 factored, which avoids cancelling two
      // nearly equal squares.
      const double numeric = (up - down) * (up + down - 2.0 * target) / (2.0 * epsilon);
      const double a = grad_spans[t][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > report.max_relative_error || std::isnan(rel)) {
        report.max_relative_error = rel;
        report.worst_tensor = names[t] + "[" + std::to_string(i) + "]";
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

double gradient_check(const NetworkParams& params, const Matrix& sequence, double target, double epsilon,
                      const GradientFault& fault) {
  return gradient_check_report(params, sequence, target, epsilon, fault).max_relative_error;
}

}  // namespace panelcast
