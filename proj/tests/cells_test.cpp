#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "panelcast/errors.hpp"
#include "panelcast/gru.hpp"
#include "panelcast/lstm.hpp"

using namespace panelcast;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

LstmParams random_lstm(std::mt19937_64& rng, Eigen::Index in, Eigen::Index hidden) {
  auto p = LstmParams::zeros(in, hidden);
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    p.input_weights[k] = random_matrix(rng, hidden, in, 0.8);
    p.recurrent_weights[k] = random_matrix(rng, hidden, hidden, 0.8);
    p.biases[k] = random_vector(rng, hidden, 0.5);
  }
  return p;
}

GruParams random_gru(std::mt19937_64& rng, Eigen::Index in, Eigen::Index hidden) {
  auto p = GruParams::zeros(in, hidden);
  for (std::size_t k = 0; k < kGruGates; ++k) {
    p.input_weights[k] = random_matrix(rng, hidden, in, 0.8);
    p.recurrent_weights[k] = random_matrix(rng, hidden, hidden, 0.8);
    p.biases[k] = random_vector(rng, hidden, 0.5);
  }
  return p;
}

oracle::ScalarLstm to_scalar(const LstmParams& p) {
  oracle::ScalarLstm s{};
  for (std::size_t k = 0; k < 4; ++k) {
    s.w[k] = p.input_weights[k](0, 0);
    s.u[k] = p.recurrent_weights[k](0, 0);
    s.b[k] = p.biases[k](0);
  }
  return s;
}

oracle::ScalarGru to_scalar(const GruParams& p) {
  oracle::ScalarGru s{};
  for (std::size_t k = 0; k < 3; ++k) {
    s.w[k] = p.input_weights[k](0, 0);
    s.u[k] = p.recurrent_weights[k](0, 0);
    s.b[k] = p.biases[k](0);
  }
  return s;
}

// Central difference of loss() with respect to x, perturbing in place.
double central(double& x, const std::function<double()>& loss, double eps = 1e-5) {
  const double saved = x;
  x = saved + eps;
  const double up = loss();
  x = saved - eps;
  const double down = loss();
  x = saved;
  return (up - down) / (2.0 * eps);
}

void expect_close(double analytic, double numeric, const std::string& what) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  EXPECT_LT(std::abs(analytic - numeric) / scale, 1e-5) << what << " analytic " << analytic << " numeric " << numeric;
}

}  // namespace

TEST(LstmForward, ZeroParamsGiveZeroStates) {
  const auto p = LstmParams::zeros(3, 4);
  std::mt19937_64 rng(1);
  const auto out = lstm_forward(p, random_matrix(rng, 5, 3), Vector::Zero(4), Vector::Zero(4));
  EXPECT_EQ(out.hidden.rows(), 5);
  EXPECT_LE(out.hidden.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(out.cache.cells.cwiseAbs().maxCoeff(), 1e-12);
  for (const auto g : {LstmGate::Input, LstmGate::Forget, LstmGate::Output}) {
    EXPECT_TRUE((out.cache.gates[static_cast<std::size_t>(g)].array() == 0.5).all());
  }
}

TEST(LstmForward, OneStepFromCellState) {
  const auto p = LstmParams::zeros(2, 3);
  Vector c0(3);
  c0 << 1.0, -2.0, 0.3;
  const auto out = lstm_forward(p, Matrix::Constant(1, 2, 0.7), Vector::Zero(3), c0);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(out.cache.cells(0, k), 0.5 * c0(k), 1e-12);
    EXPECT_NEAR(out.hidden(0, k), 0.5 * std::tanh(0.5 * c0(k)), 1e-12);
  }
}

TEST(LstmForward, MatchesScalarUnroll) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto p = random_lstm(rng, 1, 1);
    const std::vector<double> xs = {std::uniform_real_distribution<double>(-2, 2)(rng),
                                    std::uniform_real_distribution<double>(-2, 2)(rng)};
    const double h0 = 0.3, c0 = -0.4;
    Matrix seq(2, 1);
    seq << xs[0], xs[1];
    const auto out = lstm_forward(p, seq, Vector::Constant(1, h0), Vector::Constant(1, c0));
    const auto want = oracle::unroll(to_scalar(p), xs, h0, c0);
    for (int t = 0; t < 2; ++t) {
      EXPECT_NEAR(out.hidden(t, 0), want.h[t], 1e-12);
      EXPECT_NEAR(out.cache.cells(t, 0), want.c[t], 1e-12);
    }
  }
}

TEST(LstmForward, ShapeMismatch) {
  const auto p = LstmParams::zeros(3, 4);
  EXPECT_THROW(lstm_forward(p, Matrix::Zero(5, 2), Vector::Zero(4), Vector::Zero(4)), ShapeMismatch);
  EXPECT_THROW(lstm_forward(p, Matrix::Zero(5, 3), Vector::Zero(3), Vector::Zero(4)), ShapeMismatch);
  EXPECT_THROW(lstm_forward(p, Matrix::Zero(5, 3), Vector::Zero(4), Vector::Zero(5)), ShapeMismatch);
}

TEST(LstmForward, GatesStayInRange) {
  std::mt19937_64 rng(3);
  const auto p = random_lstm(rng, 4, 6);
  const auto out = lstm_forward(p, random_matrix(rng, 8, 4, 3.0), Vector::Zero(6), Vector::Zero(6));
  for (const auto g : {LstmGate::Input, LstmGate::Forget, LstmGate::Output}) {
    const auto& m = out.cache.gates[static_cast<std::size_t>(g)];
    EXPECT_GT(m.minCoeff(), 0.0);
    EXPECT_LT(m.maxCoeff(), 1.0);
  }
  EXPECT_LT(out.hidden.cwiseAbs().maxCoeff(), 1.0);
}

TEST(LstmBackward, ZeroUpstreamGivesZero) {
  std::mt19937_64 rng(4);
  const auto p = random_lstm(rng, 3, 4);
  const auto out = lstm_forward(p, random_matrix(rng, 5, 3), random_vector(rng, 4), random_vector(rng, 4));
  const auto g = lstm_backward(p, out.cache, Matrix::Zero(5, 4));
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    EXPECT_EQ(g.params.input_weights[k].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.params.recurrent_weights[k].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.params.biases[k].cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(g.d_inputs.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.d_h0.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.d_c0.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LstmBackward, OneUnitOneStepSymbolic) {
  std::mt19937_64 rng(5);
  const auto p = random_lstm(rng, 1, 1);
  const auto s = to_scalar(p);
  const double x = 0.6, h0 = -0.2, c0 = 0.9;
  const double i = oracle::sigmoid(s.w[0] * x + s.u[0] * h0 + s.b[0]);
  const double f = oracle::sigmoid(s.w[1] * x + s.u[1] * h0 + s.b[1]);
  const double g = std::tanh(s.w[2] * x + s.u[2] * h0 + s.b[2]);
  const double o = oracle::sigmoid(s.w[3] * x + s.u[3] * h0 + s.b[3]);
  const double c = f * c0 + i * g;
  const double tc = std::tanh(c);
  const double dc = o * (1.0 - tc * tc);

  const auto out = lstm_forward(p, Matrix::Constant(1, 1, x), Vector::Constant(1, h0), Vector::Constant(1, c0));
  const auto grads = lstm_backward(p, out.cache, Matrix::Constant(1, 1, 1.0));
  EXPECT_NEAR(grads.params.biases[3](0), tc * o * (1.0 - o), 1e-12);
  EXPECT_NEAR(grads.params.input_weights[3](0, 0), tc * o * (1.0 - o) * x, 1e-12);
  EXPECT_NEAR(grads.params.biases[1](0), dc * c0 * f * (1.0 - f), 1e-12);
  EXPECT_NEAR(grads.params.recurrent_weights[1](0, 0), dc * c0 * f * (1.0 - f) * h0, 1e-12);
  EXPECT_NEAR(grads.params.biases[0](0), dc * g * i * (1.0 - i), 1e-12);
  EXPECT_NEAR(grads.params.biases[2](0), dc * i * (1.0 - g * g), 1e-12);
  EXPECT_NEAR(grads.d_c0(0), dc * f, 1e-12);
  const double dx = tc * o * (1.0 - o) * s.w[3] + dc * (c0 * f * (1.0 - f) * s.w[1] + g * i * (1.0 - i) * s.w[0] +
                                                       i * (1.0 - g * g) * s.w[2]);
  EXPECT_NEAR(grads.d_inputs(0, 0), dx, 1e-12);
}

TEST(LstmBackward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(10 + seed);
    auto p = random_lstm(rng, 3, 4);
    Matrix seq = random_matrix(rng, 5, 3);
    Vector h0 = random_vector(rng, 4, 0.5);
    Vector c0 = random_vector(rng, 4, 0.5);
    const Matrix upstream = random_matrix(rng, 5, 4);
    auto loss = [&] { return (lstm_forward(p, seq, h0, c0).hidden.array() * upstream.array()).sum(); };
    const auto g = lstm_backward(p, lstm_forward(p, seq, h0, c0).cache, upstream);
    for (std::size_t k = 0; k < kLstmGates; ++k) {
      for (Eigen::Index e = 0; e < p.input_weights[k].size(); ++e) {
        expect_close(g.params.input_weights[k].data()[e], central(p.input_weights[k].data()[e], loss), "W");
      }
      for (Eigen::Index e = 0; e < p.recurrent_weights[k].size(); ++e) {
        expect_close(g.params.recurrent_weights[k].data()[e], central(p.recurrent_weights[k].data()[e], loss), "U");
      }
      for (Eigen::Index e = 0; e < p.biases[k].size(); ++e) {
        expect_close(g.params.biases[k](e), central(p.biases[k](e), loss), "b");
      }
    }
    for (Eigen::Index e = 0; e < seq.size(); ++e) expect_close(g.d_inputs.data()[e], central(seq.data()[e], loss), "x");
    for (Eigen::Index e = 0; e < 4; ++e) {
      expect_close(g.d_h0(e), central(h0(e), loss), "h0");
      expect_close(g.d_c0(e), central(c0(e), loss), "c0");
    }
  }
}

TEST(LstmBackward, SeveredGateChangesGradient) {
  std::mt19937_64 rng(6);
  const auto p = random_lstm(rng, 2, 3);
  const auto out = lstm_forward(p, random_matrix(rng, 4, 2), Vector::Zero(3), Vector::Zero(3));
  const Matrix up = Matrix::Ones(4, 3);
  const auto full = lstm_backward(p, out.cache, up);
  const auto cut = lstm_backward(p, out.cache, up, LstmGate::Forget);
  EXPECT_EQ(cut.params.biases[1].cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(full.params.biases[1].cwiseAbs().maxCoeff(), 0.0);
}

TEST(GruForward, ZeroParamsHalveState) {
  const auto p = GruParams::zeros(3, 4);
  std::mt19937_64 rng(7);
  Vector h0(4);
  h0 << 1.0, -0.5, 0.25, 2.0;
  const auto out = gru_forward(p, random_matrix(rng, 5, 3), h0);
  Vector h = h0;
  for (int t = 0; t < 5; ++t) {
    h *= 0.5;
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(out.hidden(t, k), h(k), 1e-12);
  }
}

TEST(GruForward, ZeroParamsZeroStateStaysZero) {
  std::mt19937_64 rng(8);
  const auto out = gru_forward(GruParams::zeros(3, 2), random_matrix(rng, 5, 3), Vector::Zero(2));
  EXPECT_EQ(out.hidden.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GruForward, MatchesScalarUnroll) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const auto p = random_gru(rng, 1, 1);
    const std::vector<double> xs = {0.4 - 0.1 * static_cast<double>(seed), 1.1};
    Matrix seq(2, 1);
    seq << xs[0], xs[1];
    const auto out = gru_forward(p, seq, Vector::Constant(1, -0.7));
    const auto want = oracle::unroll(to_scalar(p), xs, -0.7);
    for (int t = 0; t < 2; ++t) EXPECT_NEAR(out.hidden(t, 0), want[t], 1e-12);
  }
}

TEST(GruForward, ShapeMismatch) {
  const auto p = GruParams::zeros(3, 4);
  EXPECT_THROW(gru_forward(p, Matrix::Zero(5, 4), Vector::Zero(4)), ShapeMismatch);
  EXPECT_THROW(gru_forward(p, Matrix::Zero(5, 3), Vector::Zero(2)), ShapeMismatch);
}

TEST(GruBackward, ZeroUpstreamGivesZero) {
  std::mt19937_64 rng(9);
  const auto p = random_gru(rng, 3, 4);
  const auto out = gru_forward(p, random_matrix(rng, 5, 3), random_vector(rng, 4));
  const auto g = gru_backward(p, out.cache, Matrix::Zero(5, 4));
  for (std::size_t k = 0; k < kGruGates; ++k) {
    EXPECT_EQ(g.params.input_weights[k].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.params.recurrent_weights[k].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.params.biases[k].cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(g.d_inputs.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.d_h0.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GruBackward, OneUnitOneStepSymbolic) {
  std::mt19937_64 rng(11);
  const auto p = random_gru(rng, 1, 1);
  const auto s = to_scalar(p);
  const double x = -0.3, h0 = 0.8;
  const double z = oracle::sigmoid(s.w[0] * x + s.u[0] * h0 + s.b[0]);
  const double r = oracle::sigmoid(s.w[1] * x + s.u[1] * h0 + s.b[1]);
  const double n = std::tanh(s.w[2] * x + s.b[2] + r * s.u[2] * h0);
  const double dn = (1.0 - z) * (1.0 - n * n);

  const auto out = gru_forward(p, Matrix::Constant(1, 1, x), Vector::Constant(1, h0));
  const auto g = gru_backward(p, out.cache, Matrix::Constant(1, 1, 1.0));
  EXPECT_NEAR(g.params.biases[0](0), (h0 - n) * z * (1.0 - z), 1e-12);
  EXPECT_NEAR(g.params.biases[2](0), dn, 1e-12);
  EXPECT_NEAR(g.params.recurrent_weights[2](0, 0), dn * r * h0, 1e-12);
  EXPECT_NEAR(g.params.input_weights[1](0, 0), dn * s.u[2] * h0 * r * (1.0 - r) * x, 1e-12);
  const double dh0 = z + (h0 - n) * z * (1.0 - z) * s.u[0] + dn * (r * s.u[2] + s.u[2] * h0 * r * (1.0 - r) * s.u[1]);
  EXPECT_NEAR(g.d_h0(0), dh0, 1e-12);
}

TEST(GruBackward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(20 + seed);
    auto p = random_gru(rng, 3, 4);
    Matrix seq = random_matrix(rng, 5, 3);
    Vector h0 = random_vector(rng, 4, 0.5);
    const Matrix upstream = random_matrix(rng, 5, 4);
    auto loss = [&] { return (gru_forward(p, seq, h0).hidden.array() * upstream.array()).sum(); };
    const auto g = gru_backward(p, gru_forward(p, seq, h0).cache, upstream);
    for (std::size_t k = 0; k < kGruGates; ++k) {
      for (Eigen::Index e = 0; e < p.input_weights[k].size(); ++e) {
        expect_close(g.params.input_weights[k].data()[e], central(p.input_weights[k].data()[e], loss), "W");
      }
      for (Eigen::Index e = 0; e < p.recurrent_weights[k].size(); ++e) {
        expect_close(g.params.recurrent_weights[k].data()[e], central(p.recurrent_weights[k].data()[e], loss), "U");
      }
      for (Eigen::Index e = 0; e < p.biases[k].size(); ++e) {
        expect_close(g.params.biases[k](e), central(p.biases[k](e), loss), "b");
      }
    }
    for (Eigen::Index e = 0; e < seq.size(); ++e) expect_close(g.d_inputs.data()[e], central(seq.data()[e], loss), "x");
    for (Eigen::Index e = 0; e < 4; ++e) expect_close(g.d_h0(e), central(h0(e), loss), "h0");
  }
}
