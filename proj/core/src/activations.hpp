#ifndef PANELCAST_SRC_ACTIVATIONS_HPP_
#define PANELCAST_SRC_ACTIVATIONS_HPP_

#include <cassert>
#include <cmath>

#include "panelcast/matrix.hpp"

namespace panelcast::detail {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Vector sigmoid(const Vector& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }
inline Vector tanh(const Vector& x) { return x.array().tanh().matrix(); }

// Saturated doubles can round to the closed endpoints, so the checks are inclusive.
inline bool in_unit_interval(const Vector& v) { return (v.array() >= 0.0).all() && (v.array() <= 1.0).all(); }
inline bool in_tanh_range(const Vector& v) { return (v.array() >= -1.0).all() && (v.array() <= 1.0).all(); }

}  // namespace panelcast::detail

#endif  // PANELCAST_SRC_ACTIVATIONS_HPP_
