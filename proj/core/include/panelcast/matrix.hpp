#ifndef PANELCAST_MATRIX_HPP_
#define PANELCAST_MATRIX_HPP_

#include <Eigen/Core>

namespace panelcast {

// Row-major so that checkpoints and parameter visits walk memory in the
// documented row-major order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

}  // namespace panelcast

#endif  // PANELCAST_MATRIX_HPP_
