#pragma once

#include <Eigen/Dense>

namespace simsr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace simsr
