#pragma once

#include <Eigen/Dense>

namespace transq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace transq
