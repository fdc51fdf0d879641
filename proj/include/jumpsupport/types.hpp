#pragma once

#include <Eigen/Dense>

namespace jumpsupport {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace jumpsupport
