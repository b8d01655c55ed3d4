#pragma once

#include <Eigen/Dense>

namespace icltemp {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace icltemp
