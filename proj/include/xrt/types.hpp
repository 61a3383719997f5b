#pragma once

#include <Eigen/Dense>

namespace xrt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

constexpr double kPi = 3.14159265358979323846;

}  // namespace xrt
