#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace umlab {

using Vec = Eigen::ArrayXd;
using Mat = Eigen::ArrayXXd;
using BoolVec = Eigen::Array<bool, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

}  // namespace umlab
