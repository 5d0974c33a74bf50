#pragma once

#include <Eigen/Dense>

namespace lglat {

// rows = sequence positions, cols = feature dims
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MatF = Mat<float>;
using MatD = Mat<double>;

}  // namespace lglat
