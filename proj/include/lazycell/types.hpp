// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace lazycell {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Positions = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

using MatrixXd = MatrixX<double>;
using VectorXd = VectorX<double>;
using VectorXi = Eigen::Matrix<Index, Eigen::Dynamic, 1>;
/// N x 3 table of (x, y, z) in metres, z is height above ground.
using PositionTable = Positions<double>;

}  // namespace lazycell
