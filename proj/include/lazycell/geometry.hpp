// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <string_view>

#include <fmt/format.h>

#include "lazycell/error.hpp"
#include "lazycell/types.hpp"

namespace lazycell::geometry {

/// Per (UE, cell) horizontal distance, 3D distance and azimuth of the UE as
/// seen from the cell (radians, counter-clockwise from +x, in (-pi, pi]).
template <typename Scalar>
struct DistanceAngleMatrix {
  MatrixX<Scalar> d2;
  MatrixX<Scalar> d3;
  MatrixX<Scalar> az;
};

/// Azimuth with atan2(0, 0) pinned to 0 and -pi folded onto pi.
template <typename Scalar>
inline Scalar azimuth(Scalar dx, Scalar dy) {
  if (dx == Scalar(0) && dy == Scalar(0)) return Scalar(0);
  const Scalar a = std::atan2(dy, dx);
  return a == -std::numbers::pi_v<Scalar> ? std::numbers::pi_v<Scalar> : a;
}

/// Fills one UE row of the three matrices. Output rows may be any writable row expression.
template <typename UeRow, typename Cells, typename OutRow>
inline void distance_row(const Eigen::MatrixBase<UeRow>& ue, const Eigen::MatrixBase<Cells>& cells,
                         Eigen::MatrixBase<OutRow> const& d2_out,
                         Eigen::MatrixBase<OutRow> const& d3_out,
                         Eigen::MatrixBase<OutRow> const& az_out) {
  using Scalar = typename Cells::Scalar;
  auto& d2 = const_cast<Eigen::MatrixBase<OutRow>&>(d2_out);
  auto& d3 = const_cast<Eigen::MatrixBase<OutRow>&>(d3_out);
  auto& az = const_cast<Eigen::MatrixBase<OutRow>&>(az_out);
  for (Index j = 0; j < cells.rows(); ++j) {
    const Scalar dx = ue(0) - cells(j, 0);
    const Scalar dy = ue(1) - cells(j, 1);
    const Scalar dz = ue(2) - cells(j, 2);
    const Scalar planar = dx * dx + dy * dy;
    d2(j) = std::sqrt(planar);
    d3(j) = std::sqrt(planar + dz * dz);
    az(j) = azimuth(dx, dy);
  }
}

/// Full evaluation over every (UE, cell) pair.
template <typename DerivedU, typename DerivedC>
DistanceAngleMatrix<typename DerivedU::Scalar> compute_distances(
    const Eigen::MatrixBase<DerivedU>& ues, const Eigen::MatrixBase<DerivedC>& cells) {
  using Scalar = typename DerivedU::Scalar;
  if (ues.rows() == 0 || cells.rows() == 0 || ues.cols() != 3 || cells.cols() != 3) {
    throw Error(ErrorCode::ShapeMismatch, "position tables must be non-empty with 3 columns");
  }
  DistanceAngleMatrix<Scalar> out{MatrixX<Scalar>(ues.rows(), cells.rows()),
                                  MatrixX<Scalar>(ues.rows(), cells.rows()),
                                  MatrixX<Scalar>(ues.rows(), cells.rows())};
  for (Index i = 0; i < ues.rows(); ++i) {
    distance_row(ues.row(i), cells, out.d2.row(i), out.d3.row(i), out.az.row(i));
  }
  return out;
}

/// Recomputes only `rows` of an existing result; other rows are left untouched.
template <typename DerivedU, typename DerivedC, typename RowRange>
void compute_distances_rows(const Eigen::MatrixBase<DerivedU>& ues,
                            const Eigen::MatrixBase<DerivedC>& cells, const RowRange& rows,
                            DistanceAngleMatrix<typename DerivedU::Scalar>& out) {
  for (const Index i : rows) {
    distance_row(ues.row(i), cells, out.d2.row(i), out.d3.row(i), out.az.row(i));
  }
}

/// Rejects non-finite coordinates and negative heights. `what` names the table in errors.
template <typename Derived>
void validate_positions(const Eigen::MatrixBase<Derived>& table, std::string_view what) {
  if (table.cols() != 3) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} must have 3 columns", what),
                std::string(what));
  }
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index c = 0; c < 3; ++c) {
      if (!std::isfinite(double(table(i, c)))) {
        throw Error(ErrorCode::ValidationError,
                    fmt::format("{} row {} has a non-finite coordinate", what, i),
                    std::string(what));
      }
    }
    if (table(i, 2) < 0) {
      throw Error(ErrorCode::ValidationError,
                  fmt::format("{} row {} has negative height", what, i), std::string(what));
    }
  }
}

}  // namespace lazycell::geometry
