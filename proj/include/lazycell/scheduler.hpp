// SPDX-License-Identifier: Apache-2.0
#pragma once

// Fairness-tunable resource allocation. Within a cell, UE i receives the
// resource share S_i^-p / sum_j S_j^-p, so T_i = B_c S_i^(1-p) / sum_j S_j^-p.
// p = 0 gives equal shares (T proportional to S); p = 1 gives equal
// throughput. Values above 1 are accepted and extrapolate the same rule.
// UEs with S_i = 0 are excluded from the sum and receive nothing.

#include <cmath>
#include <span>
#include <vector>

#include <fmt/format.h>

#include "lazycell/error.hpp"
#include "lazycell/types.hpp"

namespace lazycell::scheduler {

/// Allocates one cell's bandwidth among `members` (UE indices, ascending).
/// Writes T for every member; entries of `throughput` outside `members` are untouched.
template <typename SVec, typename TVec>
void allocate_cell(std::span<const Index> members, const Eigen::MatrixBase<SVec>& se,
                   double bandwidth_hz, double p, Eigen::MatrixBase<TVec>& throughput) {
  double norm = 0.0;
  for (const Index i : members) {
    if (se(i) > 0.0) norm += std::pow(se(i), -p);
  }
  for (const Index i : members) {
    throughput(i) = se(i) > 0.0 ? bandwidth_hz * std::pow(se(i), 1.0 - p) / norm : 0.0;
  }
}

/// Resource shares for one cell; sums to 1 whenever some member has S > 0.
template <typename SVec>
std::vector<double> resource_shares(std::span<const Index> members,
                                    const Eigen::MatrixBase<SVec>& se, double p) {
  double norm = 0.0;
  for (const Index i : members) {
    if (se(i) > 0.0) norm += std::pow(se(i), -p);
  }
  std::vector<double> shares;
  shares.reserve(members.size());
  for (const Index i : members) shares.push_back(se(i) > 0.0 ? std::pow(se(i), -p) / norm : 0.0);
  return shares;
}

/// UE indices grouped by serving cell, each group ascending.
template <typename AVec>
std::vector<std::vector<Index>> group_by_cell(const Eigen::MatrixBase<AVec>& attachment,
                                              Index n_cell) {
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(n_cell));
  for (Index i = 0; i < attachment.size(); ++i) {
    const auto c = static_cast<Index>(attachment(i));
    if (c < 0 || c >= n_cell) {
      throw Error(ErrorCode::IndexOutOfBounds,
                  fmt::format("UE {} attached to cell {} outside [0, {})", i, c, n_cell));
    }
    groups[std::size_t(c)].push_back(i);
  }
  return groups;
}

/// Throughput of every UE given per-UE spectral efficiency, attachment and per-cell bandwidth.
template <typename SVec, typename AVec, typename BVec>
VectorXd allocate(const Eigen::MatrixBase<SVec>& se, const Eigen::MatrixBase<AVec>& attachment,
                  const Eigen::MatrixBase<BVec>& cell_bandwidth_hz, double p) {
  if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "fairness p must be >= 0");
  if (se.size() != attachment.size()) {
    throw Error(ErrorCode::ShapeMismatch, "spectral efficiency and attachment sizes differ");
  }
  for (Index i = 0; i < se.size(); ++i) {
    if (!(se(i) >= 0.0)) throw Error(ErrorCode::InvalidArgument, "spectral efficiency must be >= 0");
  }
  VectorXd throughput = VectorXd::Zero(se.size());
  const auto groups = group_by_cell(attachment, cell_bandwidth_hz.size());
  for (std::size_t c = 0; c < groups.size(); ++c) {
    allocate_cell(std::span<const Index>(groups[c]), se, cell_bandwidth_hz(Index(c)), p,
                  throughput);
  }
  return throughput;
}

}  // namespace lazycell::scheduler
