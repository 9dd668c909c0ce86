// SPDX-License-Identifier: Apache-2.0
#pragma once

// Random deployments and the exact SIR distribution of a Poisson network
// with nearest-cell association, Rayleigh fading and no noise:
//
//   P(SIR > theta) = 1 / (1 + rho(theta, alpha))
//   rho = theta^(2/alpha) * integral_{theta^(-2/alpha)}^inf du / (1 + u^(alpha/2))

#include <cstdint>
#include <span>
#include <vector>

#include "lazycell/types.hpp"

namespace lazycell::stochgeo {

/// Axis-aligned rectangle in the ground plane, metres.
struct Region {
  double x_min = 0.0, y_min = 0.0, x_max = 1.0, y_max = 1.0;
  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }
  /// The middle rectangle with half the width and half the height.
  Region central_quarter() const noexcept;
};

/// Uniform points with a Poisson-distributed count of mean intensity * area.
/// A zero draw is bumped to one point so the table is never empty.
PositionTable generate_ppp(double intensity, const Region& region, double z, std::uint64_t seed);
/// Exactly `count` uniform points (binomial point process).
PositionTable generate_uniform(Index count, const Region& region, double z, std::uint64_t seed);

/// rho(theta, alpha); theta linear, alpha > 2.
double interference_ratio(double theta, double alpha);
/// P(SIR > theta) for a Poisson network; theta linear, alpha > 2.
double analytical_sir_ccdf(double theta, double alpha);

struct CcdfPoint {
  double threshold;
  double probability;
};

/// Survival function at each sorted sample value, P(X > x).
std::vector<CcdfPoint> empirical_ccdf(std::span<const double> samples);
/// Fraction of samples strictly greater than `threshold`.
double empirical_ccdf_at(std::span<const double> samples, double threshold);

/// sup over theta of |empirical - analytical|, checked on both sides of every sample step.
double ks_distance(std::span<const double> samples, double alpha);

}  // namespace lazycell::stochgeo
