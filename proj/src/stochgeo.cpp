// SPDX-License-Identifier: Apache-2.0
#include "lazycell/stochgeo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <fmt/format.h>

#include "lazycell/error.hpp"

namespace lazycell::stochgeo {

namespace {

void check_region(const Region& region) {
  if (!(region.width() > 0.0) || !(region.height() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "region must have positive area", "region");
  }
}

PositionTable fill_uniform(std::mt19937_64& rng, Index count, const Region& region, double z) {
  std::uniform_real_distribution<double> ux(region.x_min, region.x_max);
  std::uniform_real_distribution<double> uy(region.y_min, region.y_max);
  PositionTable points(count, 3);
  for (Index i = 0; i < count; ++i) {
    points(i, 0) = ux(rng);
    points(i, 1) = uy(rng);
    points(i, 2) = z;
  }
  return points;
}

}  // namespace

Region Region::central_quarter() const noexcept {
  const double qw = width() / 4.0, qh = height() / 4.0;
  return {x_min + qw, y_min + qh, x_max - qw, y_max - qh};
}

PositionTable generate_ppp(double intensity, const Region& region, double z, std::uint64_t seed) {
  check_region(region);
  if (!(intensity > 0.0)) throw Error(ErrorCode::InvalidArgument, "intensity must be > 0");
  std::mt19937_64 rng(seed);
  std::poisson_distribution<Index> count_dist(intensity * region.area());
  const Index count = std::max<Index>(1, count_dist(rng));
  return fill_uniform(rng, count, region, z);
}

PositionTable generate_uniform(Index count, const Region& region, double z, std::uint64_t seed) {
  check_region(region);
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "point count must be >= 1");
  std::mt19937_64 rng(seed);
  return fill_uniform(rng, count, region, z);
}

double interference_ratio(double theta, double alpha) {
  if (!(alpha > 2.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("pathloss exponent {} must exceed 2", alpha), "alpha");
  }
  if (!(theta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0", "theta");
  if (theta == 0.0) return 0.0;
  if (std::isinf(theta)) return std::numeric_limits<double>::infinity();
  const double lower = std::pow(theta, -2.0 / alpha);
  const double half = alpha / 2.0;
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  const double integral = integrator.integrate(
      [half](double u) { return 1.0 / (1.0 + std::pow(u, half)); }, lower,
      std::numeric_limits<double>::infinity(), 1e-13, &error);
  return std::pow(theta, 2.0 / alpha) * integral;
}

double analytical_sir_ccdf(double theta, double alpha) {
  return 1.0 / (1.0 + interference_ratio(theta, alpha));
}

std::vector<CcdfPoint> empirical_ccdf(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());
  std::vector<CcdfPoint> curve;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    curve.push_back({sorted[i], double(sorted.size() - j) / n});
    i = j;
  }
  return curve;
}

double empirical_ccdf_at(std::span<const double> samples, double threshold) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  const auto above = std::count_if(samples.begin(), samples.end(),
                                   [threshold](double x) { return x > threshold; });
  return double(above) / double(samples.size());
}

double ks_distance(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = double(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double model = analytical_sir_ccdf(sorted[i], alpha);
    // Left limit counts samples >= x; the value at x counts samples > x.
    const double left = double(sorted.size() - i) / n;
    const double right = double(sorted.size() - j) / n;
    worst = std::max({worst, std::abs(left - model), std::abs(right - model)});
    i = j;
  }
  return worst;
}

}  // namespace lazycell::stochgeo
