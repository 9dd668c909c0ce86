// SPDX-License-Identifier: Apache-2.0
#include "lazycell/radio.hpp"

#include "lazycell/error.hpp"

namespace lazycell::radio {

AntennaConfig AntennaConfig::sectored(int n_sectors, double offset_rad) {
  if (n_sectors < 1) throw Error(ErrorCode::InvalidArgument, "n_sectors must be >= 1");
  AntennaConfig config;
  config.n_sectors = n_sectors;
  for (int s = 0; s < n_sectors; ++s) {
    config.boresights_rad.push_back(offset_rad + 2.0 * std::numbers::pi * s / n_sectors);
  }
  return config;
}

double antenna_attenuation_db(double phi_rad, int sector, const AntennaConfig& config) {
  if (config.omnidirectional()) return 0.0;
  return antenna_attenuation_db(phi_rad, config.boresights_rad.at(std::size_t(sector)),
                                config.pattern);
}

void fill_rayleigh_fades(std::mt19937_64& rng, MatrixXd& fades) {
  std::exponential_distribution<double> exponential(1.0);
  for (Index i = 0; i < fades.rows(); ++i) {
    for (Index j = 0; j < fades.cols(); ++j) {
      double f = exponential(rng);
      // exponential_distribution may return exactly 0; fades must stay positive.
      while (f <= 0.0) f = exponential(rng);
      fades(i, j) = f;
    }
  }
}

MatrixXd sample_rayleigh_fades(Index n_ue, Index n_cell, std::uint64_t seed) {
  if (n_ue <= 0 || n_cell <= 0) throw Error(ErrorCode::InvalidArgument, "fade sizes must be > 0");
  std::mt19937_64 rng(seed);
  MatrixXd fades(n_ue, n_cell);
  fill_rayleigh_fades(rng, fades);
  return fades;
}

}  // namespace lazycell::radio
