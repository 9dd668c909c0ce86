// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lazycell/types.hpp"

namespace lazycell::radio {

/// Horizontal sector pattern parameters shared by every directional cell.
struct AntennaPattern {
  double phi_3db_deg = 65.0;
  double a_max_db = 30.0;
};

/// Per-site sectorisation: n_sectors logical cells, one boresight each.
struct AntennaConfig {
  int n_sectors = 1;
  std::vector<double> boresights_rad;
  AntennaPattern pattern;

  /// Boresights at offset + s*360/n degrees. A single sector is omnidirectional.
  static AntennaConfig sectored(int n_sectors, double offset_rad = 0.0);
  bool omnidirectional() const noexcept { return n_sectors == 1; }
};

/// Angular distance between two azimuths, folded into [0, 180] degrees.
template <typename Scalar>
inline Scalar wrapped_offset_deg(Scalar phi_rad, Scalar boresight_rad) {
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar delta = std::abs(std::remainder(phi_rad - boresight_rad, two_pi));
  return delta * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// -min(12 (offset/phi_3dB)^2, A_max), in dB.
template <typename Scalar>
inline Scalar pattern_attenuation_db(Scalar offset_deg, const AntennaPattern& p = {}) {
  const Scalar r = offset_deg / Scalar(p.phi_3db_deg);
  return -std::min(Scalar(12) * r * r, Scalar(p.a_max_db));
}

template <typename Scalar>
inline Scalar antenna_attenuation_db(Scalar phi_rad, Scalar boresight_rad,
                                     const AntennaPattern& p = {}) {
  return pattern_attenuation_db(wrapped_offset_deg(phi_rad, boresight_rad), p);
}

/// Attenuation for sector `sector` of a site; zero for an omnidirectional site.
double antenna_attenuation_db(double phi_rad, int sector, const AntennaConfig& config);

/// Unit-mean exponential power fades (Rayleigh amplitude), reproducible from `seed`.
MatrixXd sample_rayleigh_fades(Index n_ue, Index n_cell, std::uint64_t seed);
void fill_rayleigh_fades(std::mt19937_64& rng, MatrixXd& fades);

}  // namespace lazycell::radio
