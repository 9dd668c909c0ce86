// SPDX-License-Identifier: Apache-2.0
#pragma once

// Radio link chain: RSRP -> attachment -> wanted/unwanted split -> SINR ->
// CQI -> MCS -> spectral efficiency, plus the Shannon capacity bound.
//
// Tensor layout: the RSRP tensor R[i][j][k] (UE, cell, subband) is stored as
// an N_ue x (N_cell * N_sub) matrix with column j*N_sub + k.

#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lazycell/error.hpp"
#include "lazycell/types.hpp"

namespace lazycell::link {

/// Lower SINR edge (dB) of CQI 1..15; below the first entry the CQI is 0.
/// Entries 4..15 are the usual SINR thresholds for the 4-bit CQI table
/// (TS 36.213 Table 7.2.3-1 efficiencies). Entries 1..3 are raised from
/// -6.7/-4.7/-2.3 dB to the smallest 0.1 dB value at which the spectral
/// efficiency of the mapped MCS does not exceed log2(1 + SINR).
inline constexpr std::array<double, 15> kCqiThresholdsDb = {
    -6.2, -3.9, -1.7, 0.2, 2.4, 4.3, 5.9, 8.1, 10.3, 11.7, 14.1, 16.3, 18.7, 21.0, 22.7};

/// TS 38.214 Table 5.1.3.1-1 (64QAM), spectral efficiency per MCS index.
/// The table dips slightly from MCS 16 to 17 (modulation change); MCS 17 is
/// never produced by cqi_to_mcs.
inline constexpr std::array<double, 29> kMcsSpectralEfficiency = {
    0.2344, 0.3066, 0.3770, 0.4902, 0.6016, 0.7402, 0.8770, 1.0273, 1.1758, 1.3262,
    1.3281, 1.4766, 1.6953, 1.9141, 2.1602, 2.4063, 2.5703, 2.5664, 2.7305, 3.0293,
    3.3223, 3.6094, 3.9023, 4.2129, 4.5234, 4.8164, 5.1152, 5.3320, 5.5547};

inline constexpr int kMaxCqi = 15;
inline constexpr int kMaxMcs = 28;

/// Thermal noise density, dBm/Hz.
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

double linear_to_db(double x);
double db_to_linear(double db);

/// Closed-below lookup: a value exactly on a threshold maps to that CQI.
int sinr_to_cqi(double sinr_db);
/// floor(cqi * 28 / 15).
int cqi_to_mcs(int cqi);
double mcs_to_spectral_efficiency(int mcs);
/// Efficiency delivered at a CQI: zero when the channel is out of range (CQI 0).
double cqi_spectral_efficiency(int cqi);
/// n_streams * B * log2(1 + sinr).
double shannon_capacity(double sinr, double bandwidth_hz, int n_streams = 1);
/// k T B F, with B in Hz and the noise figure in dB; result in watts.
double thermal_noise_w(double bandwidth_hz, double noise_figure_db);

/// SINR with the degenerate cases pinned: 0/0 -> 0, w/0 -> w / smallest normal.
inline double sinr(double wanted, double unwanted, double noise) {
  const double den = noise + unwanted;
  if (den == 0.0) {
    return wanted == 0.0 ? 0.0 : wanted / std::numeric_limits<double>::min();
  }
  return wanted / den;
}

// ---------------------------------------------------------------------------
// Row kernels. Each fills one UE row; the simulator calls them only for dirty rows.

/// R[j*K + k] = (p[j][k] * g[j]) * fade[j]. `fade` may be empty (no fading).
template <typename PowerM, typename GainRow, typename FadeRow, typename OutRow>
void rsrp_row(const Eigen::MatrixBase<PowerM>& power, const Eigen::MatrixBase<GainRow>& gain,
              const FadeRow* fade, Eigen::MatrixBase<OutRow>& out) {
  const Index n_cell = power.rows();
  const Index n_sub = power.cols();
  for (Index j = 0; j < n_cell; ++j) {
    for (Index k = 0; k < n_sub; ++k) {
      const double r = power(j, k) * gain(j);
      out(j * n_sub + k) = fade ? r * (*fade)(j) : r;
    }
  }
}

/// argmax_j sum_k p[j][k] * g[j]; ties go to the lowest cell index.
template <typename PowerM, typename GainRow>
Index attach_row(const Eigen::MatrixBase<PowerM>& power, const Eigen::MatrixBase<GainRow>& gain) {
  Index best = 0;
  double best_metric = -1.0;
  for (Index j = 0; j < power.rows(); ++j) {
    double metric = 0.0;
    for (Index k = 0; k < power.cols(); ++k) metric += power(j, k) * gain(j);
    if (metric > best_metric) {
      best_metric = metric;
      best = j;
    }
  }
  return best;
}

/// Attachment from an RSRP tensor row: argmax_j sum_k R[j][k].
template <typename RsrpRow>
Index attach_rsrp_row(const Eigen::MatrixBase<RsrpRow>& rsrp, Index n_cell, Index n_sub) {
  Index best = 0;
  double best_metric = -1.0;
  for (Index j = 0; j < n_cell; ++j) {
    double metric = 0.0;
    for (Index k = 0; k < n_sub; ++k) metric += rsrp(j * n_sub + k);
    if (metric > best_metric) {
      best_metric = metric;
      best = j;
    }
  }
  return best;
}

/// w[k] = R[a][k]; u[k] = sum_j R[j][k] - w[k].
template <typename RsrpRow, typename OutRow>
void split_row(const Eigen::MatrixBase<RsrpRow>& rsrp, Index serving, Index n_cell, Index n_sub,
               Eigen::MatrixBase<OutRow>& wanted, Eigen::MatrixBase<OutRow>& unwanted) {
  for (Index k = 0; k < n_sub; ++k) {
    double total = 0.0;
    for (Index j = 0; j < n_cell; ++j) total += rsrp(j * n_sub + k);
    const double w = rsrp(serving * n_sub + k);
    wanted(k) = w;
    unwanted(k) = total - w;
  }
}

// ---------------------------------------------------------------------------
// Whole-matrix forms.

/// N x (M*K) RSRP tensor. `fades` is N x M or empty.
MatrixXd compute_rsrp(const MatrixXd& power, const MatrixXd& gain, const MatrixXd& fades = {});
/// Attachment over an RSRP tensor.
VectorXi attach(const MatrixXd& rsrp, Index n_cell, Index n_sub);

struct SignalSplit {
  MatrixXd wanted;    // N x K
  MatrixXd unwanted;  // N x K
};
SignalSplit split(const MatrixXd& rsrp, const VectorXi& attachment, Index n_cell, Index n_sub);
/// N x K SINR with per-subband noise power (watts).
MatrixXd compute_sinr(const SignalSplit& split, const VectorXd& noise);

}  // namespace lazycell::link
