// SPDX-License-Identifier: Apache-2.0
#include "lazycell/link.hpp"

#include <algorithm>

namespace lazycell::link {

double linear_to_db(double x) { return 10.0 * std::log10(x); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

int sinr_to_cqi(double sinr_db) {
  // upper_bound counts thresholds <= sinr_db, which is the closed-below CQI.
  const auto it = std::upper_bound(kCqiThresholdsDb.begin(), kCqiThresholdsDb.end(), sinr_db);
  return static_cast<int>(it - kCqiThresholdsDb.begin());
}

int cqi_to_mcs(int cqi) {
  if (cqi < 0 || cqi > kMaxCqi) {
    throw Error(ErrorCode::OutOfRange, fmt::format("cqi {} outside [0, {}]", cqi, kMaxCqi));
  }
  return std::min(kMaxMcs, cqi * kMaxMcs / kMaxCqi);
}

double mcs_to_spectral_efficiency(int mcs) {
  if (mcs < 0 || mcs > kMaxMcs) {
    throw Error(ErrorCode::OutOfRange, fmt::format("mcs {} outside [0, {}]", mcs, kMaxMcs));
  }
  return kMcsSpectralEfficiency[std::size_t(mcs)];
}

double cqi_spectral_efficiency(int cqi) {
  return cqi == 0 ? 0.0 : mcs_to_spectral_efficiency(cqi_to_mcs(cqi));
}

double shannon_capacity(double sinr_linear, double bandwidth_hz, int n_streams) {
  if (n_streams < 1) throw Error(ErrorCode::InvalidArgument, "n_streams must be >= 1");
  if (sinr_linear < 0) throw Error(ErrorCode::InvalidArgument, "sinr must be >= 0");
  return n_streams * bandwidth_hz * std::log2(1.0 + sinr_linear);
}

double thermal_noise_w(double bandwidth_hz, double noise_figure_db) {
  return std::pow(10.0, (kThermalNoiseDbmPerHz + noise_figure_db - 30.0) / 10.0) * bandwidth_hz;
}

MatrixXd compute_rsrp(const MatrixXd& power, const MatrixXd& gain, const MatrixXd& fades) {
  if (gain.cols() != power.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "gain columns must equal the number of cells");
  }
  const bool faded = fades.size() != 0;
  if (faded && (fades.rows() != gain.rows() || fades.cols() != gain.cols())) {
    throw Error(ErrorCode::ShapeMismatch, "fade matrix must match the gain matrix");
  }
  MatrixXd out(gain.rows(), power.rows() * power.cols());
  for (Index i = 0; i < gain.rows(); ++i) {
    auto row = out.row(i);
    if (faded) {
      const auto fade = fades.row(i);
      rsrp_row(power, gain.row(i), &fade, row);
    } else {
      rsrp_row(power, gain.row(i), static_cast<const decltype(fades.row(i))*>(nullptr), row);
    }
  }
  return out;
}

VectorXi attach(const MatrixXd& rsrp, Index n_cell, Index n_sub) {
  if (n_cell < 1 || rsrp.cols() != n_cell * n_sub) {
    throw Error(ErrorCode::ShapeMismatch, "rsrp tensor shape does not match cells x subbands");
  }
  VectorXi a(rsrp.rows());
  for (Index i = 0; i < rsrp.rows(); ++i) a(i) = attach_rsrp_row(rsrp.row(i), n_cell, n_sub);
  return a;
}

SignalSplit split(const MatrixXd& rsrp, const VectorXi& attachment, Index n_cell, Index n_sub) {
  SignalSplit out{MatrixXd(rsrp.rows(), n_sub), MatrixXd(rsrp.rows(), n_sub)};
  for (Index i = 0; i < rsrp.rows(); ++i) {
    auto w = out.wanted.row(i);
    auto u = out.unwanted.row(i);
    split_row(rsrp.row(i), attachment(i), n_cell, n_sub, w, u);
  }
  return out;
}

MatrixXd compute_sinr(const SignalSplit& s, const VectorXd& noise) {
  if (noise.size() != s.wanted.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "noise vector must have one entry per subband");
  }
  MatrixXd out(s.wanted.rows(), s.wanted.cols());
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index k = 0; k < out.cols(); ++k) out(i, k) = sinr(s.wanted(i, k), s.unwanted(i, k), noise(k));
  }
  return out;
}

}  // namespace lazycell::link
