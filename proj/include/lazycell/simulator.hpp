// SPDX-License-Identifier: Apache-2.0
#pragma once

// The cellular data flow assembled on a DependencyGraph:
//
//   U, C, antenna, P, noise, fairness, [fades]      roots
//   D   = distances/azimuths(U, C)                   N x 3M  (d2 | d3 | az)
//   G   = pathgain(D) * antenna gain                 N x M
//   R   = P * G [* fades]                            N x (M*K)
//   a   = attachment(G, P)                           N x 1
//   w,u = split(R, a)                                N x 2K  (w | u)
//   SINR, CQI, MCS, SE, Shannon                      N x K
//   S   = per-UE spectral efficiency(SE, a, P)       N x 1
//   T   = throughput(S, a, P, fairness)              N x 1
//
// Every UE-axis node recomputes only its dirty rows. The throughput node
// widens a dirty row to every UE sharing the old or new serving cell.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lazycell/engine.hpp"
#include "lazycell/propagation.hpp"
#include "lazycell/radio.hpp"
#include "lazycell/types.hpp"

namespace lazycell {

struct SimulatorConfig {
  PositionTable ues;
  PositionTable cells;
  /// One entry per cell (or empty for all omnidirectional); nullopt means omnidirectional.
  std::vector<std::optional<double>> boresights_rad;
  radio::AntennaPattern antenna_pattern;
  propagation::PropagationConfig propagation;
  /// Transmit power per (cell, subband), watts.
  MatrixXd power_w;
  /// Whole channel bandwidth; subbands split it equally.
  double bandwidth_hz = 10e6;
  /// Per-subband noise power in watts; when unset, derived from the thermal floor.
  std::optional<double> noise_w;
  double noise_figure_db = 7.0;
  bool fading = false;
  std::uint64_t fading_seed = 0;
  double fairness_p = 0.0;
  int n_streams = 1;
  /// When false every mutation invalidates whole payloads (full recomputation).
  bool smart = true;
};

class Simulator {
 public:
  using Graph = engine::DependencyGraph<double>;
  using NodeId = engine::NodeId;

  struct Nodes {
    NodeId ues, cells, antenna, power, noise, fairness;
    std::optional<NodeId> fades;
    NodeId distances, gains, rsrp, attachment, split, sinr, cqi, mcs, spectral_efficiency,
        shannon, ue_spectral_efficiency, throughput;
  };

  explicit Simulator(SimulatorConfig config);
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  Index n_ues() const noexcept { return n_ues_; }
  Index n_cells() const noexcept { return n_cells_; }
  Index n_subbands() const noexcept { return n_sub_; }
  bool smart() const noexcept { return smart_; }
  void set_smart(bool smart) noexcept { smart_ = smart; }
  const propagation::PathlossModel& pathloss_model() const { return *model_; }

  // Mutators only invalidate; nothing is computed until a getter is called.
  void move_ues(std::span<const Index> indices, const Eigen::Ref<const MatrixXd>& positions);
  void set_ue_positions(const PositionTable& positions);
  void set_cell_positions(const PositionTable& positions);
  void set_power(const MatrixXd& power_w);
  void set_fairness(double p);
  void set_noise_w(double noise_w);
  void resample_fades(std::uint64_t seed);

  // Getters trigger lazy evaluation. References stay valid until the next mutation.
  const MatrixXd& ue_positions() { return graph_.evaluate(nodes_.ues); }
  const MatrixXd& distances() { return graph_.evaluate(nodes_.distances); }
  const MatrixXd& gains() { return graph_.evaluate(nodes_.gains); }
  const MatrixXd& rsrp() { return graph_.evaluate(nodes_.rsrp); }
  const MatrixXd& attachment() { return graph_.evaluate(nodes_.attachment); }
  const MatrixXd& signal_split() { return graph_.evaluate(nodes_.split); }
  const MatrixXd& sinr() { return graph_.evaluate(nodes_.sinr); }
  const MatrixXd& cqi() { return graph_.evaluate(nodes_.cqi); }
  const MatrixXd& mcs() { return graph_.evaluate(nodes_.mcs); }
  const MatrixXd& spectral_efficiency() { return graph_.evaluate(nodes_.spectral_efficiency); }
  const MatrixXd& shannon_capacity() { return graph_.evaluate(nodes_.shannon); }
  const MatrixXd& ue_spectral_efficiency() {
    return graph_.evaluate(nodes_.ue_spectral_efficiency);
  }
  const MatrixXd& throughputs() { return graph_.evaluate(nodes_.throughput); }

  /// SINR in dB, N x K.
  MatrixXd sinr_db();
  /// Per-cell bandwidth: the channel share of the subbands the cell transmits in.
  VectorXd cell_bandwidth_hz();
  const VectorXd& noise_per_subband() const noexcept { return noise_; }

  Graph& graph() noexcept { return graph_; }
  const Graph& graph() const noexcept { return graph_; }
  const Nodes& nodes() const noexcept { return nodes_; }

 private:
  void build_graph(const SimulatorConfig& config);
  void after_mutation(NodeId root);

  Index n_ues_ = 0;
  Index n_cells_ = 0;
  Index n_sub_ = 0;
  bool smart_ = true;
  double bandwidth_hz_ = 0;
  int n_streams_ = 1;
  radio::AntennaPattern pattern_;
  std::shared_ptr<const propagation::PathlossModel> model_;
  VectorXd noise_;
  // Attachment seen by the throughput kernel at its last run.
  std::vector<Index> throughput_attachment_;
  Graph graph_;
  Nodes nodes_;
};

}  // namespace lazycell
