// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scenario files (TOML) and the pieces needed to turn one into a Simulator:
// layouts, sectorisation, seeds and the random-walk mobility model.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lazycell/propagation.hpp"
#include "lazycell/radio.hpp"
#include "lazycell/simulator.hpp"
#include "lazycell/stochgeo.hpp"
#include "lazycell/types.hpp"

namespace lazycell {

enum class LayoutKind { Explicit, Csv, Hex, Ppp, Uniform };

struct LayoutConfig {
  LayoutKind kind = LayoutKind::Explicit;
  PositionTable positions;         // explicit
  std::filesystem::path csv_path;  // csv
  int rings = 1;                   // hex
  double inter_site_distance = 500.0;
  Index count = 0;                 // ppp by count, uniform
  double intensity = 0.0;          // ppp by intensity (used when count == 0)
  stochgeo::Region region;
  double height = 0.0;             // z of generated points
};

struct MobilityConfig {
  double fraction = 0.0;
  int steps = 0;
  double step_radius = 10.0;
  /// Reflection bounds; defaults to the UE layout region or the UE bounding box.
  std::optional<stochgeo::Region> region;
};

struct SweepConfig {
  std::vector<double> p_grid;
  /// Direct scheduler mode for sweep-fairness: one cell with these efficiencies.
  std::vector<double> spectral_efficiency;
  double cell_bandwidth_hz = 10e6;
  int n_points = 360;
  double radius = 100.0;
  std::vector<propagation::Model> models;
  std::vector<double> distances;
  /// Base-station height per model name; falls back to propagation.h_bs.
  std::map<propagation::Model, double> bs_height;
};

struct PppConfig {
  Index n_cells = 10000;
  Index n_ues = 1000;
  double alpha = 3.5;
  double side = 10000.0;
  double theta_min_db = -10.0;
  double theta_max_db = 30.0;
  double theta_step_db = 0.5;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  bool smart = true;
  LayoutConfig cells;
  LayoutConfig ues;
  int n_sectors = 1;
  double sector_offset_deg = 0.0;
  propagation::PropagationConfig propagation;
  radio::AntennaPattern antenna_pattern;
  double bandwidth_hz = 10e6;
  int n_subbands = 1;
  /// Either a per-(site or cell, subband) matrix or a scalar broadcast.
  std::optional<MatrixXd> power_matrix;
  double power_w = 10.0;
  std::optional<double> noise_w;
  double noise_figure_db = 7.0;
  bool fading = false;
  int n_streams = 1;
  double fairness_p = 0.0;
  MobilityConfig mobility;
  SweepConfig sweep;
  PppConfig ppp;
  /// Directory of the scenario file; relative CSV paths resolve against it.
  std::filesystem::path base_dir;
};

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Site positions for the hex layout: `rings` rings around the origin at height `height`.
PositionTable hex_sites(int rings, double inter_site_distance, double height);

/// Stream seeds derived from the scenario seed, so each random draw is independent.
enum class SeedStream : std::uint64_t { Cells = 1, Ues = 2, Fades = 3, Mobility = 4 };
std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream);

PositionTable realise_layout(const LayoutConfig& layout, const std::filesystem::path& base_dir,
                             std::uint64_t seed);

/// Realised positions plus the full simulator configuration.
SimulatorConfig build_simulator_config(const ScenarioConfig& scenario);

/// Random walk: a fraction of UEs take a uniform step inside a disc, reflected at the region edge.
class Mobility {
 public:
  Mobility(const MobilityConfig& config, const stochgeo::Region& region, std::uint64_t seed);
  /// Chooses the movers and their new positions for one step.
  void step(const MatrixXd& positions, std::vector<Index>& movers, MatrixXd& moved);

 private:
  double fraction_;
  double radius_;
  stochgeo::Region region_;
  std::mt19937_64 rng_;
};

/// Region used for mobility: configured, else the UE layout region, else the bounding box.
stochgeo::Region mobility_region(const ScenarioConfig& scenario, const PositionTable& ues);

}  // namespace lazycell
