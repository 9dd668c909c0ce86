// SPDX-License-Identifier: Apache-2.0
#pragma once

// Batch commands behind the CLI. Each returns plain result rows so tests can
// check numbers directly; the write_* functions emit the CSV form.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lazycell/scenario.hpp"
#include "lazycell/simulator.hpp"

namespace lazycell::commands {

struct UeReport {
  Index ue;
  Index serving_cell;
  double rsrp_w;  // summed over subbands
  std::vector<double> sinr_db, cqi, mcs;
  double spectral_efficiency;
  double throughput_bps;
};

struct RunReport {
  std::vector<UeReport> ues;
  Index n_subbands = 0;
  double seconds = 0.0;
  std::uint64_t kernel_runs = 0;
  std::uint64_t rows_computed = 0;
};

/// Builds the scenario, applies the configured mobility steps and reports final metrics.
RunReport run(const ScenarioConfig& scenario);
void write_run_csv(std::ostream& out, const RunReport& report);

struct FairnessRow {
  double p;
  Index ue;
  Index cell;
  double spectral_efficiency;
  double throughput_bps;
};

/// Per-p allocation over sweep.p_grid. With sweep.spectral_efficiency set the
/// sweep runs one cell directly on those efficiencies.
std::vector<FairnessRow> sweep_fairness(const ScenarioConfig& scenario);
void write_fairness_csv(std::ostream& out, const std::vector<FairnessRow>& rows);

struct AngleRow {
  double angle_deg;
  double sinr_db;
  double throughput_bps;
};

/// UE 0 circles cell 0 at sweep.radius; `n_points` equally spaced angles from 0.
std::vector<AngleRow> sweep_angle(const ScenarioConfig& scenario, int n_points);
void write_angle_csv(std::ostream& out, const std::vector<AngleRow>& rows);

struct DistanceRow {
  propagation::Model model;
  double distance_m;
  double sinr_db;
  double throughput_bps;
};

/// For each sweep model: one cell at the origin, one UE moved along +x over sweep.distances.
std::vector<DistanceRow> sweep_distance(const ScenarioConfig& scenario);
void write_distance_csv(std::ostream& out, const std::vector<DistanceRow>& rows);

struct PppPoint {
  double theta_db;
  double empirical;
  double analytical;
};

struct PppValidation {
  std::vector<double> sir;  // linear SIR per UE
  std::vector<PppPoint> curve;
  double max_deviation = 0.0;  // sup-norm over all sample steps
  Index n_cells = 0;
  Index n_ues = 0;
  double alpha = 0.0;
};

/// Binomial deployment over a square, UEs in the central quarter, PowerLaw,
/// equal powers, zero noise, Rayleigh fading.
PppValidation validate_ppp(const PppConfig& config, std::uint64_t seed);
void write_ppp_csv(std::ostream& out, const PppValidation& result);

struct BenchRun {
  double seconds = 0.0;
  std::uint64_t kernel_runs = 0;
  std::uint64_t rows_computed = 0;
};

struct BenchReport {
  int steps = 0;
  double fraction = 0.0;
  Index n_ues = 0;
  Index n_cells = 0;
  BenchRun smart;
  BenchRun full;
  double speedup = 0.0;
};

/// Replays one seeded mobility trace with smart updates on and off. Throws
/// ErrorCode::MetricMismatch unless final SINR and spectral efficiency agree exactly.
BenchReport bench(const ScenarioConfig& scenario, int steps, double fraction);
void write_bench_csv(std::ostream& out, const BenchReport& report);

}  // namespace lazycell::commands
