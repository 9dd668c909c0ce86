// SPDX-License-Identifier: Apache-2.0
#pragma once

// Pathgain strategies. Every model maps (2D distance, 3D distance, BS height,
// UT height) to a pathloss in dB; the gain is 10^(-PL/10), clamped to 1.
// The 3GPP models follow TR 38.901 Table 7.4.1-1 with a deterministic
// LOS/NLOS flag. Distances below a model's lower bound are clamped up to it;
// inputs above the upper bound, or heights/frequencies outside the model's
// validity range, raise ErrorCode::OutOfRange.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace lazycell::propagation {

enum class Model { PowerLaw, RMa, RMaConstantHeight, RMaDiscretised, UMa, UMi, InH };
enum class Los { LOS, NLOS };

std::string_view to_string(Model model);
std::optional<Model> parse_model(std::string_view name);

struct PropagationConfig {
  Model model = Model::UMa;
  double fc_ghz = 3.5;
  double h_bs = 25.0;
  double h_ut = 1.5;
  Los los = Los::NLOS;
  double exponent = 3.5;  // PowerLaw only
  double d_min = 1.0;
  double building_height = 5.0;  // RMa average building height h
  double street_width = 20.0;    // RMa average street width W
  int rma_grid_bs = 40;          // RMaDiscretised grid size along h_bs
  int rma_grid_ut = 40;          // ... and along h_ut
};

inline constexpr double kSpeedOfLight = 3.0e8;

double db_to_gain(double db);
double gain_to_db(double gain);

/// Strategy interface; implementations are immutable after construction.
class PathlossModel {
 public:
  virtual ~PathlossModel() = default;
  virtual Model kind() const = 0;
  virtual double pathloss_db(double d2, double d3, double h_bs, double h_ut) const = 0;
  double pathgain(double d2, double d3, double h_bs, double h_ut) const;
};

std::unique_ptr<PathlossModel> make_model(const PropagationConfig& config);

/// One-shot evaluation using the heights held in `config`.
double pathloss_db(const PropagationConfig& config, double d2, double d3);
double pathgain(const PropagationConfig& config, double d2, double d3);

// ---------------------------------------------------------------------------
// RMa building blocks, shared by the three RMa variants.

/// Terms that depend only on frequency and the environment (h, W).
struct RmaEnvironment {
  double fc_ghz = 0;
  double building_height = 0;
  double street_width = 0;
  double los_offset = 0;      // PL1 = los_offset + los_log_slope*log10(d) + los_linear*d
  double los_log_slope = 0;
  double los_linear = 0;
  double nlos_offset = 0;     // height-independent part of PL'_NLOS
};

/// Terms that additionally depend on the antenna heights.
struct RmaCoefficients {
  double breakpoint = 0;      // d_BP, metres
  double los2_offset = 0;     // PL2 = los2_offset + 40*log10(d)
  double nlos_offset = 0;     // PL'_NLOS = nlos_offset + nlos_slope*log10(d)
  double nlos_slope = 0;
};

RmaEnvironment make_rma_environment(double fc_ghz, double building_height, double street_width);
RmaCoefficients rma_coefficients(const RmaEnvironment& env, double h_bs, double h_ut);
/// Pathloss from precomputed coefficients; distances must already be clamped and range checked.
double rma_pathloss_db(const RmaEnvironment& env, const RmaCoefficients& c, Los los, double d2,
                       double d3);
void check_rma_heights(double h_bs, double h_ut);

struct HeightGrid {
  std::vector<double> h_bs;
  std::vector<double> h_ut;

  /// Geometrically spaced grid covering the full RMa height validity range.
  static HeightGrid log_spaced(int n_bs, int n_ut);
};

/// Precomputed RMa coefficients at discrete (h_bs, h_ut) pairs with
/// nearest-grid-point lookup.
class DiscretisedRmaTable {
 public:
  DiscretisedRmaTable(HeightGrid grid, const RmaEnvironment& env);

  const HeightGrid& grid() const noexcept { return grid_; }
  const RmaEnvironment& environment() const noexcept { return env_; }
  const RmaCoefficients& coefficients(std::size_t bs_index, std::size_t ut_index) const {
    return table_[bs_index * grid_.h_ut.size() + ut_index];
  }
  /// Nearest grid entry; heights outside the grid's span raise OutOfRange.
  const RmaCoefficients& nearest(double h_bs, double h_ut) const;

  double pathloss_db(Los los, double d2, double d3, double h_bs, double h_ut) const;

  /// CSV of (h_bs, h_ut, breakpoint, los2_offset, nlos_offset, nlos_slope), preceded by
  /// one comment line recording the environment.
  void write_csv(std::ostream& out) const;
  static DiscretisedRmaTable read_csv(std::istream& in);

 private:
  // Constant-time nearest lookup: equal-width buckets no wider than half the
  // smallest grid spacing, each holding the grid index nearest its left edge
  // and the midpoints to that index's neighbours.
  struct Bucket {
    double lower;  // at or below: one index down
    double upper;  // above: one index up
    std::uint32_t index;
  };
  struct AxisLookup {
    double lo = 0.0;
    double inv_width = 0.0;
    std::vector<Bucket> bucket;
    void build(const std::vector<double>& axis);
    std::size_t nearest(double value) const;
  };

  HeightGrid grid_;
  RmaEnvironment env_;
  std::vector<RmaCoefficients> table_;
  AxisLookup bs_lookup_;
  AxisLookup ut_lookup_;
};

DiscretisedRmaTable build_discretised_rma(const HeightGrid& grid, double fc_ghz,
                                          double building_height = 5.0,
                                          double street_width = 20.0);

}  // namespace lazycell::propagation
