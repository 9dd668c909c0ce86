// SPDX-License-Identifier: Apache-2.0
#include "lazycell/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "lazycell/error.hpp"

namespace lazycell::propagation {

namespace {

constexpr double kHeightEffective = 1.0;  // h_E for UMa/UMi breakpoint distance

constexpr double kRmaHbsMin = 10.0, kRmaHbsMax = 150.0;
constexpr double kRmaHutMin = 1.0, kRmaHutMax = 10.0;

void check_range(double value, double lo, double hi, std::string_view what) {
  if (!(value >= lo && value <= hi)) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("{} = {} outside validity range [{}, {}]", what, value, lo, hi));
  }
}

void check_fc(double fc_ghz, double hi) { check_range(fc_ghz, 0.5, hi, "fc_ghz"); }

// Clamps d2 up to `d2_min` keeping the vertical offset, so d3 stays consistent.
struct Clamped {
  double d2;
  double d3;
};
Clamped clamp_planar(double d2, double d3, double d2_min) {
  if (d2 >= d2_min) return {d2, d3};
  const double dz2 = std::max(0.0, d3 * d3 - d2 * d2);
  return {d2_min, std::sqrt(d2_min * d2_min + dz2)};
}

void check_max_distance(double d, double hi, std::string_view model) {
  if (d > hi) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("{}: distance {} m beyond model validity ({} m)", model, d, hi));
  }
}

class PowerLawModel final : public PathlossModel {
 public:
  PowerLawModel(double exponent, double d_min) : exponent_(exponent), d_min_(d_min) {
    if (!(exponent > 0)) throw Error(ErrorCode::OutOfRange, "power-law exponent must be > 0");
    if (!(d_min > 0)) throw Error(ErrorCode::OutOfRange, "d_min must be > 0");
  }
  Model kind() const override { return Model::PowerLaw; }
  double pathloss_db(double, double d3, double, double) const override {
    return 10.0 * exponent_ * std::log10(std::max(d3, d_min_));
  }

 private:
  double exponent_;
  double d_min_;
};

class RmaModel final : public PathlossModel {
 public:
  explicit RmaModel(const PropagationConfig& c)
      : env_(make_rma_environment(c.fc_ghz, c.building_height, c.street_width)),
        los_(c.los),
        d_min_(std::max(c.d_min, 10.0)) {}
  Model kind() const override { return Model::RMa; }
  double pathloss_db(double d2, double d3, double h_bs, double h_ut) const override {
    check_rma_heights(h_bs, h_ut);
    const auto [cd2, cd3] = clamp_planar(d2, d3, d_min_);
    check_max_distance(cd2, los_ == Los::LOS ? 10000.0 : 5000.0, "RMa");
    return rma_pathloss_db(env_, rma_coefficients(env_, h_bs, h_ut), los_, cd2, cd3);
  }

 private:
  RmaEnvironment env_;
  Los los_;
  double d_min_;
};

class RmaConstantHeightModel final : public PathlossModel {
 public:
  explicit RmaConstantHeightModel(const PropagationConfig& c)
      : env_(make_rma_environment(c.fc_ghz, c.building_height, c.street_width)),
        h_bs_(c.h_bs),
        h_ut_(c.h_ut),
        los_(c.los),
        d_min_(std::max(c.d_min, 10.0)) {
    check_rma_heights(h_bs_, h_ut_);
    coeffs_ = rma_coefficients(env_, h_bs_, h_ut_);
  }
  Model kind() const override { return Model::RMaConstantHeight; }
  // Heights passed per call are ignored: the model is fixed to its configured heights.
  double pathloss_db(double d2, double d3, double, double) const override {
    const auto [cd2, cd3] = clamp_planar(d2, d3, d_min_);
    check_max_distance(cd2, los_ == Los::LOS ? 10000.0 : 5000.0, "RMa");
    return rma_pathloss_db(env_, coeffs_, los_, cd2, cd3);
  }

 private:
  RmaEnvironment env_;
  double h_bs_;
  double h_ut_;
  Los los_;
  double d_min_;
  RmaCoefficients coeffs_;
};

class RmaDiscretisedModel final : public PathlossModel {
 public:
  explicit RmaDiscretisedModel(const PropagationConfig& c)
      : table_(build_discretised_rma(HeightGrid::log_spaced(c.rma_grid_bs, c.rma_grid_ut),
                                     c.fc_ghz, c.building_height, c.street_width)),
        los_(c.los),
        d_min_(std::max(c.d_min, 10.0)) {}
  Model kind() const override { return Model::RMaDiscretised; }
  double pathloss_db(double d2, double d3, double h_bs, double h_ut) const override {
    const auto [cd2, cd3] = clamp_planar(d2, d3, d_min_);
    check_max_distance(cd2, los_ == Los::LOS ? 10000.0 : 5000.0, "RMa");
    return table_.pathloss_db(los_, cd2, cd3, h_bs, h_ut);
  }

 private:
  DiscretisedRmaTable table_;
  Los los_;
  double d_min_;
};

class UmaModel final : public PathlossModel {
 public:
  explicit UmaModel(const PropagationConfig& c)
      : fc_(c.fc_ghz), log_fc_(20.0 * std::log10(c.fc_ghz)), los_(c.los),
        d_min_(std::max(c.d_min, 10.0)) {
    check_fc(fc_, 100.0);
  }
  Model kind() const override { return Model::UMa; }
  double pathloss_db(double d2, double d3, double h_bs, double h_ut) const override {
    check_range(h_ut, 1.5, 22.5, "UMa h_ut");
    if (!(h_bs > kHeightEffective && h_bs <= 150.0)) {
      throw Error(ErrorCode::OutOfRange, fmt::format("UMa h_bs = {} outside (1, 150]", h_bs));
    }
    const auto [cd2, cd3] = clamp_planar(d2, d3, d_min_);
    check_max_distance(cd2, 5000.0, "UMa");
    const double log_d = std::log10(cd3);
    const double bp = 4.0 * (h_bs - kHeightEffective) * (h_ut - kHeightEffective) * fc_ * 1e9 /
                      kSpeedOfLight;
    double los;
    if (cd2 <= bp) {
      los = 28.0 + 22.0 * log_d + log_fc_;
    } else {
      const double dh = h_bs - h_ut;
      los = 28.0 + 40.0 * log_d + log_fc_ - 9.0 * std::log10(bp * bp + dh * dh);
    }
    if (los_ == Los::LOS) return los;
    const double nlos = 13.54 + 39.08 * log_d + log_fc_ - 0.6 * (h_ut - 1.5);
    return std::max(los, nlos);
  }

 private:
  double fc_;
  double log_fc_;
  Los los_;
  double d_min_;
};

class UmiModel final : public PathlossModel {
 public:
  explicit UmiModel(const PropagationConfig& c)
      : fc_(c.fc_ghz), log_fc_(std::log10(c.fc_ghz)), los_(c.los),
        d_min_(std::max(c.d_min, 10.0)) {
    check_fc(fc_, 100.0);
  }
  Model kind() const override { return Model::UMi; }
  double pathloss_db(double d2, double d3, double h_bs, double h_ut) const override {
    check_range(h_ut, 1.5, 22.5, "UMi h_ut");
    if (!(h_bs > kHeightEffective && h_bs <= 150.0)) {
      throw Error(ErrorCode::OutOfRange, fmt::format("UMi h_bs = {} outside (1, 150]", h_bs));
    }
    const auto [cd2, cd3] = clamp_planar(d2, d3, d_min_);
    check_max_distance(cd2, 5000.0, "UMi");
    const double log_d = std::log10(cd3);
    const double bp = 4.0 * (h_bs - kHeightEffective) * (h_ut - kHeightEffective) * fc_ * 1e9 /
                      kSpeedOfLight;
    double los;
    if (cd2 <= bp) {
      los = 32.4 + 21.0 * log_d + 20.0 * log_fc_;
    } else {
      const double dh = h_bs - h_ut;
      los = 32.4 + 40.0 * log_d + 20.0 * log_fc_ - 9.5 * std::log10(bp * bp + dh * dh);
    }
    if (los_ == Los::LOS) return los;
    const double nlos = 35.3 * log_d + 22.4 + 21.3 * log_fc_ - 0.3 * (h_ut - 1.5);
    return std::max(los, nlos);
  }

 private:
  double fc_;
  double log_fc_;
  Los los_;
  double d_min_;
};

// InH-Office.
class InhModel final : public PathlossModel {
 public:
  explicit InhModel(const PropagationConfig& c)
      : log_fc_(std::log10(c.fc_ghz)), los_(c.los), d_min_(std::max(c.d_min, 1.0)) {
    check_fc(c.fc_ghz, 100.0);
  }
  Model kind() const override { return Model::InH; }
  double pathloss_db(double, double d3, double h_bs, double h_ut) const override {
    if (!(h_bs > 0 && h_ut > 0)) {
      throw Error(ErrorCode::OutOfRange, "InH antenna heights must be positive");
    }
    const double d = std::max(d3, d_min_);
    check_max_distance(d, 150.0, "InH");
    const double log_d = std::log10(d);
    const double los = 32.4 + 17.3 * log_d + 20.0 * log_fc_;
    if (los_ == Los::LOS) return los;
    return std::max(los, 38.3 * log_d + 17.30 + 24.9 * log_fc_);
  }

 private:
  double log_fc_;
  Los los_;
  double d_min_;
};

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::PowerLaw: return "PowerLaw";
    case Model::RMa: return "RMa";
    case Model::RMaConstantHeight: return "RMaConstantHeight";
    case Model::RMaDiscretised: return "RMaDiscretised";
    case Model::UMa: return "UMa";
    case Model::UMi: return "UMi";
    case Model::InH: return "InH";
  }
  return "unknown";
}

std::optional<Model> parse_model(std::string_view name) {
  for (const auto m : {Model::PowerLaw, Model::RMa, Model::RMaConstantHeight,
                       Model::RMaDiscretised, Model::UMa, Model::UMi, Model::InH}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

double db_to_gain(double db) { return std::pow(10.0, -db / 10.0); }
double gain_to_db(double gain) { return -10.0 * std::log10(gain); }

double PathlossModel::pathgain(double d2, double d3, double h_bs, double h_ut) const {
  return std::min(1.0, db_to_gain(pathloss_db(d2, d3, h_bs, h_ut)));
}

std::unique_ptr<PathlossModel> make_model(const PropagationConfig& config) {
  switch (config.model) {
    case Model::PowerLaw: return std::make_unique<PowerLawModel>(config.exponent, config.d_min);
    case Model::RMa: return std::make_unique<RmaModel>(config);
    case Model::RMaConstantHeight: return std::make_unique<RmaConstantHeightModel>(config);
    case Model::RMaDiscretised: return std::make_unique<RmaDiscretisedModel>(config);
    case Model::UMa: return std::make_unique<UmaModel>(config);
    case Model::UMi: return std::make_unique<UmiModel>(config);
    case Model::InH: return std::make_unique<InhModel>(config);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown propagation model");
}

double pathloss_db(const PropagationConfig& config, double d2, double d3) {
  if (d2 < 0 || d3 < 0) throw Error(ErrorCode::InvalidArgument, "distances must be >= 0");
  return make_model(config)->pathloss_db(d2, d3, config.h_bs, config.h_ut);
}

double pathgain(const PropagationConfig& config, double d2, double d3) {
  return std::min(1.0, db_to_gain(pathloss_db(config, d2, d3)));
}

// ---------------------------------------------------------------------------

RmaEnvironment make_rma_environment(double fc_ghz, double building_height, double street_width) {
  check_fc(fc_ghz, 30.0);
  check_range(building_height, 5.0, 50.0, "RMa building_height");
  check_range(street_width, 5.0, 50.0, "RMa street_width");
  const double h = building_height;
  const double h172 = std::pow(h, 1.72);
  RmaEnvironment env;
  env.fc_ghz = fc_ghz;
  env.building_height = h;
  env.street_width = street_width;
  env.los_offset = 20.0 * std::log10(40.0 * std::numbers::pi * fc_ghz / 3.0) -
                   std::min(0.044 * h172, 14.77);
  env.los_log_slope = 20.0 + std::min(0.03 * h172, 10.0);
  env.los_linear = 0.002 * std::log10(h);
  env.nlos_offset = 161.04 - 7.1 * std::log10(street_width) + 7.5 * std::log10(h) +
                    20.0 * std::log10(fc_ghz);
  return env;
}

void check_rma_heights(double h_bs, double h_ut) {
  check_range(h_bs, kRmaHbsMin, kRmaHbsMax, "RMa h_bs");
  check_range(h_ut, kRmaHutMin, kRmaHutMax, "RMa h_ut");
}

RmaCoefficients rma_coefficients(const RmaEnvironment& env, double h_bs, double h_ut) {
  RmaCoefficients c;
  c.breakpoint = 2.0 * std::numbers::pi * h_bs * h_ut * env.fc_ghz * 1e9 / kSpeedOfLight;
  const double pl_bp = env.los_offset + env.los_log_slope * std::log10(c.breakpoint) +
                       env.los_linear * c.breakpoint;
  c.los2_offset = pl_bp - 40.0 * std::log10(c.breakpoint);
  const double log_hbs = std::log10(h_bs);
  const double ratio = env.building_height / h_bs;
  const double log_hut = std::log10(11.75 * h_ut);
  c.nlos_slope = 43.42 - 3.1 * log_hbs;
  c.nlos_offset = env.nlos_offset - (24.37 - 3.7 * ratio * ratio) * log_hbs -
                  3.0 * c.nlos_slope - (3.2 * log_hut * log_hut - 4.97);
  return c;
}

double rma_pathloss_db(const RmaEnvironment& env, const RmaCoefficients& c, Los los, double d2,
                       double d3) {
  // Natural log is markedly cheaper than log10 in glibc; this is the per-link hot path.
  const double log_d = std::log(d3) * std::numbers::log10e;
  const double pl_los = d2 <= c.breakpoint
                            ? env.los_offset + env.los_log_slope * log_d + env.los_linear * d3
                            : c.los2_offset + 40.0 * log_d;
  if (los == Los::LOS) return pl_los;
  return std::max(pl_los, c.nlos_offset + c.nlos_slope * log_d);
}

HeightGrid HeightGrid::log_spaced(int n_bs, int n_ut) {
  if (n_bs < 2 || n_ut < 2) throw Error(ErrorCode::InvalidArgument, "grid needs >= 2 points per axis");
  auto geom = [](double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double ratio = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = lo * std::exp(ratio * i);
    v.front() = lo;
    v.back() = hi;
    return v;
  };
  return {geom(kRmaHbsMin, kRmaHbsMax, n_bs), geom(kRmaHutMin, kRmaHutMax, n_ut)};
}

DiscretisedRmaTable::DiscretisedRmaTable(HeightGrid grid, const RmaEnvironment& env)
    : grid_(std::move(grid)), env_(env) {
  if (grid_.h_bs.empty() || grid_.h_ut.empty()) {
    throw Error(ErrorCode::InvalidArgument, "height grid must be non-empty");
  }
  if (!std::is_sorted(grid_.h_bs.begin(), grid_.h_bs.end()) ||
      !std::is_sorted(grid_.h_ut.begin(), grid_.h_ut.end())) {
    throw Error(ErrorCode::InvalidArgument, "height grid axes must be sorted ascending");
  }
  table_.reserve(grid_.h_bs.size() * grid_.h_ut.size());
  for (const double hb : grid_.h_bs) {
    for (const double hu : grid_.h_ut) {
      check_rma_heights(hb, hu);
      table_.push_back(rma_coefficients(env_, hb, hu));
    }
  }
  bs_lookup_.build(grid_.h_bs);
  ut_lookup_.build(grid_.h_ut);
}

void DiscretisedRmaTable::AxisLookup::build(const std::vector<double>& axis) {
  const auto n_axis = axis.size();
  auto bucket_for = [&](std::size_t idx) {
    const double inf = std::numeric_limits<double>::infinity();
    return Bucket{idx > 0 ? 0.5 * (axis[idx - 1] + axis[idx]) : -inf,
                  idx + 1 < n_axis ? 0.5 * (axis[idx] + axis[idx + 1]) : inf,
                  static_cast<std::uint32_t>(idx)};
  };
  lo = axis.front();
  const double span = axis.back() - lo;
  double min_gap = span;
  for (std::size_t k = 1; k < n_axis; ++k) min_gap = std::min(min_gap, axis[k] - axis[k - 1]);
  if (!(span > 0.0) || !(min_gap > 0.0)) {
    inv_width = 0.0;
    bucket.assign(1, bucket_for(0));
    return;
  }
  const auto n = static_cast<std::size_t>(
      std::clamp(std::ceil(2.0 * span / min_gap), 1.0, double(1 << 20)));
  inv_width = double(n) / span;
  bucket.clear();
  bucket.reserve(n + 1);
  std::size_t idx = 0;
  for (std::size_t b = 0; b <= n; ++b) {
    const double edge = lo + double(b) / inv_width;
    while (idx + 1 < n_axis && edge > 0.5 * (axis[idx] + axis[idx + 1])) ++idx;
    bucket.push_back(bucket_for(idx));
  }
}

std::size_t DiscretisedRmaTable::AxisLookup::nearest(double value) const {
  const auto b = std::min(static_cast<std::size_t>((value - lo) * inv_width), bucket.size() - 1);
  const Bucket& k = bucket[b];
  // Buckets are narrower than any gap, so the answer is at most one step away. Ties go down.
  return k.index - std::size_t(value <= k.lower) + std::size_t(value > k.upper);
}

const RmaCoefficients& DiscretisedRmaTable::nearest(double h_bs, double h_ut) const {
  if (!(h_bs >= grid_.h_bs.front() && h_bs <= grid_.h_bs.back() && h_ut >= grid_.h_ut.front() &&
        h_ut <= grid_.h_ut.back())) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("heights ({}, {}) outside the discretised grid", h_bs, h_ut));
  }
  return coefficients(bs_lookup_.nearest(h_bs), ut_lookup_.nearest(h_ut));
}

double DiscretisedRmaTable::pathloss_db(Los los, double d2, double d3, double h_bs,
                                        double h_ut) const {
  return rma_pathloss_db(env_, nearest(h_bs, h_ut), los, d2, d3);
}

void DiscretisedRmaTable::write_csv(std::ostream& out) const {
  out << fmt::format("# fc_ghz={:.17g},building_height={:.17g},street_width={:.17g}\n",
                     env_.fc_ghz, env_.building_height, env_.street_width);
  out << "h_bs,h_ut,breakpoint,los2_offset,nlos_offset,nlos_slope\n";
  for (std::size_t b = 0; b < grid_.h_bs.size(); ++b) {
    for (std::size_t u = 0; u < grid_.h_ut.size(); ++u) {
      const auto& c = coefficients(b, u);
      out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", grid_.h_bs[b],
                         grid_.h_ut[u], c.breakpoint, c.los2_offset, c.nlos_offset,
                         c.nlos_slope);
    }
  }
}

DiscretisedRmaTable DiscretisedRmaTable::read_csv(std::istream& in) {
  std::string line;
  double fc = 0, h = 0, w = 0;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "# fc_ghz=%lf,building_height=%lf,street_width=%lf", &fc, &h,
                  &w) != 3) {
    throw Error(ErrorCode::ParseError, "discretised RMa CSV: missing environment line");
  }
  std::getline(in, line);  // header
  HeightGrid grid;
  std::vector<RmaCoefficients> rows;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double hb, hu;
    RmaCoefficients c;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &hb, &hu, &c.breakpoint,
                    &c.los2_offset, &c.nlos_offset, &c.nlos_slope) != 6) {
      throw Error(ErrorCode::ParseError,
                  fmt::format("discretised RMa CSV line {}: expected 6 numbers", line_no));
    }
    if (grid.h_bs.empty() || grid.h_bs.back() != hb) grid.h_bs.push_back(hb);
    if (grid.h_bs.size() == 1) grid.h_ut.push_back(hu);
    rows.push_back(c);
  }
  if (rows.size() != grid.h_bs.size() * grid.h_ut.size()) {
    throw Error(ErrorCode::ParseError, "discretised RMa CSV: rows do not form a full grid");
  }
  DiscretisedRmaTable table(grid, make_rma_environment(fc, h, w));
  table.table_ = std::move(rows);
  return table;
}

DiscretisedRmaTable build_discretised_rma(const HeightGrid& grid, double fc_ghz,
                                          double building_height, double street_width) {
  return DiscretisedRmaTable(grid, make_rma_environment(fc_ghz, building_height, street_width));
}

}  // namespace lazycell::propagation
