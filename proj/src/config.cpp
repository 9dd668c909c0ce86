// SPDX-License-Identifier: Apache-2.0
#include "lazycell/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "lazycell/csv.hpp"
#include "lazycell/error.hpp"
#include "lazycell/geometry.hpp"

namespace lazycell {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message,
                          const toml::node* node = nullptr) {
  std::string where;
  if (node && node->source().begin.line > 0) {
    where = fmt::format(" (line {})", node->source().begin.line);
  }
  throw Error(ErrorCode::ValidationError, fmt::format("{}: {}{}", field, message, where), field);
}

// Typed accessors. A key that is present with the wrong type is a validation
// error naming the dotted field path.
class Section {
 public:
  Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  bool has(std::string_view key) const { return table_ && table_->contains(key); }
  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
  }
  const toml::node* node(std::string_view key) const {
    return table_ ? table_->get(key) : nullptr;
  }
  Section sub(std::string_view key) const {
    const toml::node* n = node(key);
    if (n && !n->is_table()) invalid(field(key), "expected a table", n);
    return Section(n ? n->as_table() : nullptr, field(key));
  }

  double number(std::string_view key, double fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (auto v = n->value<double>()) return *v;
    invalid(field(key), "expected a number", n);
  }
  std::int64_t integer(std::string_view key, std::int64_t fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<std::int64_t>()) return *v;
    invalid(field(key), "expected an integer", n);
  }
  bool boolean(std::string_view key, bool fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<bool>()) return *v;
    invalid(field(key), "expected true or false", n);
  }
  std::string string(std::string_view key, std::string fallback) const {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<std::string>()) return *v;
    invalid(field(key), "expected a string", n);
  }
  std::vector<double> numbers(std::string_view key) const {
    const toml::node* n = node(key);
    std::vector<double> out;
    if (!n) return out;
    const toml::array* arr = n->as_array();
    if (!arr) invalid(field(key), "expected an array of numbers", n);
    for (const auto& el : *arr) {
      auto v = el.value<double>();
      if (!v) invalid(field(key), "expected an array of numbers", &el);
      out.push_back(*v);
    }
    return out;
  }
  MatrixXd matrix(std::string_view key) const {
    const toml::node* n = node(key);
    const toml::array* rows = n ? n->as_array() : nullptr;
    if (!rows) invalid(field(key), "expected an array of rows", n);
    MatrixXd out;
    Index r = 0;
    for (const auto& row_node : *rows) {
      const toml::array* row = row_node.as_array();
      if (!row) invalid(field(key), "expected an array of rows", &row_node);
      if (r == 0) out.resize(Index(rows->size()), Index(row->size()));
      if (Index(row->size()) != out.cols()) invalid(field(key), "rows differ in length", &row_node);
      Index c = 0;
      for (const auto& el : *row) {
        auto v = el.value<double>();
        if (!v) invalid(field(key), "expected numbers", &el);
        out(r, c++) = *v;
      }
      ++r;
    }
    return out;
  }
  const std::string& path() const { return path_; }

 private:
  const toml::table* table_;
  std::string path_;
};

stochgeo::Region parse_region(const Section& s, std::string_view key,
                              const stochgeo::Region& fallback) {
  if (!s.has(key)) return fallback;
  const auto v = s.numbers(key);
  if (v.size() != 4) invalid(s.field(key), "expected [x_min, y_min, x_max, y_max]", s.node(key));
  stochgeo::Region r{v[0], v[1], v[2], v[3]};
  if (!(r.width() > 0) || !(r.height() > 0)) {
    invalid(s.field(key), "region must have positive area", s.node(key));
  }
  return r;
}

LayoutConfig parse_layout(const Section& s, bool cells) {
  LayoutConfig layout;
  const std::string kind = s.string("kind", "explicit");
  if (kind == "explicit") {
    layout.kind = LayoutKind::Explicit;
    if (!s.has("positions")) invalid(s.field("positions"), "required for an explicit layout");
    MatrixXd m = s.matrix("positions");
    if (m.cols() != 3) invalid(s.field("positions"), "each position needs x, y, z", s.node("positions"));
    layout.positions = m;
  } else if (kind == "csv") {
    layout.kind = LayoutKind::Csv;
    layout.csv_path = s.string("path", "");
    if (layout.csv_path.empty()) invalid(s.field("path"), "required for a csv layout");
  } else if (kind == "hex" && cells) {
    layout.kind = LayoutKind::Hex;
    layout.rings = int(s.integer("rings", 1));
    layout.inter_site_distance = s.number("inter_site_distance", 500.0);
    if (layout.rings < 0) invalid(s.field("rings"), "must be >= 0", s.node("rings"));
    if (!(layout.inter_site_distance > 0)) {
      invalid(s.field("inter_site_distance"), "must be > 0", s.node("inter_site_distance"));
    }
  } else if (kind == "ppp" || (kind == "uniform" && !cells)) {
    layout.kind = kind == "ppp" ? LayoutKind::Ppp : LayoutKind::Uniform;
    layout.count = Index(s.integer("count", 0));
    layout.intensity = s.number("intensity", 0.0);
    layout.region = parse_region(s, "region", {0.0, 0.0, 1000.0, 1000.0});
    if (layout.count < 0) invalid(s.field("count"), "must be >= 0", s.node("count"));
    if (layout.count == 0 && (layout.kind == LayoutKind::Uniform || !(layout.intensity > 0))) {
      invalid(s.field("count"), "a positive count (or, for ppp, intensity) is required");
    }
  } else {
    invalid(s.field("kind"), fmt::format("unknown layout kind '{}'", kind), s.node("kind"));
  }
  layout.height = s.number("height", cells ? 25.0 : 1.5);
  return layout;
}

propagation::Model parse_model_field(const std::string& name, const toml::node* node,
                                     const std::string& field) {
  auto model = propagation::parse_model(name);
  if (!model) invalid(field, fmt::format("unknown model '{}'", name), node);
  return *model;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                fmt::format("line {}, column {}: {}", e.source().begin.line,
                            e.source().begin.column, e.description()));
  }
  const Section top(&root, "");
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  const auto seed = top.integer("seed", 1);
  if (seed < 0) invalid("seed", "must be >= 0", top.node("seed"));
  cfg.seed = std::uint64_t(seed);
  cfg.smart = top.boolean("smart", true);

  const Section layout = top.sub("layout");
  if (!layout.has("cells")) invalid("layout.cells", "required");
  if (!layout.has("ues")) invalid("layout.ues", "required");
  cfg.cells = parse_layout(layout.sub("cells"), true);
  cfg.ues = parse_layout(layout.sub("ues"), false);

  const Section sectors = top.sub("sectors");
  cfg.n_sectors = int(sectors.integer("n", 1));
  if (cfg.n_sectors < 1) invalid("sectors.n", "must be >= 1", sectors.node("n"));
  cfg.sector_offset_deg = sectors.number("offset_deg", 0.0);

  const Section prop = top.sub("propagation");
  auto& pc = cfg.propagation;
  if (prop.has("model")) {
    pc.model = parse_model_field(prop.string("model", ""), prop.node("model"),
                                 "propagation.model");
  }
  pc.fc_ghz = prop.number("fc_ghz", pc.fc_ghz);
  pc.h_bs = prop.number("h_bs", pc.h_bs);
  pc.h_ut = prop.number("h_ut", pc.h_ut);
  const std::string los = prop.string("los", "NLOS");
  if (los == "LOS") {
    pc.los = propagation::Los::LOS;
  } else if (los == "NLOS") {
    pc.los = propagation::Los::NLOS;
  } else {
    invalid("propagation.los", "expected LOS or NLOS", prop.node("los"));
  }
  pc.exponent = prop.number("exponent", pc.exponent);
  pc.d_min = prop.number("d_min", pc.d_min);
  pc.building_height = prop.number("building_height", pc.building_height);
  pc.street_width = prop.number("street_width", pc.street_width);
  pc.rma_grid_bs = int(prop.integer("grid_bs", pc.rma_grid_bs));
  pc.rma_grid_ut = int(prop.integer("grid_ut", pc.rma_grid_ut));
  if (!(pc.fc_ghz > 0)) invalid("propagation.fc_ghz", "must be > 0", prop.node("fc_ghz"));
  if (!(pc.d_min > 0)) invalid("propagation.d_min", "must be > 0", prop.node("d_min"));
  if (!(pc.exponent > 0)) invalid("propagation.exponent", "must be > 0", prop.node("exponent"));

  const Section antenna = top.sub("antenna");
  cfg.antenna_pattern.phi_3db_deg = antenna.number("hpbw_deg", cfg.antenna_pattern.phi_3db_deg);
  cfg.antenna_pattern.a_max_db =
      antenna.number("max_attenuation_db", cfg.antenna_pattern.a_max_db);
  if (!(cfg.antenna_pattern.phi_3db_deg > 0)) {
    invalid("antenna.hpbw_deg", "must be > 0", antenna.node("hpbw_deg"));
  }

  const Section radio = top.sub("radio");
  cfg.bandwidth_hz = radio.number("bandwidth_hz", cfg.bandwidth_hz);
  cfg.n_subbands = int(radio.integer("n_subbands", 1));
  cfg.power_w = radio.number("power_w", cfg.power_w);
  if (radio.has("power_matrix")) {
    cfg.power_matrix = radio.matrix("power_matrix");
    cfg.n_subbands = int(cfg.power_matrix->cols());
    if (radio.has("n_subbands") && radio.integer("n_subbands", 1) != cfg.power_matrix->cols()) {
      invalid("power_matrix", "column count must equal radio.n_subbands",
              radio.node("power_matrix"));
    }
  }
  if (radio.has("noise_w")) cfg.noise_w = radio.number("noise_w", 0.0);
  cfg.noise_figure_db = radio.number("noise_figure_db", cfg.noise_figure_db);
  cfg.fading = radio.boolean("fading", false);
  cfg.n_streams = int(radio.integer("n_streams", 1));
  if (!(cfg.bandwidth_hz > 0)) invalid("radio.bandwidth_hz", "must be > 0", radio.node("bandwidth_hz"));
  if (cfg.n_subbands < 1) invalid("radio.n_subbands", "must be >= 1", radio.node("n_subbands"));
  if (!(cfg.power_w >= 0)) invalid("radio.power_w", "must be >= 0", radio.node("power_w"));
  if (cfg.noise_w && !(*cfg.noise_w >= 0)) invalid("radio.noise_w", "must be >= 0", radio.node("noise_w"));
  if (cfg.n_streams < 1) invalid("radio.n_streams", "must be >= 1", radio.node("n_streams"));

  const Section sched = top.sub("scheduler");
  cfg.fairness_p = sched.number("fairness", 0.0);
  if (!(cfg.fairness_p >= 0)) invalid("scheduler.fairness", "must be >= 0", sched.node("fairness"));

  const Section mob = top.sub("mobility");
  cfg.mobility.fraction = mob.number("fraction", 0.0);
  cfg.mobility.steps = int(mob.integer("steps", 0));
  cfg.mobility.step_radius = mob.number("step_radius", 10.0);
  if (mob.has("region")) cfg.mobility.region = parse_region(mob, "region", {});
  if (!(cfg.mobility.fraction >= 0 && cfg.mobility.fraction <= 1)) {
    invalid("mobility.fraction", "must be in [0, 1]", mob.node("fraction"));
  }
  if (cfg.mobility.steps < 0) invalid("mobility.steps", "must be >= 0", mob.node("steps"));
  if (!(cfg.mobility.step_radius >= 0)) {
    invalid("mobility.step_radius", "must be >= 0", mob.node("step_radius"));
  }

  const Section sweep = top.sub("sweep");
  auto& sw = cfg.sweep;
  sw.p_grid = sweep.numbers("p_grid");
  sw.spectral_efficiency = sweep.numbers("spectral_efficiency");
  sw.cell_bandwidth_hz = sweep.number("cell_bandwidth_hz", sw.cell_bandwidth_hz);
  sw.n_points = int(sweep.integer("n_points", sw.n_points));
  sw.radius = sweep.number("radius", sw.radius);
  sw.distances = sweep.numbers("distances");
  if (const toml::node* n = sweep.node("models")) {
    const toml::array* arr = n->as_array();
    if (!arr) invalid("sweep.models", "expected an array of model names", n);
    for (const auto& el : *arr) {
      auto name = el.value_exact<std::string>();
      if (!name) invalid("sweep.models", "expected an array of model names", &el);
      sw.models.push_back(parse_model_field(*name, &el, "sweep.models"));
    }
  }
  const Section heights = sweep.sub("bs_height");
  if (const toml::node* n = sweep.node("bs_height")) {
    for (const auto& [key, value] : *n->as_table()) {
      const std::string name(key.str());
      const auto model = parse_model_field(name, &value, heights.field(name));
      auto h = value.value<double>();
      if (!h || !(*h > 0)) invalid(heights.field(name), "expected a positive height", &value);
      sw.bs_height[model] = *h;
    }
  }
  for (const double d : sw.distances) {
    if (!(d >= 0)) invalid("sweep.distances", "distances must be >= 0", sweep.node("distances"));
  }
  for (const double p : sw.p_grid) {
    if (!(p >= 0)) invalid("sweep.p_grid", "values must be >= 0", sweep.node("p_grid"));
  }
  for (const double s : sw.spectral_efficiency) {
    if (!(s >= 0)) {
      invalid("sweep.spectral_efficiency", "values must be >= 0", sweep.node("spectral_efficiency"));
    }
  }

  const Section ppp = top.sub("ppp");
  auto& pp = cfg.ppp;
  pp.n_cells = Index(ppp.integer("cells", pp.n_cells));
  pp.n_ues = Index(ppp.integer("ues", pp.n_ues));
  pp.alpha = ppp.number("alpha", pp.alpha);
  pp.side = ppp.number("side", pp.side);
  pp.theta_min_db = ppp.number("theta_min_db", pp.theta_min_db);
  pp.theta_max_db = ppp.number("theta_max_db", pp.theta_max_db);
  pp.theta_step_db = ppp.number("theta_step_db", pp.theta_step_db);
  if (pp.n_cells < 1) invalid("ppp.cells", "must be >= 1", ppp.node("cells"));
  if (pp.n_ues < 1) invalid("ppp.ues", "must be >= 1", ppp.node("ues"));
  if (!(pp.alpha > 2)) invalid("ppp.alpha", "must be > 2", ppp.node("alpha"));
  if (!(pp.side > 0)) invalid("ppp.side", "must be > 0", ppp.node("side"));
  if (!(pp.theta_step_db > 0)) invalid("ppp.theta_step_db", "must be > 0", ppp.node("theta_step_db"));
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str(), path.parent_path());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) {
      throw Error(ErrorCode::ParseError, fmt::format("{}: {}", path.string(), e.what()));
    }
    throw;
  }
}

PositionTable hex_sites(int rings, double inter_site_distance, double height) {
  std::vector<std::array<double, 2>> sites;
  // Axial coordinates (q, r) with |q|, |r|, |q + r| <= rings.
  for (int q = -rings; q <= rings; ++q) {
    for (int r = std::max(-rings, -q - rings); r <= std::min(rings, -q + rings); ++r) {
      const double x = inter_site_distance * (q + 0.5 * r);
      const double y = inter_site_distance * (std::sqrt(3.0) / 2.0) * r;
      sites.push_back({x, y});
    }
  }
  std::stable_sort(sites.begin(), sites.end(), [](const auto& a, const auto& b) {
    return std::hypot(a[0], a[1]) < std::hypot(b[0], b[1]) - 1e-9;
  });
  PositionTable table(Index(sites.size()), 3);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    table(Index(i), 0) = sites[i][0];
    table(Index(i), 1) = sites[i][1];
    table(Index(i), 2) = height;
  }
  return table;
}

std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t(words[0]) << 32) | words[1];
}

PositionTable realise_layout(const LayoutConfig& layout, const std::filesystem::path& base_dir,
                             std::uint64_t seed) {
  switch (layout.kind) {
    case LayoutKind::Explicit:
      return layout.positions;
    case LayoutKind::Csv: {
      const auto path =
          layout.csv_path.is_absolute() ? layout.csv_path : base_dir / layout.csv_path;
      return csv::read_positions(path);
    }
    case LayoutKind::Hex:
      return hex_sites(layout.rings, layout.inter_site_distance, layout.height);
    case LayoutKind::Ppp:
      if (layout.count > 0) {
        return stochgeo::generate_uniform(layout.count, layout.region, layout.height, seed);
      }
      return stochgeo::generate_ppp(layout.intensity, layout.region, layout.height, seed);
    case LayoutKind::Uniform:
      return stochgeo::generate_uniform(layout.count, layout.region, layout.height, seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown layout kind");
}

SimulatorConfig build_simulator_config(const ScenarioConfig& s) {
  SimulatorConfig cfg;
  const PositionTable sites =
      realise_layout(s.cells, s.base_dir, derive_seed(s.seed, SeedStream::Cells));
  cfg.ues = realise_layout(s.ues, s.base_dir, derive_seed(s.seed, SeedStream::Ues));
  geometry::validate_positions(sites, "layout.cells");
  geometry::validate_positions(cfg.ues, "layout.ues");
  if (sites.rows() == 0) invalid("layout.cells", "no cells");
  if (cfg.ues.rows() == 0) invalid("layout.ues", "no UEs");

  const Index n_sec = s.n_sectors;
  cfg.cells.resize(sites.rows() * n_sec, 3);
  const auto antenna = radio::AntennaConfig::sectored(
      s.n_sectors, s.sector_offset_deg * std::numbers::pi / 180.0);
  for (Index site = 0; site < sites.rows(); ++site) {
    for (Index sec = 0; sec < n_sec; ++sec) {
      cfg.cells.row(site * n_sec + sec) = sites.row(site);
      if (antenna.omnidirectional()) {
        cfg.boresights_rad.push_back(std::nullopt);
      } else {
        cfg.boresights_rad.push_back(antenna.boresights_rad[std::size_t(sec)]);
      }
    }
  }
  const Index n_cells = cfg.cells.rows();
  if (s.power_matrix) {
    if (s.power_matrix->rows() != n_cells) {
      invalid("power_matrix",
              fmt::format("has {} rows but the layout has {} cells", s.power_matrix->rows(),
                          n_cells));
    }
    if (!(s.power_matrix->array() >= 0.0).all()) invalid("power_matrix", "entries must be >= 0");
    cfg.power_w = *s.power_matrix;
  } else {
    cfg.power_w = MatrixXd::Constant(n_cells, s.n_subbands, s.power_w);
  }
  cfg.antenna_pattern = s.antenna_pattern;
  cfg.propagation = s.propagation;
  cfg.bandwidth_hz = s.bandwidth_hz;
  cfg.noise_w = s.noise_w;
  cfg.noise_figure_db = s.noise_figure_db;
  cfg.fading = s.fading;
  cfg.fading_seed = derive_seed(s.seed, SeedStream::Fades);
  cfg.fairness_p = s.fairness_p;
  cfg.n_streams = s.n_streams;
  cfg.smart = s.smart;
  return cfg;
}

stochgeo::Region mobility_region(const ScenarioConfig& scenario, const PositionTable& ues) {
  if (scenario.mobility.region) return *scenario.mobility.region;
  if (scenario.ues.kind == LayoutKind::Uniform || scenario.ues.kind == LayoutKind::Ppp) {
    return scenario.ues.region;
  }
  stochgeo::Region r{ues.col(0).minCoeff(), ues.col(1).minCoeff(), ues.col(0).maxCoeff(),
                     ues.col(1).maxCoeff()};
  // Degenerate boxes (a single UE, a line of UEs) get a margin so reflection is defined.
  const double margin = std::max(1.0, scenario.mobility.step_radius);
  if (r.width() <= 0) r.x_min -= margin, r.x_max += margin;
  if (r.height() <= 0) r.y_min -= margin, r.y_max += margin;
  return r;
}

Mobility::Mobility(const MobilityConfig& config, const stochgeo::Region& region,
                   std::uint64_t seed)
    : fraction_(config.fraction), radius_(config.step_radius), region_(region), rng_(seed) {}

namespace {

double reflect(double v, double lo, double hi) {
  const double span = hi - lo;
  double t = std::fmod(v - lo, 2.0 * span);
  if (t < 0) t += 2.0 * span;
  return t <= span ? lo + t : hi - (t - span);
}

}  // namespace

void Mobility::step(const MatrixXd& positions, std::vector<Index>& movers, MatrixXd& moved) {
  const Index n = positions.rows();
  const Index count = std::clamp<Index>(Index(std::llround(fraction_ * double(n))), 1, n);
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[std::size_t(i)] = i;
  movers.clear();
  std::sample(all.begin(), all.end(), std::back_inserter(movers), count, rng_);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  moved.resize(count, 3);
  for (Index m = 0; m < count; ++m) {
    const Index i = movers[std::size_t(m)];
    const double r = radius_ * std::sqrt(unit(rng_));
    const double a = 2.0 * std::numbers::pi * unit(rng_);
    moved(m, 0) = reflect(positions(i, 0) + r * std::cos(a), region_.x_min, region_.x_max);
    moved(m, 1) = reflect(positions(i, 1) + r * std::sin(a), region_.y_min, region_.y_max);
    moved(m, 2) = positions(i, 2);
  }
}

}  // namespace lazycell
