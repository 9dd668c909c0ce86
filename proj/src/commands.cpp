// SPDX-License-Identifier: Apache-2.0
#include "lazycell/commands.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <fmt/format.h>

#include "lazycell/csv.hpp"
#include "lazycell/error.hpp"
#include "lazycell/link.hpp"
#include "lazycell/scheduler.hpp"
#include "lazycell/stochgeo.hpp"

namespace lazycell::commands {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Step {
  std::vector<Index> movers;
  MatrixXd moved;
};

std::vector<Step> mobility_trace(const ScenarioConfig& scenario, const PositionTable& start,
                                 int steps, double fraction) {
  MobilityConfig mc = scenario.mobility;
  mc.fraction = fraction;
  Mobility mobility(mc, mobility_region(scenario, start),
                    derive_seed(scenario.seed, SeedStream::Mobility));
  MatrixXd positions = start;
  std::vector<Step> trace(static_cast<std::size_t>(steps));
  for (auto& step : trace) {
    mobility.step(positions, step.movers, step.moved);
    for (std::size_t m = 0; m < step.movers.size(); ++m) {
      positions.row(step.movers[m]) = step.moved.row(Index(m));
    }
  }
  return trace;
}

void evaluate_outputs(Simulator& sim) {
  sim.sinr();
  sim.spectral_efficiency();
  sim.throughputs();
}

}  // namespace

RunReport run(const ScenarioConfig& scenario) {
  const auto start = Clock::now();
  Simulator sim(build_simulator_config(scenario));
  if (scenario.mobility.steps > 0 && scenario.mobility.fraction > 0) {
    const auto trace = mobility_trace(scenario, sim.ue_positions(), scenario.mobility.steps,
                                      scenario.mobility.fraction);
    for (const auto& step : trace) {
      sim.move_ues(step.movers, step.moved);
      evaluate_outputs(sim);
    }
  }
  const MatrixXd& rsrp = sim.rsrp();
  const MatrixXd& attachment = sim.attachment();
  const MatrixXd sinr_db = sim.sinr_db();
  const MatrixXd& cqi = sim.cqi();
  const MatrixXd& mcs = sim.mcs();
  const MatrixXd& se = sim.ue_spectral_efficiency();
  const MatrixXd& throughput = sim.throughputs();

  RunReport report;
  const Index k_sub = sim.n_subbands();
  report.n_subbands = k_sub;
  for (Index i = 0; i < sim.n_ues(); ++i) {
    UeReport ue;
    ue.ue = i;
    ue.serving_cell = Index(attachment(i, 0));
    ue.rsrp_w = rsrp.row(i).segment(ue.serving_cell * k_sub, k_sub).sum();
    for (Index k = 0; k < k_sub; ++k) {
      ue.sinr_db.push_back(sinr_db(i, k));
      ue.cqi.push_back(cqi(i, k));
      ue.mcs.push_back(mcs(i, k));
    }
    ue.spectral_efficiency = se(i, 0);
    ue.throughput_bps = throughput(i, 0);
    report.ues.push_back(std::move(ue));
  }
  report.seconds = seconds_since(start);
  report.kernel_runs = sim.graph().total_kernel_runs();
  report.rows_computed = sim.graph().total_rows_computed();
  return report;
}

void write_run_csv(std::ostream& out, const RunReport& report) {
  csv::Writer w(out);
  std::vector<std::string> columns{"ue", "serving_cell", "rsrp_w"};
  for (const char* prefix : {"sinr_db", "cqi", "mcs"}) {
    for (Index k = 0; k < report.n_subbands; ++k) columns.push_back(fmt::format("{}_{}", prefix, k));
  }
  columns.push_back("spectral_efficiency");
  columns.push_back("throughput_bps");
  w.header(columns);
  for (const auto& ue : report.ues) {
    w.cell(static_cast<long long>(ue.ue)).cell(static_cast<long long>(ue.serving_cell));
    w.cell(ue.rsrp_w);
    for (const double v : ue.sinr_db) w.cell(v);
    for (const double v : ue.cqi) w.cell(static_cast<long long>(v));
    for (const double v : ue.mcs) w.cell(static_cast<long long>(v));
    w.cell(ue.spectral_efficiency).cell(ue.throughput_bps);
    w.end_row();
  }
}

std::vector<FairnessRow> sweep_fairness(const ScenarioConfig& scenario) {
  const auto& grid = scenario.sweep.p_grid;
  if (grid.empty()) throw Error(ErrorCode::ValidationError, "p_grid is empty", "sweep.p_grid");
  std::vector<FairnessRow> rows;
  const auto& direct = scenario.sweep.spectral_efficiency;
  if (!direct.empty()) {
    const Eigen::Map<const VectorXd> se(direct.data(), Index(direct.size()));
    const VectorXd attachment = VectorXd::Zero(se.size());
    const VectorXd bandwidth = VectorXd::Constant(1, scenario.sweep.cell_bandwidth_hz);
    for (const double p : grid) {
      const VectorXd t = scheduler::allocate(se, attachment, bandwidth, p);
      for (Index i = 0; i < se.size(); ++i) rows.push_back({p, i, 0, se(i), t(i)});
    }
    return rows;
  }
  Simulator sim(build_simulator_config(scenario));
  for (const double p : grid) {
    sim.set_fairness(p);
    const MatrixXd& t = sim.throughputs();
    const MatrixXd& se = sim.ue_spectral_efficiency();
    const MatrixXd& a = sim.attachment();
    for (Index i = 0; i < sim.n_ues(); ++i) rows.push_back({p, i, Index(a(i, 0)), se(i, 0), t(i, 0)});
  }
  return rows;
}

void write_fairness_csv(std::ostream& out, const std::vector<FairnessRow>& rows) {
  csv::Writer w(out);
  w.header({"p", "ue", "cell", "spectral_efficiency", "throughput_bps"});
  for (const auto& r : rows) {
    w.cell(r.p).cell(static_cast<long long>(r.ue)).cell(static_cast<long long>(r.cell));
    w.cell(r.spectral_efficiency).cell(r.throughput_bps);
    w.end_row();
  }
}

std::vector<AngleRow> sweep_angle(const ScenarioConfig& scenario, int n_points) {
  if (n_points < 3) {
    throw Error(ErrorCode::ValidationError, "n_points must be >= 3", "sweep.n_points");
  }
  Simulator sim(build_simulator_config(scenario));
  const MatrixXd centre = sim.graph().peek(sim.nodes().cells).row(0);
  const double z = sim.ue_positions()(0, 2);
  const double radius = scenario.sweep.radius;
  const std::vector<Index> ue{0};
  MatrixXd position(1, 3);
  std::vector<AngleRow> rows;
  for (int k = 0; k < n_points; ++k) {
    const double deg = 360.0 * k / n_points;
    const double rad = deg * std::numbers::pi / 180.0;
    position << centre(0, 0) + radius * std::cos(rad), centre(0, 1) + radius * std::sin(rad), z;
    sim.move_ues(ue, position);
    const double t = sim.throughputs()(0, 0);
    rows.push_back({deg, link::linear_to_db(sim.sinr()(0, 0)), t});
  }
  return rows;
}

void write_angle_csv(std::ostream& out, const std::vector<AngleRow>& rows) {
  csv::Writer w(out);
  w.header({"angle_deg", "sinr_db", "throughput_bps"});
  for (const auto& r : rows) {
    w.cell(r.angle_deg).cell(r.sinr_db).cell(r.throughput_bps);
    w.end_row();
  }
}

std::vector<DistanceRow> sweep_distance(const ScenarioConfig& scenario) {
  const auto& sw = scenario.sweep;
  if (sw.distances.empty()) {
    throw Error(ErrorCode::ValidationError, "distances is empty", "sweep.distances");
  }
  std::vector<propagation::Model> models = sw.models;
  if (models.empty()) models.push_back(scenario.propagation.model);
  std::vector<DistanceRow> rows;
  for (const auto model : models) {
    SimulatorConfig cfg;
    cfg.propagation = scenario.propagation;
    cfg.propagation.model = model;
    const auto it = sw.bs_height.find(model);
    cfg.propagation.h_bs = it != sw.bs_height.end() ? it->second : scenario.propagation.h_bs;
    cfg.cells = PositionTable(1, 3);
    cfg.cells << 0.0, 0.0, cfg.propagation.h_bs;
    cfg.ues = PositionTable(1, 3);
    cfg.ues << sw.distances.front(), 0.0, cfg.propagation.h_ut;
    cfg.power_w = scenario.power_matrix && scenario.power_matrix->rows() == 1
                      ? *scenario.power_matrix
                      : MatrixXd::Constant(1, scenario.n_subbands, scenario.power_w);
    cfg.bandwidth_hz = scenario.bandwidth_hz;
    cfg.noise_w = scenario.noise_w;
    cfg.noise_figure_db = scenario.noise_figure_db;
    cfg.n_streams = scenario.n_streams;
    cfg.fairness_p = scenario.fairness_p;
    cfg.antenna_pattern = scenario.antenna_pattern;
    Simulator sim(std::move(cfg));
    const std::vector<Index> ue{0};
    MatrixXd position(1, 3);
    for (const double d : sw.distances) {
      position << d, 0.0, sim.ue_positions()(0, 2);
      sim.move_ues(ue, position);
      const double t = sim.throughputs()(0, 0);
      rows.push_back({model, d, link::linear_to_db(sim.sinr()(0, 0)), t});
    }
  }
  return rows;
}

void write_distance_csv(std::ostream& out, const std::vector<DistanceRow>& rows) {
  csv::Writer w(out);
  w.header({"model", "distance_m", "sinr_db", "throughput_bps"});
  for (const auto& r : rows) {
    w.cell(propagation::to_string(r.model)).cell(r.distance_m).cell(r.sinr_db).cell(r.throughput_bps);
    w.end_row();
  }
}

PppValidation validate_ppp(const PppConfig& config, std::uint64_t seed) {
  if (!(config.alpha > 2.0)) {
    throw Error(ErrorCode::ValidationError, "alpha must be > 2", "ppp.alpha");
  }
  const stochgeo::Region region{0.0, 0.0, config.side, config.side};
  SimulatorConfig cfg;
  cfg.cells = stochgeo::generate_uniform(config.n_cells, region, 0.0,
                                         derive_seed(seed, SeedStream::Cells));
  cfg.ues = stochgeo::generate_uniform(config.n_ues, region.central_quarter(), 0.0,
                                       derive_seed(seed, SeedStream::Ues));
  cfg.propagation.model = propagation::Model::PowerLaw;
  cfg.propagation.exponent = config.alpha;
  cfg.power_w = MatrixXd::Ones(config.n_cells, 1);
  cfg.noise_w = 0.0;
  cfg.fading = true;
  cfg.fading_seed = derive_seed(seed, SeedStream::Fades);
  Simulator sim(std::move(cfg));

  PppValidation result;
  result.n_cells = config.n_cells;
  result.n_ues = config.n_ues;
  result.alpha = config.alpha;
  const MatrixXd& sinr = sim.sinr();
  result.sir.reserve(std::size_t(sinr.rows()));
  for (Index i = 0; i < sinr.rows(); ++i) result.sir.push_back(sinr(i, 0));
  result.max_deviation = stochgeo::ks_distance(result.sir, config.alpha);
  const int n_theta =
      int(std::floor((config.theta_max_db - config.theta_min_db) / config.theta_step_db + 1e-9)) + 1;
  for (int k = 0; k < n_theta; ++k) {
    const double theta_db = config.theta_min_db + k * config.theta_step_db;
    const double theta = link::db_to_linear(theta_db);
    result.curve.push_back({theta_db, stochgeo::empirical_ccdf_at(result.sir, theta),
                            stochgeo::analytical_sir_ccdf(theta, config.alpha)});
  }
  return result;
}

void write_ppp_csv(std::ostream& out, const PppValidation& result) {
  csv::Writer w(out);
  w.header({"theta_db", "empirical", "analytical"});
  for (const auto& p : result.curve) {
    w.cell(p.theta_db).cell(p.empirical).cell(p.analytical);
    w.end_row();
  }
}

BenchReport bench(const ScenarioConfig& scenario, int steps, double fraction) {
  if (steps < 1) throw Error(ErrorCode::ValidationError, "steps must be >= 1", "mobility.steps");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::ValidationError, "fraction must be in (0, 1]", "mobility.fraction");
  }
  SimulatorConfig base = build_simulator_config(scenario);
  const auto trace = mobility_trace(scenario, base.ues, steps, fraction);

  auto replay = [&](bool smart, BenchRun& out) {
    SimulatorConfig cfg = base;
    cfg.smart = smart;
    auto sim = std::make_unique<Simulator>(std::move(cfg));
    evaluate_outputs(*sim);
    sim->graph().reset_counters();
    const auto start = Clock::now();
    for (const auto& step : trace) {
      sim->move_ues(step.movers, step.moved);
      evaluate_outputs(*sim);
    }
    out.seconds = seconds_since(start);
    out.kernel_runs = sim->graph().total_kernel_runs();
    out.rows_computed = sim->graph().total_rows_computed();
    return sim;
  };

  BenchReport report;
  report.steps = steps;
  report.fraction = fraction;
  report.n_ues = base.ues.rows();
  report.n_cells = base.cells.rows();
  auto smart = replay(true, report.smart);
  auto full = replay(false, report.full);

  auto require_equal = [](const MatrixXd& a, const MatrixXd& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) {
      const double diff = a.rows() == b.rows() && a.cols() == b.cols()
                              ? (a - b).cwiseAbs().maxCoeff()
                              : std::numeric_limits<double>::infinity();
      throw Error(ErrorCode::MetricMismatch,
                  fmt::format("smart and full {} differ (max abs difference {})", what, diff));
    }
  };
  require_equal(smart->sinr(), full->sinr(), "SINR");
  require_equal(smart->spectral_efficiency(), full->spectral_efficiency(), "spectral efficiency");
  require_equal(smart->ue_spectral_efficiency(), full->ue_spectral_efficiency(),
                "per-UE spectral efficiency");
  require_equal(smart->throughputs(), full->throughputs(), "throughput");
  report.speedup = report.smart.seconds > 0 ? report.full.seconds / report.smart.seconds : 0.0;
  return report;
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
  csv::Writer w(out);
  w.header({"mode", "steps", "fraction", "n_ues", "n_cells", "seconds", "kernel_runs",
            "rows_computed"});
  for (const auto& [mode, r] : {std::pair{"smart", report.smart}, std::pair{"full", report.full}}) {
    w.cell(mode).cell(static_cast<long long>(report.steps)).cell(report.fraction);
    w.cell(static_cast<long long>(report.n_ues)).cell(static_cast<long long>(report.n_cells));
    w.cell(r.seconds).cell(static_cast<long long>(r.kernel_runs));
    w.cell(static_cast<long long>(r.rows_computed));
    w.end_row();
  }
}

}  // namespace lazycell::commands
