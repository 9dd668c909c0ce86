// SPDX-License-Identifier: Apache-2.0
// lazycell: scenario runner, sweeps, PPP validation and the smart-update benchmark.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lazycell/commands.hpp"
#include "lazycell/error.hpp"
#include "lazycell/scenario.hpp"

namespace {

using namespace lazycell;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<bool> smart;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "scenario file (TOML)");
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "output CSV path (default: stdout)");
  cmd->add_option("--seed", c.seed, "override the scenario seed");
  cmd->add_flag("--smart,!--no-smart", c.smart, "row-granular smart updates (default on)");
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig s = c.config.empty() ? ScenarioConfig{} : load_scenario(c.config);
  if (c.seed) s.seed = *c.seed;
  if (c.smart) s.smart = *c.smart;
  return s;
}

template <typename Fn>
void emit(const Common& c, Fn&& write) {
  if (c.out.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", c.out), "out");
  write(file);
  if (!file) throw Error(ErrorCode::IoError, fmt::format("write to {} failed", c.out), "out");
}

std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (const char ch : text) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + '"';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lazy cellular network simulator"};
  app.require_subcommand(1);

  Common run_opts, fair_opts, angle_opts, dist_opts, ppp_opts, bench_opts;
  auto* run = app.add_subcommand("run", "run a scenario and write per-UE metrics");
  add_common(run, run_opts, true);

  auto* fair = app.add_subcommand("sweep-fairness", "throughput per UE over the p grid");
  add_common(fair, fair_opts, true);

  int n_points = 0;
  auto* angle = app.add_subcommand("sweep-angle", "throughput of a UE circling cell 0");
  add_common(angle, angle_opts, true);
  angle->add_option("--points", n_points, "angles on the circle (default sweep.n_points)");

  auto* dist = app.add_subcommand("sweep-distance", "throughput against distance per model");
  add_common(dist, dist_opts, true);

  std::optional<long long> ppp_cells, ppp_ues;
  std::optional<double> ppp_alpha;
  auto* ppp = app.add_subcommand("validate-ppp", "empirical vs analytical SIR distribution");
  add_common(ppp, ppp_opts, false);
  ppp->add_option("--cells", ppp_cells, "number of cells");
  ppp->add_option("--ues", ppp_ues, "number of UEs");
  ppp->add_option("--alpha", ppp_alpha, "pathloss exponent (> 2)");

  std::optional<int> bench_steps;
  std::optional<double> bench_fraction;
  auto* bench = app.add_subcommand("bench", "smart vs full recomputation timing");
  add_common(bench, bench_opts, true);
  bench->add_option("--steps", bench_steps, "time steps (default mobility.steps)");
  bench->add_option("--fraction", bench_fraction, "fraction of UEs moved per step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      const auto report = commands::run(load(run_opts));
      emit(run_opts, [&](std::ostream& o) { commands::write_run_csv(o, report); });
      std::cerr << fmt::format("ues={} seconds={:.6f} kernel_runs={} rows_computed={}\n",
                               report.ues.size(), report.seconds, report.kernel_runs,
                               report.rows_computed);
    } else if (*fair) {
      const auto rows = commands::sweep_fairness(load(fair_opts));
      emit(fair_opts, [&](std::ostream& o) { commands::write_fairness_csv(o, rows); });
    } else if (*angle) {
      const auto s = load(angle_opts);
      const auto rows = commands::sweep_angle(s, n_points > 0 ? n_points : s.sweep.n_points);
      emit(angle_opts, [&](std::ostream& o) { commands::write_angle_csv(o, rows); });
    } else if (*dist) {
      const auto rows = commands::sweep_distance(load(dist_opts));
      emit(dist_opts, [&](std::ostream& o) { commands::write_distance_csv(o, rows); });
    } else if (*ppp) {
      const auto s = load(ppp_opts);
      PppConfig pc = s.ppp;
      if (ppp_cells) pc.n_cells = Index(*ppp_cells);
      if (ppp_ues) pc.n_ues = Index(*ppp_ues);
      if (ppp_alpha) pc.alpha = *ppp_alpha;
      if (pc.n_cells < 1 || pc.n_ues < 1) {
        throw Error(ErrorCode::ValidationError, "cell and UE counts must be >= 1", "ppp");
      }
      const auto result = commands::validate_ppp(pc, s.seed);
      emit(ppp_opts, [&](std::ostream& o) { commands::write_ppp_csv(o, result); });
      std::cerr << fmt::format("cells={} ues={} alpha={} max_deviation={:.6f}\n", result.n_cells,
                               result.n_ues, result.alpha, result.max_deviation);
    } else if (*bench) {
      const auto s = load(bench_opts);
      const auto report = commands::bench(s, bench_steps.value_or(s.mobility.steps),
                                          bench_fraction.value_or(s.mobility.fraction));
      emit(bench_opts, [&](std::ostream& o) { commands::write_bench_csv(o, report); });
      std::cerr << fmt::format(
          "steps={} fraction={} smart_s={:.4f} full_s={:.4f} speedup={:.3f} "
          "full_ms_per_step={:.2f}\n",
          report.steps, report.fraction, report.smart.seconds, report.full.seconds,
          report.speedup, 1e3 * report.full.seconds / report.steps);
    }
  } catch (const Error& e) {
    std::cerr << fmt::format("error code={} field={} message={}\n", to_string(e.code()),
                             e.field().empty() ? "-" : e.field(), quoted(e.what()));
    return 2;
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error code=internal field=- message={}\n", quoted(e.what()));
    return 3;
  }
  return 0;
}
