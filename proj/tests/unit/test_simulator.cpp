// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lazycell/link.hpp"
#include "lazycell/simulator.hpp"

using namespace lazycell;

namespace {

PositionTable random_ues(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> xy(-400.0, 400.0);
  PositionTable t(n, 3);
  for (Index i = 0; i < n; ++i) t.row(i) << xy(rng), xy(rng), 1.5;
  return t;
}

// Three sites, three sectors each, two subbands with partial reuse.
SimulatorConfig network(std::mt19937_64& rng, Index n_ues, bool fading) {
  SimulatorConfig c;
  c.ues = random_ues(rng, n_ues);
  c.cells.resize(9, 3);
  const double sites[3][2] = {{0, 0}, {300, 0}, {150, 260}};
  for (Index s = 0; s < 3; ++s) {
    for (Index k = 0; k < 3; ++k) {
      c.cells.row(3 * s + k) << sites[s][0], sites[s][1], 25.0;
      c.boresights_rad.push_back(k * 2.0 * std::numbers::pi / 3.0);
    }
  }
  c.power_w = MatrixXd::Constant(9, 2, 10.0);
  c.power_w(4, 1) = 0.0;
  c.power_w(7, 0) = 0.0;
  c.bandwidth_hz = 20e6;
  c.fading = fading;
  c.fading_seed = 5;
  c.fairness_p = 0.4;
  return c;
}

void check_same(Simulator& a, Simulator& b) {
  CHECK(a.distances() == b.distances());
  CHECK(a.gains() == b.gains());
  CHECK(a.rsrp() == b.rsrp());
  CHECK(a.attachment() == b.attachment());
  CHECK(a.signal_split() == b.signal_split());
  CHECK(a.sinr() == b.sinr());
  CHECK(a.cqi() == b.cqi());
  CHECK(a.mcs() == b.mcs());
  CHECK(a.spectral_efficiency() == b.spectral_efficiency());
  CHECK(a.shannon_capacity() == b.shannon_capacity());
  CHECK(a.ue_spectral_efficiency() == b.ue_spectral_efficiency());
  CHECK(a.throughputs() == b.throughputs());
}

SimulatorConfig two_cells(bool split) {
  SimulatorConfig c;
  c.cells.resize(2, 3);
  c.cells << 0, 0, 25, 556, 0, 25;
  c.ues.resize(1, 3);
  c.ues << 278, 0, 1.5;
  c.propagation.model = propagation::Model::UMa;
  c.propagation.fc_ghz = 3.5;
  c.bandwidth_hz = 10e6;
  c.noise_figure_db = 7.0;
  if (split) {
    c.power_w.resize(2, 2);
    c.power_w << 10, 0, 0, 10;
  } else {
    c.power_w = MatrixXd::Constant(2, 1, 10.0);
  }
  return c;
}

}  // namespace

TEST_CASE("shapes of every node") {
  std::mt19937_64 rng(1);
  Simulator sim(network(rng, 12, true));
  CHECK(sim.distances().rows() == 12);
  CHECK(sim.distances().cols() == 27);
  CHECK(sim.gains().cols() == 9);
  CHECK(sim.rsrp().cols() == 18);
  CHECK(sim.signal_split().cols() == 4);
  CHECK(sim.sinr().cols() == 2);
  CHECK(sim.throughputs().rows() == 12);
  CHECK(sim.throughputs().cols() == 1);
}

TEST_CASE("property: random UE moves match a simulator built from the final positions") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const bool fading = seed % 2 == 0;
    auto config = network(rng, 40, fading);
    Simulator sim(config);
    sim.throughputs();
    PositionTable pos = config.ues;
    for (int step = 0; step < 8; ++step) {
      std::vector<Index> movers;
      for (Index i = 0; i < pos.rows(); ++i) {
        if (std::bernoulli_distribution(0.15)(rng)) movers.push_back(i);
      }
      if (movers.empty()) movers.push_back(0);
      const PositionTable moved = random_ues(rng, Index(movers.size()));
      for (std::size_t r = 0; r < movers.size(); ++r) pos.row(movers[r]) = moved.row(Index(r));
      sim.move_ues(movers, moved);
      if (step % 3 != 1) sim.throughputs();
    }
    config.ues = pos;
    Simulator fresh(config);
    INFO("seed " << seed);
    check_same(sim, fresh);
  }
}

TEST_CASE("full-recompute mode gives the same numbers") {
  std::mt19937_64 rng(3);
  auto config = network(rng, 30, true);
  Simulator smart(config);
  config.smart = false;
  Simulator full(config);
  CHECK_FALSE(full.smart());
  std::mt19937_64 moves(4);
  for (int step = 0; step < 5; ++step) {
    const std::vector<Index> movers{Index(step), Index(step + 10)};
    const PositionTable p = random_ues(moves, 2);
    smart.move_ues(movers, p);
    full.move_ues(movers, p);
    check_same(smart, full);
  }
}

TEST_CASE("getters are lazy and a single move recomputes a single row upstream of throughput") {
  std::mt19937_64 rng(5);
  Simulator sim(network(rng, 50, false));
  sim.throughputs();
  auto& g = sim.graph();
  const auto runs = g.total_kernel_runs();
  sim.throughputs();
  sim.sinr();
  CHECK(g.total_kernel_runs() == runs);

  g.reset_counters();
  const std::vector<Index> one{17};
  sim.move_ues(one, random_ues(rng, 1));
  CHECK(g.total_kernel_runs() == 0);
  sim.throughputs();
  const auto& n = sim.nodes();
  for (const auto id : {n.distances, n.gains, n.rsrp, n.attachment, n.split, n.sinr, n.cqi,
                        n.mcs, n.spectral_efficiency, n.ue_spectral_efficiency}) {
    INFO(g.name(id));
    CHECK(g.counters(id).rows_computed == 1);
  }
  // Throughput widens to the UEs sharing the old and new serving cells.
  CHECK(g.counters(n.throughput).rows_computed < 50);
}

TEST_CASE("a UE changing cell updates the throughput of both cells") {
  SimulatorConfig c;
  c.cells.resize(2, 3);
  c.cells << 0, 0, 25, 1000, 0, 25;
  c.ues.resize(4, 3);
  c.ues << 10, 0, 1.5, 50, 0, 1.5, 990, 0, 1.5, 950, 0, 1.5;
  c.power_w = MatrixXd::Constant(2, 1, 10.0);
  Simulator sim(c);
  sim.throughputs();
  const double before2 = sim.throughputs()(2);
  const std::vector<Index> mover{0};
  MatrixXd to(1, 3);
  to << 980, 10, 1.5;
  sim.move_ues(mover, to);
  CHECK(sim.attachment()(0) == 1.0);
  // UE 1 is now alone on cell 0, UE 2 now shares cell 1 three ways.
  CHECK(sim.throughputs()(1) == doctest::Approx(sim.cell_bandwidth_hz()(0) *
                                                sim.ue_spectral_efficiency()(1)));
  CHECK(sim.throughputs()(2) < before2);
  c.ues.row(0) = to;
  Simulator fresh(c);
  CHECK(sim.throughputs() == fresh.throughputs());
}

TEST_CASE("root mutators match a fresh build") {
  std::mt19937_64 rng(6);
  auto config = network(rng, 25, true);
  Simulator sim(config);
  sim.throughputs();

  config.power_w(0, 0) = 2.0;
  sim.set_power(config.power_w);
  config.fairness_p = 1.0;
  sim.set_fairness(1.0);
  config.cells(8, 0) += 40.0;
  sim.set_cell_positions(config.cells);
  config.noise_w = 1e-13;
  sim.set_noise_w(1e-13);
  config.fading_seed = 77;
  sim.resample_fades(77);
  Simulator fresh(config);
  check_same(sim, fresh);

  config.ues = random_ues(rng, 25);
  sim.set_ue_positions(config.ues);
  Simulator fresh2(config);
  check_same(sim, fresh2);
}

TEST_CASE("invalid configurations") {
  std::mt19937_64 rng(7);
  auto c = network(rng, 3, false);
  auto bad = c;
  bad.power_w = MatrixXd::Constant(8, 2, 1.0);
  CHECK_THROWS_AS(Simulator{bad}, Error);
  bad = c;
  bad.fairness_p = -1.0;
  CHECK_THROWS_AS(Simulator{bad}, Error);
  bad = c;
  bad.bandwidth_hz = 0.0;
  CHECK_THROWS_AS(Simulator{bad}, Error);
  bad = c;
  bad.boresights_rad.pop_back();
  CHECK_THROWS_AS(Simulator{bad}, Error);
  bad = c;
  bad.power_w(0, 0) = -1.0;
  CHECK_THROWS_AS(Simulator{bad}, Error);

  Simulator sim(c);
  CHECK_THROWS_AS(sim.set_fairness(-0.5), Error);
  const std::vector<Index> out_of_range{3};
  CHECK_THROWS_AS(sim.move_ues(out_of_range, MatrixXd::Zero(1, 3)), Error);
}

TEST_CASE("equidistant UE: shared band near 0 dB, split bands 20 dB") {
  auto shared_cfg = two_cells(false);
  Simulator shared(shared_cfg);
  CHECK(shared.attachment()(0) == 0.0);
  CHECK(std::abs(shared.sinr_db()(0, 0)) <= 0.1);

  shared_cfg.noise_w = 0.0;
  Simulator noiseless(shared_cfg);
  CHECK(noiseless.sinr()(0, 0) == 1.0);

  Simulator split(two_cells(true));
  CHECK(split.signal_split()(0, 2) == 0.0);  // no interference in the serving subband
  CHECK(std::abs(split.sinr_db()(0, 0) - 20.0) <= 0.1);
  CHECK(split.cell_bandwidth_hz()(0) == 5e6);
  CHECK(shared.cell_bandwidth_hz()(0) == 10e6);
  CHECK(split.throughputs()(0) > shared.throughputs()(0));
}

TEST_CASE("noise defaults to the thermal floor per subband") {
  auto c = two_cells(true);
  Simulator sim(c);
  CHECK(sim.noise_per_subband()(0) ==
        doctest::Approx(link::thermal_noise_w(5e6, 7.0)).epsilon(1e-14));
}
