// SPDX-License-Identifier: Apache-2.0
#include "lazycell/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lazycell/geometry.hpp"
#include "lazycell/link.hpp"
#include "lazycell/scheduler.hpp"

namespace lazycell {

namespace {

using engine::DirtyRegion;
using engine::RowAxis;
using Args = Simulator::Graph::KernelArgs;

template <typename Fn>
void for_each_dirty_row(const DirtyRegion& region, Index n_rows, Fn&& fn) {
  if (region.is_all()) {
    for (Index i = 0; i < n_rows; ++i) fn(i);
  } else {
    for (const Index i : region.row_set()) fn(i);
  }
}

// Sizes the output on a full recompute; row updates reuse the existing storage.
void prepare(const Args& args, Index rows, Index cols) {
  if (args.region.is_all()) args.output.resize(rows, cols);
}

void check_power(const MatrixXd& power, Index n_cells) {
  if (power.rows() != n_cells || power.cols() < 1) {
    throw Error(ErrorCode::ValidationError,
                fmt::format("power_matrix must be {} x n_subbands, got {} x {}", n_cells,
                            power.rows(), power.cols()),
                "power_matrix");
  }
  if (!(power.array() >= 0.0).all() || !power.allFinite()) {
    throw Error(ErrorCode::ValidationError, "power_matrix entries must be finite and >= 0",
                "power_matrix");
  }
}

}  // namespace

Simulator::Simulator(SimulatorConfig config) {
  geometry::validate_positions(config.ues, "ue_positions");
  geometry::validate_positions(config.cells, "cell_positions");
  if (config.ues.rows() == 0) throw Error(ErrorCode::ValidationError, "no UEs", "ues");
  if (config.cells.rows() == 0) throw Error(ErrorCode::ValidationError, "no cells", "cells");
  n_ues_ = config.ues.rows();
  n_cells_ = config.cells.rows();
  check_power(config.power_w, n_cells_);
  n_sub_ = config.power_w.cols();
  if (!config.boresights_rad.empty() && Index(config.boresights_rad.size()) != n_cells_) {
    throw Error(ErrorCode::ValidationError, "boresights must have one entry per cell",
                "boresights");
  }
  if (!(config.bandwidth_hz > 0)) {
    throw Error(ErrorCode::ValidationError, "bandwidth must be > 0", "bandwidth_hz");
  }
  if (config.n_streams < 1) {
    throw Error(ErrorCode::ValidationError, "n_streams must be >= 1", "n_streams");
  }
  if (!(config.fairness_p >= 0)) {
    throw Error(ErrorCode::ValidationError, "fairness p must be >= 0", "fairness_p");
  }
  smart_ = config.smart;
  bandwidth_hz_ = config.bandwidth_hz;
  n_streams_ = config.n_streams;
  pattern_ = config.antenna_pattern;
  model_ = propagation::make_model(config.propagation);

  const double sub_bw = bandwidth_hz_ / double(n_sub_);
  double noise = config.noise_w ? *config.noise_w
                                : link::thermal_noise_w(sub_bw, config.noise_figure_db);
  if (!(noise >= 0)) throw Error(ErrorCode::ValidationError, "noise must be >= 0", "noise_w");
  noise_ = VectorXd::Constant(n_sub_, noise);
  build_graph(config);
}

void Simulator::build_graph(const SimulatorConfig& config) {
  const Index n = n_ues_, m = n_cells_, k_sub = n_sub_;

  nodes_.ues = graph_.add_root("U", MatrixXd(config.ues), RowAxis::Ue);
  nodes_.cells = graph_.add_root("C", MatrixXd(config.cells), RowAxis::Other);
  MatrixXd antenna = MatrixXd::Zero(m, 2);
  for (std::size_t j = 0; j < config.boresights_rad.size(); ++j) {
    if (config.boresights_rad[j]) {
      antenna(Index(j), 0) = 1.0;
      antenna(Index(j), 1) = *config.boresights_rad[j];
    }
  }
  nodes_.antenna = graph_.add_root("antenna", std::move(antenna), RowAxis::Other);
  nodes_.power = graph_.add_root("P", config.power_w, RowAxis::Other);
  nodes_.noise = graph_.add_root("noise", MatrixXd(noise_.transpose()), RowAxis::Other);
  nodes_.fairness =
      graph_.add_root("fairness", MatrixXd::Constant(1, 1, config.fairness_p), RowAxis::Other);
  if (config.fading) {
    nodes_.fades = graph_.add_root("fades", radio::sample_rayleigh_fades(n, m, config.fading_seed),
                                   RowAxis::Ue);
  }

  // D: [d2 | d3 | az]
  nodes_.distances = graph_.add_node(
      "D",
      [m](const Args& args) {
        const MatrixXd& u = *args.inputs[0];
        const MatrixXd& c = *args.inputs[1];
        prepare(args, u.rows(), 3 * m);
        for_each_dirty_row(args.region, u.rows(), [&](Index i) {
          auto row = args.output.row(i);
          geometry::distance_row(u.row(i), c, row.segment(0, m), row.segment(m, m),
                                 row.segment(2 * m, m));
        });
      },
      {nodes_.ues, nodes_.cells});

  // G: pathgain times antenna gain.
  auto model = model_;
  const auto pattern = pattern_;
  nodes_.gains = graph_.add_node(
      "G",
      [m, model, pattern](const Args& args) {
        const MatrixXd& d = *args.inputs[0];
        const MatrixXd& u = *args.inputs[1];
        const MatrixXd& c = *args.inputs[2];
        const MatrixXd& ant = *args.inputs[3];
        prepare(args, d.rows(), m);
        for_each_dirty_row(args.region, d.rows(), [&](Index i) {
          const double h_ut = u(i, 2);
          for (Index j = 0; j < m; ++j) {
            double g = model->pathgain(d(i, j), d(i, m + j), c(j, 2), h_ut);
            if (ant(j, 0) != 0.0) {
              g *= link::db_to_linear(
                  radio::antenna_attenuation_db(d(i, 2 * m + j), ant(j, 1), pattern));
            }
            args.output(i, j) = g;
          }
        });
      },
      {nodes_.distances, nodes_.ues, nodes_.cells, nodes_.antenna});

  std::vector<NodeId> rsrp_inputs{nodes_.power, nodes_.gains};
  if (nodes_.fades) rsrp_inputs.push_back(*nodes_.fades);
  nodes_.rsrp = graph_.add_node(
      "R",
      [m, k_sub](const Args& args) {
        const MatrixXd& p = *args.inputs[0];
        const MatrixXd& g = *args.inputs[1];
        const MatrixXd* f = args.inputs.size() > 2 ? args.inputs[2] : nullptr;
        prepare(args, g.rows(), m * k_sub);
        for_each_dirty_row(args.region, g.rows(), [&](Index i) {
          auto out = args.output.row(i);
          if (f) {
            const auto fade = f->row(i);
            link::rsrp_row(p, g.row(i), &fade, out);
          } else {
            link::rsrp_row(p, g.row(i), static_cast<const decltype(f->row(i))*>(nullptr), out);
          }
        });
      },
      rsrp_inputs);

  // Attachment uses the fade-free RSRP sum, i.e. the long-term mean received power.
  nodes_.attachment = graph_.add_node(
      "a",
      [](const Args& args) {
        const MatrixXd& g = *args.inputs[0];
        const MatrixXd& p = *args.inputs[1];
        prepare(args, g.rows(), 1);
        for_each_dirty_row(args.region, g.rows(), [&](Index i) {
          args.output(i, 0) = double(link::attach_row(p, g.row(i)));
        });
      },
      {nodes_.gains, nodes_.power});

  nodes_.split = graph_.add_node(
      "w,u",
      [m, k_sub](const Args& args) {
        const MatrixXd& r = *args.inputs[0];
        const MatrixXd& a = *args.inputs[1];
        prepare(args, r.rows(), 2 * k_sub);
        for_each_dirty_row(args.region, r.rows(), [&](Index i) {
          auto row = args.output.row(i);
          auto w = row.segment(0, k_sub);
          auto u = row.segment(k_sub, k_sub);
          link::split_row(r.row(i), Index(a(i, 0)), m, k_sub, w, u);
        });
      },
      {nodes_.rsrp, nodes_.attachment});

  nodes_.sinr = graph_.add_node(
      "SINR",
      [k_sub](const Args& args) {
        const MatrixXd& wu = *args.inputs[0];
        const MatrixXd& noise = *args.inputs[1];
        prepare(args, wu.rows(), k_sub);
        for_each_dirty_row(args.region, wu.rows(), [&](Index i) {
          for (Index k = 0; k < k_sub; ++k) {
            args.output(i, k) = link::sinr(wu(i, k), wu(i, k_sub + k), noise(0, k));
          }
        });
      },
      {nodes_.split, nodes_.noise});

  nodes_.cqi = graph_.add_node(
      "CQI",
      [k_sub](const Args& args) {
        const MatrixXd& g = *args.inputs[0];
        prepare(args, g.rows(), k_sub);
        for_each_dirty_row(args.region, g.rows(), [&](Index i) {
          for (Index k = 0; k < k_sub; ++k) {
            args.output(i, k) = double(link::sinr_to_cqi(link::linear_to_db(g(i, k))));
          }
        });
      },
      {nodes_.sinr});

  nodes_.mcs = graph_.add_node(
      "MCS",
      [k_sub](const Args& args) {
        const MatrixXd& cqi = *args.inputs[0];
        prepare(args, cqi.rows(), k_sub);
        for_each_dirty_row(args.region, cqi.rows(), [&](Index i) {
          for (Index k = 0; k < k_sub; ++k) {
            args.output(i, k) = double(link::cqi_to_mcs(int(cqi(i, k))));
          }
        });
      },
      {nodes_.cqi});

  nodes_.spectral_efficiency = graph_.add_node(
      "SE",
      [k_sub](const Args& args) {
        const MatrixXd& mcs = *args.inputs[0];
        const MatrixXd& cqi = *args.inputs[1];
        prepare(args, mcs.rows(), k_sub);
        for_each_dirty_row(args.region, mcs.rows(), [&](Index i) {
          for (Index k = 0; k < k_sub; ++k) {
            args.output(i, k) =
                cqi(i, k) == 0.0 ? 0.0 : link::mcs_to_spectral_efficiency(int(mcs(i, k)));
          }
        });
      },
      {nodes_.mcs, nodes_.cqi});

  const double sub_bw = bandwidth_hz_ / double(k_sub);
  const int streams = n_streams_;
  nodes_.shannon = graph_.add_node(
      "Shannon",
      [k_sub, sub_bw, streams](const Args& args) {
        const MatrixXd& g = *args.inputs[0];
        prepare(args, g.rows(), k_sub);
        for_each_dirty_row(args.region, g.rows(), [&](Index i) {
          for (Index k = 0; k < k_sub; ++k) {
            args.output(i, k) = link::shannon_capacity(g(i, k), sub_bw, streams);
          }
        });
      },
      {nodes_.sinr});

  // Power-weighted mean over the subbands where the serving cell transmits.
  nodes_.ue_spectral_efficiency = graph_.add_node(
      "S",
      [k_sub](const Args& args) {
        const MatrixXd& se = *args.inputs[0];
        const MatrixXd& a = *args.inputs[1];
        const MatrixXd& p = *args.inputs[2];
        prepare(args, se.rows(), 1);
        for_each_dirty_row(args.region, se.rows(), [&](Index i) {
          const Index c = Index(a(i, 0));
          double weighted = 0.0, total = 0.0;
          for (Index k = 0; k < k_sub; ++k) {
            if (p(c, k) > 0.0) {
              weighted += p(c, k) * se(i, k);
              total += p(c, k);
            }
          }
          args.output(i, 0) = total > 0.0 ? weighted / total : 0.0;
        });
      },
      {nodes_.spectral_efficiency, nodes_.attachment, nodes_.power});

  nodes_.throughput = graph_.add_node(
      "T",
      [this, m, k_sub](const Args& args) {
        const MatrixXd& s = *args.inputs[0];
        const MatrixXd& a = *args.inputs[1];
        const MatrixXd& p = *args.inputs[2];
        const double fairness = (*args.inputs[3])(0, 0);
        const Index n_rows = s.rows();
        const double sub_bw = bandwidth_hz_ / double(k_sub);
        auto cell_bw = [&](Index c) {
          Index active = 0;
          for (Index k = 0; k < k_sub; ++k) active += p(c, k) > 0.0 ? 1 : 0;
          return sub_bw * double(active);
        };
        const auto groups = scheduler::group_by_cell(a.col(0), m);
        auto& out = args.output;
        std::vector<bool> affected(std::size_t(m), false);
        if (args.region.is_all() || Index(throughput_attachment_.size()) != n_rows) {
          out.resize(n_rows, 1);
          std::fill(affected.begin(), affected.end(), true);
        } else {
          for (const Index i : args.region.row_set()) {
            affected[std::size_t(throughput_attachment_[std::size_t(i)])] = true;
            affected[std::size_t(a(i, 0))] = true;
          }
        }
        auto col = out.col(0);
        for (Index c = 0; c < m; ++c) {
          if (!affected[std::size_t(c)]) continue;
          scheduler::allocate_cell(std::span<const Index>(groups[std::size_t(c)]), s.col(0),
                                   cell_bw(c), fairness, col);
        }
        throughput_attachment_.resize(std::size_t(n_rows));
        for (Index i = 0; i < n_rows; ++i) throughput_attachment_[std::size_t(i)] = Index(a(i, 0));
      },
      {nodes_.ue_spectral_efficiency, nodes_.attachment, nodes_.power, nodes_.fairness});
}

void Simulator::after_mutation(NodeId root) {
  if (!smart_) graph_.invalidate(root, DirtyRegion::all());
}

void Simulator::move_ues(std::span<const Index> indices,
                         const Eigen::Ref<const MatrixXd>& positions) {
  geometry::validate_positions(positions, "ue_positions");
  graph_.set_root_data(nodes_.ues, indices, positions);
  after_mutation(nodes_.ues);
}

void Simulator::set_ue_positions(const PositionTable& positions) {
  geometry::validate_positions(positions, "ue_positions");
  if (positions.rows() == 0) throw Error(ErrorCode::ValidationError, "no UEs", "ues");
  if (nodes_.fades && positions.rows() != n_ues_) {
    throw Error(ErrorCode::ShapeMismatch, "UE count cannot change while fading is enabled");
  }
  n_ues_ = positions.rows();
  graph_.replace_root_data(nodes_.ues, MatrixXd(positions));
}

void Simulator::set_cell_positions(const PositionTable& positions) {
  geometry::validate_positions(positions, "cell_positions");
  if (positions.rows() != n_cells_) {
    throw Error(ErrorCode::ShapeMismatch, "cell count is fixed for a simulator instance");
  }
  graph_.replace_root_data(nodes_.cells, MatrixXd(positions));
}

void Simulator::set_power(const MatrixXd& power_w) {
  check_power(power_w, n_cells_);
  if (power_w.cols() != n_sub_) {
    throw Error(ErrorCode::ValidationError, "subband count is fixed for a simulator instance",
                "power_matrix");
  }
  graph_.replace_root_data(nodes_.power, power_w);
}

void Simulator::set_fairness(double p) {
  if (!(p >= 0)) throw Error(ErrorCode::ValidationError, "fairness p must be >= 0", "fairness_p");
  graph_.replace_root_data(nodes_.fairness, MatrixXd::Constant(1, 1, p));
}

void Simulator::set_noise_w(double noise_w) {
  if (!(noise_w >= 0)) throw Error(ErrorCode::ValidationError, "noise must be >= 0", "noise_w");
  noise_ = VectorXd::Constant(n_sub_, noise_w);
  graph_.replace_root_data(nodes_.noise, MatrixXd(noise_.transpose()));
}

void Simulator::resample_fades(std::uint64_t seed) {
  if (!nodes_.fades) throw Error(ErrorCode::InvalidArgument, "fading is disabled");
  graph_.replace_root_data(*nodes_.fades, radio::sample_rayleigh_fades(n_ues_, n_cells_, seed));
}

MatrixXd Simulator::sinr_db() {
  return sinr().unaryExpr([](double g) { return link::linear_to_db(g); });
}

VectorXd Simulator::cell_bandwidth_hz() {
  const MatrixXd& p = graph_.evaluate(nodes_.power);
  VectorXd bw(n_cells_);
  for (Index c = 0; c < n_cells_; ++c) {
    Index active = 0;
    for (Index k = 0; k < n_sub_; ++k) active += p(c, k) > 0.0 ? 1 : 0;
    bw(c) = bandwidth_hz_ / double(n_sub_) * double(active);
  }
  return bw;
}

}  // namespace lazycell
