// SPDX-License-Identifier: Apache-2.0
#pragma once

// Compute-on-demand dependency graph.
//
// Each node owns a dense payload and an optional compute kernel. Mutating a
// root floods an out-of-date mark through the watcher lists (no kernel runs);
// evaluating a node recursively brings its watchees up to date first and then
// runs its own kernel once. Dirty state is row-granular along the UE axis so
// a kernel may recompute only the rows that a UE move touched.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "lazycell/error.hpp"
#include "lazycell/types.hpp"

namespace lazycell::engine {

struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Which part of a payload is stale: nothing, a sorted set of rows, or everything.
class DirtyRegion {
 public:
  enum class Kind { Clean, Rows, All };

  static DirtyRegion clean() { return DirtyRegion(Kind::Clean, {}); }
  static DirtyRegion all() { return DirtyRegion(Kind::All, {}); }
  static DirtyRegion rows(std::vector<Index> rows) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    if (rows.empty()) return clean();
    return DirtyRegion(Kind::Rows, std::move(rows));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_clean() const noexcept { return kind_ == Kind::Clean; }
  bool is_all() const noexcept { return kind_ == Kind::All; }
  bool is_rows() const noexcept { return kind_ == Kind::Rows; }
  const std::vector<Index>& row_set() const noexcept { return rows_; }

  bool contains(Index row) const {
    if (is_all()) return true;
    return std::binary_search(rows_.begin(), rows_.end(), row);
  }

  /// Widens this region by `other` and returns the part of `other` that was
  /// not already covered. A clean result means nothing changed.
  DirtyRegion merge(const DirtyRegion& other) {
    if (other.is_clean() || is_all()) return clean();
    if (other.is_all()) {
      *this = all();
      return all();
    }
    if (is_clean()) {
      *this = other;
      return other;
    }
    std::vector<Index> added;
    std::set_difference(other.rows_.begin(), other.rows_.end(), rows_.begin(), rows_.end(),
                        std::back_inserter(added));
    if (added.empty()) return clean();
    std::vector<Index> merged;
    merged.reserve(rows_.size() + added.size());
    std::merge(rows_.begin(), rows_.end(), added.begin(), added.end(), std::back_inserter(merged));
    rows_ = std::move(merged);
    return DirtyRegion(Kind::Rows, std::move(added));
  }

  friend bool operator==(const DirtyRegion&, const DirtyRegion&) = default;

 private:
  DirtyRegion(Kind kind, std::vector<Index> rows) : kind_(kind), rows_(std::move(rows)) {}

  Kind kind_ = Kind::Clean;
  std::vector<Index> rows_;
};

/// Row sets only propagate between nodes whose first axis is the UE axis.
enum class RowAxis { Ue, Other };

template <typename Scalar>
class DependencyGraph {
 public:
  using Payload = MatrixX<Scalar>;

  /// What a kernel sees: read-only watchee payloads in declaration order, its
  /// own payload, and the region it must bring up to date.
  struct KernelArgs {
    std::span<const Payload* const> inputs;
    Payload& output;
    const DirtyRegion& region;
  };
  using Kernel = std::function<void(const KernelArgs&)>;

  struct NodeCounters {
    std::uint64_t kernel_runs = 0;
    std::uint64_t rows_computed = 0;
    std::uint64_t flood_marks = 0;
  };

  NodeId add_node(std::string name, Kernel kernel, const std::vector<NodeId>& watchees,
                  RowAxis axis = RowAxis::Ue, Payload initial = {}) {
    const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
    for (const auto& w : watchees) {
      if (w == id) {
        throw Error(ErrorCode::CycleDetected,
                    fmt::format("node '{}' cannot watch itself", name));
      }
      check_exists(w);
    }
    Node node;
    node.name = std::move(name);
    node.kernel = std::move(kernel);
    node.axis = axis;
    node.data = std::move(initial);
    node.region = DirtyRegion::all();
    nodes_.push_back(std::move(node));
    for (const auto& w : watchees) link(id, w);
    return id;
  }

  NodeId add_root(std::string name, Payload data, RowAxis axis = RowAxis::Ue) {
    return add_node(std::move(name), nullptr, {}, axis, std::move(data));
  }

  /// Adds the edge `watcher` watches `watchee`, refusing edges that close a cycle.
  void add_edge(NodeId watcher, NodeId watchee) {
    check_exists(watcher);
    check_exists(watchee);
    if (watcher == watchee || reaches(watcher, watchee)) {
      throw Error(ErrorCode::CycleDetected,
                  fmt::format("edge {} -> {} would create a cycle", node(watcher).name,
                              node(watchee).name));
    }
    link(watcher, watchee);
    flood(watcher, DirtyRegion::all(), node(watcher).axis);
  }

  /// Marks `id` and every transitive watcher out of date. Runs no kernels.
  void invalidate(NodeId id, const DirtyRegion& region = DirtyRegion::all()) {
    check_exists(id);
    flood(id, region, node(id).axis);
  }

  /// Brings `id` and its transitive watchees up to date and returns its payload.
  /// The reference stays valid until the next mutation of the graph.
  const Payload& evaluate(NodeId id) {
    check_exists(id);
    update(id);
    return node(id).data;
  }

  /// Overwrites rows of a root payload and invalidates those rows downstream.
  void set_root_data(NodeId id, std::span<const Index> rows,
                     const Eigen::Ref<const Payload>& values) {
    check_exists(id);
    Node& n = node(id);
    if (!n.watchees.empty()) {
      throw Error(ErrorCode::NotARoot, fmt::format("node '{}' is not a root", n.name));
    }
    if (values.rows() != static_cast<Index>(rows.size()) || values.cols() != n.data.cols()) {
      throw Error(ErrorCode::ShapeMismatch,
                  fmt::format("node '{}': expected {}x{} values, got {}x{}", n.name, rows.size(),
                              n.data.cols(), values.rows(), values.cols()));
    }
    for (const Index r : rows) {
      if (r < 0 || r >= n.data.rows()) {
        throw Error(ErrorCode::IndexOutOfBounds,
                    fmt::format("node '{}': row {} outside [0, {})", n.name, r, n.data.rows()));
      }
    }
    for (std::size_t k = 0; k < rows.size(); ++k) n.data.row(rows[k]) = values.row(Index(k));
    invalidate(id, DirtyRegion::rows({rows.begin(), rows.end()}));
  }

  /// Replaces a root payload wholesale (shape may change) and invalidates everything downstream.
  void replace_root_data(NodeId id, Payload values) {
    check_exists(id);
    Node& n = node(id);
    if (!n.watchees.empty()) {
      throw Error(ErrorCode::NotARoot, fmt::format("node '{}' is not a root", n.name));
    }
    n.data = std::move(values);
    invalidate(id, DirtyRegion::all());
  }

  /// Current payload without evaluating; may be stale.
  const Payload& peek(NodeId id) const { return node(id).data; }

  bool up_to_date(NodeId id) const { return node(id).region.is_clean(); }
  const DirtyRegion& dirty_region(NodeId id) const { return node(id).region; }
  const std::vector<NodeId>& watchers(NodeId id) const { return node(id).watchers; }
  const std::vector<NodeId>& watchees(NodeId id) const { return node(id).watchees; }
  const std::string& name(NodeId id) const { return node(id).name; }
  const NodeCounters& counters(NodeId id) const { return node(id).counters; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::uint64_t total_kernel_runs() const {
    std::uint64_t total = 0;
    for (const auto& n : nodes_) total += n.counters.kernel_runs;
    return total;
  }
  std::uint64_t total_rows_computed() const {
    std::uint64_t total = 0;
    for (const auto& n : nodes_) total += n.counters.rows_computed;
    return total;
  }
  void reset_counters() {
    for (auto& n : nodes_) n.counters = {};
  }

  /// Graphviz rendering; stale nodes are drawn filled.
  std::string to_dot() const {
    std::ostringstream out;
    out << "digraph dependencies {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      out << "  n" << i << " [label=\"" << n.name << "\"";
      if (!n.region.is_clean()) out << ", style=filled, fillcolor=lightcoral";
      out << "];\n";
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      for (const auto& w : nodes_[i].watchers) out << "  n" << i << " -> n" << w.value << ";\n";
    }
    out << "}\n";
    return out.str();
  }

 private:
  struct Node {
    std::string name;
    Kernel kernel;
    RowAxis axis = RowAxis::Ue;
    Payload data;
    DirtyRegion region = DirtyRegion::all();
    std::vector<NodeId> watchees;
    std::vector<NodeId> watchers;
    NodeCounters counters;
  };

  Node& node(NodeId id) { return nodes_[id.value]; }
  const Node& node(NodeId id) const {
    if (id.value >= nodes_.size()) {
      throw Error(ErrorCode::UnknownNode, fmt::format("no node with id {}", id.value));
    }
    return nodes_[id.value];
  }
  void check_exists(NodeId id) const { (void)node(id); }

  void link(NodeId watcher, NodeId watchee) {
    node(watcher).watchees.push_back(watchee);
    node(watchee).watchers.push_back(watcher);
  }

  // True if `to` is reachable from `from` following watcher edges.
  bool reaches(NodeId from, NodeId to) const {
    std::vector<NodeId> stack{from};
    std::vector<bool> seen(nodes_.size(), false);
    while (!stack.empty()) {
      const NodeId cur = stack.back();
      stack.pop_back();
      if (cur == to) return true;
      if (seen[cur.value]) continue;
      seen[cur.value] = true;
      for (const auto& w : node(cur).watchers) stack.push_back(w);
    }
    return false;
  }

  void flood(NodeId id, const DirtyRegion& incoming, RowAxis from_axis) {
    Node& n = node(id);
    const bool keep_rows = from_axis == RowAxis::Ue && n.axis == RowAxis::Ue;
    const DirtyRegion projected =
        incoming.is_rows() && !keep_rows ? DirtyRegion::all() : incoming;
    const DirtyRegion added = n.region.merge(projected);
    if (added.is_clean()) return;
    ++n.counters.flood_marks;
    const RowAxis axis = n.axis;
    // Copy: recursion never adds nodes, but keep the iteration independent of `n`.
    const std::vector<NodeId> watchers = n.watchers;
    for (const auto& w : watchers) flood(w, added, axis);
  }

  void update(NodeId id) {
    if (node(id).region.is_clean()) return;
    const std::vector<NodeId> watchees = node(id).watchees;
    for (const auto& w : watchees) update(w);

    Node& n = node(id);
    if (n.kernel) {
      std::vector<const Payload*> inputs;
      inputs.reserve(n.watchees.size());
      for (const auto& w : n.watchees) inputs.push_back(&node(w).data);
      try {
        n.kernel(KernelArgs{inputs, n.data, n.region});
      } catch (const Error& e) {
        if (e.code() == ErrorCode::KernelFailure) throw;
        throw Error(ErrorCode::KernelFailure,
                    fmt::format("node '{}' (id {}): {}", n.name, id.value, e.what()));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::KernelFailure,
                    fmt::format("node '{}' (id {}): {}", n.name, id.value, e.what()));
      }
      ++n.counters.kernel_runs;
      n.counters.rows_computed +=
          n.region.is_all() ? std::uint64_t(n.data.rows()) : n.region.row_set().size();
    }
    n.region = DirtyRegion::clean();
  }

  std::vector<Node> nodes_;
};

}  // namespace lazycell::engine
