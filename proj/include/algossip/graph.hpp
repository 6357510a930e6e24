#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "algossip/types.hpp"

namespace algossip {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Directed link i -> j of the supergraph.
struct Arc {
  NodeId from;
  NodeId to;
};

/// Static, connected, simple communication topology.
///
/// Edges are stored with `first < second` in lexicographic order. Arc ids are
/// derived from edge ids: edge e = {i, j} (i < j) owns arc 2e = (i, j) and arc
/// 2e + 1 = (j, i), so the reverse of arc a is a ^ 1.
class Supergraph {
 public:
  Supergraph() = default;

  /// Builds a graph from an undirected edge list. Throws DomainError on
  /// self-edges, duplicate edges, or out-of-range ids. Connectivity is not
  /// required here; see is_connected().
  Supergraph(int n, std::vector<std::pair<NodeId, NodeId>> edges,
             std::vector<Point2> positions = {});

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_arcs() const { return 2 * num_edges(); }

  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
  const std::vector<NodeId>& neighbors(NodeId i) const { return neighbors_[i]; }
  /// Arcs (i, j) leaving node i, parallel to neighbors(i).
  const std::vector<ArcId>& out_arcs(NodeId i) const { return out_arcs_[i]; }
  int degree(NodeId i) const { return static_cast<int>(neighbors_[i].size()); }
  const std::vector<Point2>& positions() const { return positions_; }

  Arc arc(ArcId a) const;
  static ArcId reverse(ArcId a) { return a ^ 1; }
  /// Id of arc (i, j); throws DomainError if {i, j} is not an edge.
  ArcId arc_id(NodeId from, NodeId to) const;

  bool is_connected() const;

 private:
  int n_ = 0;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<std::vector<ArcId>> out_arcs_;
  std::vector<Point2> positions_;
};

/// Random geometric graph on the unit square, conditioned on connectivity by
/// redrawing all positions. Throws ConnectivityFailure after `max_retries`.
Supergraph build_geometric(int n, double radius, std::uint64_t seed, int max_retries = 1000);

Supergraph make_ring(int n);
Supergraph make_path(int n);
Supergraph make_complete(int n);

/// k * delta^2 / r^2, the geometric link failure probability.
double failure_prob(double distance, double radius, double scale);

enum class FailureMode { AlwaysOn, Independent };

/// Per-arc success (availability) probabilities.
class FailureModel {
 public:
  FailureModel() = default;
  static FailureModel always_on(const Supergraph& g);
  static FailureModel uniform(const Supergraph& g, double success_prob);
  /// Success probability 1 - k delta^2 / r^2 from node positions.
  static FailureModel geometric(const Supergraph& g, double radius, double scale);
  static FailureModel per_arc(std::vector<double> success_probs);

  FailureMode mode() const { return mode_; }
  int num_arcs() const { return static_cast<int>(success_.size()); }
  double success(ArcId a) const { return success_[a]; }
  const std::vector<double>& success_probs() const { return success_; }

 private:
  FailureModel(FailureMode mode, std::vector<double> success);

  FailureMode mode_ = FailureMode::AlwaysOn;
  std::vector<double> success_;
};

/// One i.i.d. draw of arc availability; entry a is 1 if arc a is up.
std::vector<char> sample_adjacency(const FailureModel& model, Rng& rng);

/// Text format: a `nodes <n>` line followed by one `i j p_ij p_ji` line per
/// edge. Lines starting with '#' are comments.
void write_graph(std::ostream& os, const Supergraph& g, const FailureModel& model);
std::pair<Supergraph, FailureModel> read_graph(std::istream& is);

}  // namespace algossip
