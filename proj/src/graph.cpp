#include "algossip/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "algossip/errors.hpp"

namespace algossip {

Supergraph::Supergraph(int n, std::vector<std::pair<NodeId, NodeId>> edges,
                       std::vector<Point2> positions)
    : n_(n), positions_(std::move(positions)) {
  if (n < 1) throw DomainError("supergraph needs at least one node");
  if (!positions_.empty() && static_cast<int>(positions_.size()) != n)
    throw DomainError("positions must have one entry per node");
  for (auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw DomainError("edge endpoint out of range");
    if (i == j) throw DomainError("self-edge on node " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw DomainError("duplicate edge");
  edges_ = std::move(edges);

  neighbors_.assign(n_, {});
  out_arcs_.assign(n_, {});
  for (int e = 0; e < num_edges(); ++e) {
    auto [i, j] = edges_[e];
    neighbors_[i].push_back(j);
    out_arcs_[i].push_back(2 * e);
    neighbors_[j].push_back(i);
    out_arcs_[j].push_back(2 * e + 1);
  }
  // keep neighbor lists sorted by id, arcs permuted alongside
  for (int i = 0; i < n_; ++i) {
    std::vector<int> order(neighbors_[i].size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return neighbors_[i][a] < neighbors_[i][b]; });
    std::vector<NodeId> nb;
    std::vector<ArcId> arcs;
    for (int k : order) {
      nb.push_back(neighbors_[i][k]);
      arcs.push_back(out_arcs_[i][k]);
    }
    neighbors_[i] = std::move(nb);
    out_arcs_[i] = std::move(arcs);
  }
}

Arc Supergraph::arc(ArcId a) const {
  const auto& [i, j] = edges_[a / 2];
  return (a % 2 == 0) ? Arc{i, j} : Arc{j, i};
}

ArcId Supergraph::arc_id(NodeId from, NodeId to) const {
  const auto& nb = neighbors_.at(from);
  auto it = std::lower_bound(nb.begin(), nb.end(), to);
  if (it == nb.end() || *it != to)
    throw DomainError("no edge {" + std::to_string(from) + ", " + std::to_string(to) + "}");
  return out_arcs_[from][it - nb.begin()];
}

bool Supergraph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<char> seen(n_, 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId v : neighbors_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n_;
}

Supergraph build_geometric(int n, double radius, std::uint64_t seed, int max_retries) {
  if (n < 1) throw DomainError("build_geometric: n must be >= 1");
  if (!(radius > 0.0)) throw DomainError("build_geometric: radius must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<Point2> pos(n);
    for (auto& p : pos) {
      p.x = unit(rng);
      p.y = unit(rng);
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::hypot(pos[i].x - pos[j].x, pos[i].y - pos[j].y) < radius) edges.emplace_back(i, j);
    Supergraph g(n, std::move(edges), std::move(pos));
    if (g.is_connected()) return g;
  }
  throw ConnectivityFailure("no connected geometric graph with n=" + std::to_string(n) +
                            " radius=" + std::to_string(radius) + " after " +
                            std::to_string(max_retries) + " draws");
}

Supergraph make_ring(int n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  if (n == 2) edges.emplace_back(0, 1);
  if (n >= 3)
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Supergraph(n, std::move(edges));
}

Supergraph make_path(int n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Supergraph(n, std::move(edges));
}

Supergraph make_complete(int n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Supergraph(n, std::move(edges));
}

double failure_prob(double distance, double radius, double scale) {
  if (!(scale > 0.0 && scale < 1.0)) throw DomainError("failure_prob: scale must lie in (0, 1)");
  if (!(radius > 0.0)) throw DomainError("failure_prob: radius must be positive");
  if (!(distance >= 0.0 && distance < radius))
    throw DomainError("failure_prob: distance must lie in [0, radius)");
  return scale * distance * distance / (radius * radius);
}

FailureModel::FailureModel(FailureMode mode, std::vector<double> success)
    : mode_(mode), success_(std::move(success)) {}

FailureModel FailureModel::always_on(const Supergraph& g) {
  return FailureModel(FailureMode::AlwaysOn, std::vector<double>(g.num_arcs(), 1.0));
}

FailureModel FailureModel::uniform(const Supergraph& g, double success_prob) {
  return per_arc(std::vector<double>(g.num_arcs(), success_prob));
}

FailureModel FailureModel::geometric(const Supergraph& g, double radius, double scale) {
  const auto& pos = g.positions();
  if (pos.empty()) throw DomainError("geometric failure model needs node positions");
  std::vector<double> success(g.num_arcs());
  for (ArcId a = 0; a < g.num_arcs(); ++a) {
    Arc arc = g.arc(a);
    double d = std::hypot(pos[arc.from].x - pos[arc.to].x, pos[arc.from].y - pos[arc.to].y);
    success[a] = 1.0 - failure_prob(d, radius, scale);
  }
  return per_arc(std::move(success));
}

FailureModel FailureModel::per_arc(std::vector<double> success_probs) {
  bool all_on = true;
  for (double p : success_probs) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("arc success probability must lie in (0, 1]");
    all_on = all_on && p == 1.0;
  }
  return FailureModel(all_on ? FailureMode::AlwaysOn : FailureMode::Independent,
                      std::move(success_probs));
}

std::vector<char> sample_adjacency(const FailureModel& model, Rng& rng) {
  std::vector<char> up(model.num_arcs(), 1);
  if (model.mode() == FailureMode::AlwaysOn) return up;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (ArcId a = 0; a < model.num_arcs(); ++a) up[a] = unit(rng) < model.success(a) ? 1 : 0;
  return up;
}

void write_graph(std::ostream& os, const Supergraph& g, const FailureModel& model) {
  char buf[128];
  os << "# i j p_ij p_ji\n";
  os << "nodes " << g.num_nodes() << '\n';
  for (int e = 0; e < g.num_edges(); ++e) {
    auto [i, j] = g.edges()[e];
    std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", i, j, model.success(2 * e),
                  model.success(2 * e + 1));
    os << buf;
  }
}

std::pair<Supergraph, FailureModel> read_graph(std::istream& is) {
  std::string line;
  int n = -1;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::pair<double, double>> probs;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (n < 0) {
      std::string key;
      if (!(ls >> key >> n) || key != "nodes")
        throw ConfigError("expected 'nodes <n>' on line " + std::to_string(lineno), "graph");
      continue;
    }
    int i = 0, j = 0;
    double pij = 1.0, pji = 1.0;
    if (!(ls >> i >> j >> pij >> pji))
      throw ConfigError("malformed edge on line " + std::to_string(lineno), "graph");
    edges.emplace_back(i, j);
    probs.emplace_back(pij, pji);
  }
  if (n < 0) throw ConfigError("missing 'nodes' line", "graph");

  // Supergraph sorts edges; re-associate probabilities through arc ids.
  std::vector<std::pair<NodeId, NodeId>> raw = edges;
  Supergraph g(n, std::move(edges));
  std::vector<double> success(g.num_arcs(), 1.0);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    auto [i, j] = raw[k];
    success[g.arc_id(i, j)] = probs[k].first;
    success[g.arc_id(j, i)] = probs[k].second;
  }
  return {std::move(g), FailureModel::per_arc(std::move(success))};
}

}  // namespace algossip
