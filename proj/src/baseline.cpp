#include "algossip/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "algossip/errors.hpp"

namespace algossip {

Eigen::MatrixXd MetropolisWeights::dense() const {
  const int n = static_cast<int>(self.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = self[i];
    for (const auto& [j, wij] : neighbors[i]) w(i, j) = wij;
  }
  return w;
}

MetropolisWeights metropolis_weights(const Supergraph& graph, const std::vector<char>& edge_up) {
  if (static_cast<int>(edge_up.size()) != graph.num_edges())
    throw DomainError("edge mask does not match the graph");
  const int n = graph.num_nodes();
  std::vector<int> deg(n, 0);
  for (int e = 0; e < graph.num_edges(); ++e) {
    if (!edge_up[e]) continue;
    ++deg[graph.edges()[e].first];
    ++deg[graph.edges()[e].second];
  }
  MetropolisWeights w;
  w.neighbors.resize(n);
  w.self.assign(n, 1.0);
  for (int e = 0; e < graph.num_edges(); ++e) {
    if (!edge_up[e]) continue;
    auto [i, j] = graph.edges()[e];
    double wij = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    w.neighbors[i].emplace_back(j, wij);
    w.neighbors[j].emplace_back(i, wij);
  }
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& nb : w.neighbors[i]) sum += nb.second;
    w.self[i] = 1.0 - sum;
  }
  return w;
}

std::vector<char> sample_symmetric_edges(const Supergraph& graph, const FailureModel& failures,
                                         Rng& rng) {
  std::vector<char> up(graph.num_edges(), 1);
  if (failures.mode() == FailureMode::AlwaysOn) return up;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int e = 0; e < graph.num_edges(); ++e) {
    double p = std::min(failures.success(2 * e), failures.success(2 * e + 1));
    up[e] = unif(rng) < p ? 1 : 0;
  }
  return up;
}

PSState init_ps_state(const Problem& problem, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("PS step size must be positive");
  PSState s;
  s.alpha = alpha;
  for (NodeId i = 0; i < problem.num_nodes(); ++i)
    s.x.push_back(problem.project(i, Vec::Zero(problem.dim())));
  return s;
}

void ps_step(PSState& s, const Supergraph& graph, const std::vector<char>& edge_up,
             const Problem& problem, Counters& counters) {
  MetropolisWeights w = metropolis_weights(graph, edge_up);
  const double m = problem.dim();
  std::vector<Vec> next;
  next.reserve(s.x.size());
  long realized = 0;
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    Vec v = w.self[i] * s.x[i];
    for (const auto& [j, wij] : w.neighbors[i]) v += wij * s.x[j];
    realized += static_cast<long>(w.neighbors[i].size());
    next.push_back(problem.project(i, v - s.alpha * problem.local_subgradient(i, v)));
    counters.flops += 2.0 * m * (w.neighbors[i].size() + 1) + problem.subgradient_flops(i) +
                      problem.projection_flops(i) + 2.0 * m;
  }
  s.x = std::move(next);
  s.k += 1;
  counters.transmissions += realized;  // 2 |E_realized|
  counters.events += 1;
}

PSSimulation::PSSimulation(const Problem& problem, const Supergraph& graph,
                           const FailureModel& failures, PSConfig config, std::uint64_t seed,
                           double f_star)
    : problem_(problem),
      graph_(graph),
      failures_(failures),
      config_(config),
      rng_(seed),
      f_star_(f_star),
      state_(init_ps_state(problem, config.alpha)),
      best_err_(std::numeric_limits<double>::infinity()) {
  if (problem.num_nodes() != graph.num_nodes())
    throw ConfigError("problem and graph disagree on the number of nodes", "nodes");
  if (failures.num_arcs() != graph.num_arcs())
    throw ConfigError("failure model does not match the graph", "failure_model");
  if (config_.rounds < 0) throw ConfigError("PS round count must be >= 0", "outer");
  if (config_.checkpoint_stride < 1)
    throw ConfigError("PS checkpoint stride must be >= 1", "checkpoint_stride");
}

void PSSimulation::step() {
  std::vector<char> up = sample_symmetric_edges(graph_, failures_, rng_);
  ps_step(state_, graph_, up, problem_, counters_);
}

MetricsRow PSSimulation::snapshot() const {
  for (const auto& v : state_.x)
    if (!v.allFinite()) throw NumericFailure("non-finite PS iterate");
  MetricsRow r;
  r.t = static_cast<int>(state_.k);
  r.k = state_.k;
  r.transmissions = counters_.transmissions;
  r.flops = counters_.flops;
  r.err_f = err_f(problem_, state_.x, f_star_);
  for (NodeId i = 0; i < problem_.num_nodes(); ++i) {
    r.lagrangian += problem_.local_value(i, state_.x[i]);
    if (!problem_.feasible(i, state_.x[i])) r.feasible = false;
  }
  r.max_dual_gap = 0.0;
  if (!std::isfinite(r.err_f)) throw NumericFailure("non-finite PS objective");
  return r;
}

MetricsLog PSSimulation::run() {
  MetricsLog log;
  for (long r = 1; r <= config_.rounds; ++r) {
    step();
    if (r % config_.checkpoint_stride != 0 && r != config_.rounds) continue;
    log.push_back(snapshot());
    best_err_ = std::min(best_err_, std::abs(log.back().err_f));
    if (config_.err_stop && std::abs(log.back().err_f) <= *config_.err_stop) break;
  }
  return log;
}

// Thresholds compare |err_f|: estimates outside the common feasible set can
// undershoot f_star.
std::optional<long> transmissions_to(const MetricsLog& log, double threshold) {
  for (const auto& row : log)
    if (std::abs(row.err_f) <= threshold) return row.transmissions;
  return std::nullopt;
}

AlphaChoice tune_alpha(const Problem& problem, const Supergraph& graph,
                       const FailureModel& failures, const std::vector<double>& grid, long rounds,
                       std::uint64_t seed, double f_star, double threshold) {
  if (grid.empty()) throw ConfigError("alpha grid is empty", "alpha");
  std::optional<AlphaChoice> best;
  for (double alpha : grid) {
    PSConfig cfg;
    cfg.alpha = alpha;
    cfg.rounds = rounds;
    cfg.err_stop = threshold;
    PSSimulation sim(problem, graph, failures, cfg, seed, f_star);
    MetricsLog log = sim.run();
    AlphaChoice c{alpha, transmissions_to(log, threshold),
                  log.empty() ? std::numeric_limits<double>::infinity() : std::abs(log.back().err_f)};
    bool better = false;
    if (!best) {
      better = true;
    } else if (c.transmissions && best->transmissions) {
      better = *c.transmissions < *best->transmissions;
    } else if (c.transmissions != best->transmissions) {
      better = c.transmissions.has_value();
    } else {
      better = c.final_err < best->final_err;
    }
    if (better) best = c;
  }
  return *best;
}

}  // namespace algossip
