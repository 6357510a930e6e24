#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "algossip/graph.hpp"
#include "algossip/metrics.hpp"
#include "algossip/problem.hpp"

namespace algossip {

/// Sparse Metropolis weights of one realized undirected graph.
struct MetropolisWeights {
  std::vector<std::vector<std::pair<NodeId, double>>> neighbors;  // (j, w_ij), j != i
  std::vector<double> self;                                       // w_ii

  Eigen::MatrixXd dense() const;
};

/// w_ij = 1 / (1 + max(d_i, d_j)) on realized edges, w_ii = 1 - sum_j w_ij.
/// `edge_up[e]` flags edge e of the supergraph; degrees are realized degrees.
MetropolisWeights metropolis_weights(const Supergraph& graph, const std::vector<char>& edge_up);

/// Symmetric realization: edge {i, j} is up with probability
/// min(p_(i,j), p_(j,i)).
std::vector<char> sample_symmetric_edges(const Supergraph& graph, const FailureModel& failures,
                                         Rng& rng);

struct PSState {
  std::vector<Vec> x;
  double alpha = 0.1;
  long k = 0;
};

PSState init_ps_state(const Problem& problem, double alpha);

/// One synchronous round: x_i <- P_i(v_i - alpha g_i(v_i)), v_i = sum_j w_ij x_j.
void ps_step(PSState& state, const Supergraph& graph, const std::vector<char>& edge_up,
             const Problem& problem, Counters& counters);

struct PSConfig {
  double alpha = 0.1;
  long rounds = 1000;
  long checkpoint_stride = 1;  // rounds between rows
  std::optional<double> err_stop;
};

class PSSimulation {
 public:
  PSSimulation(const Problem& problem, const Supergraph& graph, const FailureModel& failures,
               PSConfig config, std::uint64_t seed, double f_star);

  /// Runs the configured number of rounds; the initial state is not logged.
  MetricsLog run();
  void step();
  MetricsRow snapshot() const;

  const PSState& state() const { return state_; }
  const Counters& counters() const { return counters_; }
  /// Smallest err_f seen at any logged row.
  double best_err_f() const { return best_err_; }  // smallest |err_f| so far

 private:
  const Problem& problem_;
  const Supergraph& graph_;
  const FailureModel& failures_;
  PSConfig config_;
  Rng rng_;
  double f_star_;
  PSState state_;
  Counters counters_;
  double best_err_;
};

/// First logged transmission count with err_f <= threshold.
std::optional<long> transmissions_to(const MetricsLog& log, double threshold);

struct AlphaChoice {
  double alpha = 0.0;
  std::optional<long> transmissions;  // to the threshold, if reached
  double final_err = 0.0;
};

/// Runs PS for each alpha of the grid and keeps the one reaching `threshold`
/// with the fewest transmissions, or the lowest final err_f if none does.
AlphaChoice tune_alpha(const Problem& problem, const Supergraph& graph,
                       const FailureModel& failures, const std::vector<double>& grid, long rounds,
                       std::uint64_t seed, double f_star, double threshold);

}  // namespace algossip
