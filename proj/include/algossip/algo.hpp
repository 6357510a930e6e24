#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "algossip/events.hpp"
#include "algossip/graph.hpp"
#include "algossip/metrics.hpp"
#include "algossip/penalty.hpp"
#include "algossip/problem.hpp"
#include "algossip/subsolve.hpp"

namespace algossip {

/// Primal-dual state of the gossip variants with per-arc y variables.
///
/// Per arc a = (i, j), held by node i: y[a] = y_ij, mu[a] = mu_(i,j),
/// lambda[a] = lambda_(i,j) (node i's copy of the edge multiplier), and
/// y_copy[a] = y_ji^L, the last y_ji node i received. The dual update reads the
/// current x, y, y_copy, which are the end-of-slot snapshots.
struct ALGState {
  std::vector<Vec> x;
  std::vector<Vec> y;
  std::vector<Vec> mu;
  std::vector<Vec> lambda;
  std::vector<Vec> y_copy;
  std::vector<double> rho_lambda;
  std::vector<double> rho_mu;
  std::vector<std::optional<double>> eps_lambda;
  std::vector<std::optional<double>> eps_mu;
  int t = 0;
  long k = 0;
};

/// x_i = Proj_{X_i}(0), y_ij = x_i, copies consistent, duals zero.
ALGState init_alg_state(const Problem& problem, const Supergraph& graph, double rho);
void set_penalty(ALGState& state, double rho);

struct StepContext {
  const Problem& problem;
  const Supergraph& graph;
  const InnerSolverConfig& solver;
};

/// Applies one fast-time-scale event (XUpdate, YTransfer, MGBroadcast or
/// Void) and returns the largest block change.
double inner_step_alg(ALGState& state, const StepContext& ctx, const Event& ev, Counters& counters);

/// Multiplier update at the end of a slot:
///   lambda_(i,j) += rho_lambda * sign(j - i) * (y_ij - y_ji^L)
///   mu_(i,j)     += rho_mu * (x_i - y_ij)
/// With an adaptive schedule the per-arc penalties are then revised for the
/// next slot from the same violations.
void dual_update_alg(ALGState& state, const Supergraph& graph,
                     const PenaltySchedule* adaptive = nullptr);

double lagrangian_alg(const ALGState& state, const Supergraph& graph, const Problem& problem);
/// max over edges of |lambda_(i,j) - lambda_(j,i)|.
double max_dual_gap(const ALGState& state, const Supergraph& graph);

/// Broadcast-gossip state: one aggregated multiplier per node. Neighbors'
/// copies of x_j are always current because broadcasts are reliable.
struct ALBGState {
  std::vector<Vec> x;
  std::vector<Vec> lambda_bar;
  double rho = 1.0;
  std::optional<double> eps_prev;
  int t = 0;
  long k = 0;
};

ALBGState init_albg_state(const Problem& problem, double rho);
Vec neighbor_sum(const std::vector<Vec>& x, const Supergraph& graph, NodeId i);

/// x_i <- block minimizer, broadcast to all neighbors (one transmission).
double step_bg(ALBGState& state, const StepContext& ctx, NodeId i, Counters& counters);
/// lambda_bar_i += rho (d_i x_i - sum_{j in N(i)} x_j), all nodes at once.
void dual_update_bg(ALBGState& state, const Supergraph& graph,
                    const PenaltySchedule* adaptive = nullptr);
double lagrangian_bg(const ALBGState& state, const Supergraph& graph, const Problem& problem);

/// Rejects variant / failure-model combinations the algorithms do not cover.
void check_compatible(Variant variant, const FailureModel& failures);

struct AlgoConfig {
  Variant variant = Variant::ALG;
  PenaltySchedule schedule = PenaltySchedule::power(1.3, 1.0);
  int outer = 50;
  long inner_events = 0;        // events per slot; 0 picks 10 x the clock count
  double inner_stop_tol = 0.0;  // > 0: end a slot once a quiet window moves nothing more
  InnerSolverConfig solver;
  ClockModel clocks;            // rates only; the variant is taken from `variant`
  long checkpoint_stride = 100; // inner events between rows; 0: slot boundaries only
  std::optional<double> err_stop;
};

long default_inner_events(Variant variant, const Supergraph& graph);

/// One seeded run of AL-G, AL-MG or AL-BG (the outer method of multipliers
/// around the randomized Gauss-Seidel inner loop).
class AlSimulation {
 public:
  using OuterHook = std::function<void(const AlSimulation&)>;

  AlSimulation(const Problem& problem, const Supergraph& graph, const FailureModel& failures,
               AlgoConfig config, std::uint64_t seed, double f_star);

  /// Runs `outer` slots; rows at inner checkpoints and after every dual
  /// update. The initial state is not logged (see snapshot()).
  MetricsLog run(const OuterHook& after_outer = {});
  /// Inner events of one slot; returns the number applied.
  long run_inner(MetricsLog* log = nullptr);
  void outer_update();
  /// Applies a single sampled event; returns the largest block change.
  double step();

  MetricsRow snapshot() const;
  std::vector<Vec> estimates() const;
  double lagrangian() const;
  double dual_gap() const;

  Variant variant() const { return config_.variant; }
  const AlgoConfig& config() const { return config_; }
  const ALGState& alg_state() const { return alg_; }
  const ALBGState& bg_state() const { return bg_; }
  const Counters& counters() const { return counters_; }
  double current_penalty() const { return rho_; }

 private:
  const Problem& problem_;
  const Supergraph& graph_;
  const FailureModel& failures_;
  AlgoConfig config_;
  EventDistribution dist_;
  Rng rng_;
  double f_star_;
  double rho_;
  long inner_events_;
  ALGState alg_;
  ALBGState bg_;
  Counters counters_;
};

}  // namespace algossip
