#include "algossip/algo.hpp"

#include <algorithm>
#include <cmath>

#include "algossip/errors.hpp"

namespace algossip {

namespace {

double arc_sign(const Supergraph& g, ArcId a) {
  Arc arc = g.arc(a);
  return edge_sign(arc.from, arc.to);
}

bool all_finite(const std::vector<Vec>& vs) {
  for (const auto& v : vs)
    if (!v.allFinite()) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- AL-G / AL-MG

ALGState init_alg_state(const Problem& problem, const Supergraph& graph, double rho) {
  if (problem.num_nodes() != graph.num_nodes())
    throw ConfigError("problem and graph disagree on the number of nodes", "nodes");
  const int n = graph.num_nodes();
  const int arcs = graph.num_arcs();
  const int m = problem.dim();
  ALGState s;
  s.x.reserve(n);
  for (NodeId i = 0; i < n; ++i) s.x.push_back(problem.project(i, Vec::Zero(m)));
  s.y.resize(arcs);
  s.y_copy.resize(arcs);
  for (ArcId a = 0; a < arcs; ++a) s.y[a] = s.x[graph.arc(a).from];
  for (ArcId a = 0; a < arcs; ++a) s.y_copy[a] = s.y[Supergraph::reverse(a)];
  s.mu.assign(arcs, Vec::Zero(m));
  s.lambda.assign(arcs, Vec::Zero(m));
  s.eps_lambda.assign(arcs, std::nullopt);
  s.eps_mu.assign(arcs, std::nullopt);
  set_penalty(s, rho);
  return s;
}

void set_penalty(ALGState& state, double rho) {
  if (!(rho > 0.0)) throw DomainError("penalty must be positive");
  state.rho_lambda.assign(state.y.size(), rho);
  state.rho_mu.assign(state.y.size(), rho);
}

namespace {

double transfer(ALGState& s, const StepContext& ctx, ArcId a, Counters& counters) {
  const ArcId r = Supergraph::reverse(a);
  const Arc back = ctx.graph.arc(r);  // (j, i): node j updates y_ji
  s.y_copy[r] = s.y[a];
  Vec next = s.rho_lambda[r] == s.rho_mu[r]
                 ? y_closed_form(s.x[back.from], s.y[a], s.mu[r], s.lambda[r], s.rho_mu[r],
                                 edge_sign(back.from, back.to))
                 : y_closed_form_peredge(s.x[back.from], s.y[a], s.mu[r], s.lambda[r],
                                         s.rho_lambda[r], s.rho_mu[r],
                                         edge_sign(back.from, back.to));
  double moved = (next - s.y[r]).lpNorm<Eigen::Infinity>();
  s.y[r] = std::move(next);
  counters.flops += 8.0 * ctx.problem.dim();
  return moved;
}

}  // namespace

double inner_step_alg(ALGState& s, const StepContext& ctx, const Event& ev, Counters& counters) {
  const double m = ctx.problem.dim();
  double moved = 0.0;
  switch (ev.kind) {
    case EventKind::XUpdate: {
      const NodeId i = ev.node;
      XSubproblem sub{&ctx.problem, i, Vec::Zero(ctx.problem.dim()), 0.0};
      for (ArcId a : ctx.graph.out_arcs(i)) {
        sub.linear += s.mu[a] - s.rho_mu[a] * s.y[a];
        sub.quad += s.rho_mu[a];
      }
      counters.flops += 3.0 * m * ctx.graph.degree(i);
      BlockSolve res = solve_x_block(sub, ctx.solver, s.x[i]);
      counters.flops += res.flops;
      moved = (res.x - s.x[i]).lpNorm<Eigen::Infinity>();
      s.x[i] = std::move(res.x);
      break;
    }
    case EventKind::YTransfer:
      moved = transfer(s, ctx, ev.arc, counters);
      counters.transmissions += 1;
      break;
    case EventKind::MGBroadcast:
      for (ArcId a : ev.receivers) moved = std::max(moved, transfer(s, ctx, a, counters));
      counters.transmissions += ctx.graph.degree(ev.node);
      break;
    case EventKind::Void:
      counters.transmissions += ev.node >= 0 ? ctx.graph.degree(ev.node) : 1;
      break;
    case EventKind::BGUpdate:
      throw KindError("BGUpdate event in an AL-G / AL-MG run");
  }
  counters.events += 1;
  s.k += 1;
  return moved;
}

void dual_update_alg(ALGState& s, const Supergraph& graph, const PenaltySchedule* adaptive) {
  for (ArcId a = 0; a < graph.num_arcs(); ++a) {
    const Arc arc = graph.arc(a);
    Vec gap = s.y[a] - s.y_copy[a];
    Vec viol = s.x[arc.from] - s.y[a];
    s.lambda[a] += (s.rho_lambda[a] * edge_sign(arc.from, arc.to)) * gap;
    s.mu[a] += s.rho_mu[a] * viol;
    if (adaptive) {
      double el = gap.norm();
      double em = viol.norm();
      s.rho_lambda[a] =
          update_adaptive(s.rho_lambda[a], s.eps_lambda[a], el, adaptive->kappa, adaptive->sigma);
      s.rho_mu[a] = update_adaptive(s.rho_mu[a], s.eps_mu[a], em, adaptive->kappa, adaptive->sigma);
      s.eps_lambda[a] = el;
      s.eps_mu[a] = em;
    }
  }
  s.t += 1;
}

double lagrangian_alg(const ALGState& s, const Supergraph& graph, const Problem& problem) {
  double total = 0.0;
  for (NodeId i = 0; i < graph.num_nodes(); ++i) total += problem.local_value(i, s.x[i]);
  for (ArcId a = 0; a < graph.num_arcs(); ++a) {
    const Arc arc = graph.arc(a);
    Vec d = s.x[arc.from] - s.y[a];
    total += s.mu[a].dot(d) + 0.5 * s.rho_mu[a] * d.squaredNorm();
    total += arc_sign(graph, a) * s.lambda[a].dot(s.y[a]);
  }
  for (int e = 0; e < graph.num_edges(); ++e) {
    const ArcId a = 2 * e;
    const ArcId r = a + 1;
    double rho = 0.5 * (s.rho_lambda[a] + s.rho_lambda[r]);
    total += 0.5 * rho * (s.y[a] - s.y[r]).squaredNorm();
  }
  return total;
}

double max_dual_gap(const ALGState& s, const Supergraph& graph) {
  double gap = 0.0;
  for (int e = 0; e < graph.num_edges(); ++e)
    gap = std::max(gap, (s.lambda[2 * e] - s.lambda[2 * e + 1]).norm());
  return gap;
}

// ---------------------------------------------------------------- AL-BG

ALBGState init_albg_state(const Problem& problem, double rho) {
  if (!(rho > 0.0)) throw DomainError("penalty must be positive");
  const int m = problem.dim();
  ALBGState s;
  for (NodeId i = 0; i < problem.num_nodes(); ++i) s.x.push_back(problem.project(i, Vec::Zero(m)));
  s.lambda_bar.assign(problem.num_nodes(), Vec::Zero(m));
  s.rho = rho;
  return s;
}

Vec neighbor_sum(const std::vector<Vec>& x, const Supergraph& graph, NodeId i) {
  Vec sum = Vec::Zero(x[i].size());
  for (NodeId j : graph.neighbors(i)) sum += x[j];
  return sum;
}

double step_bg(ALBGState& s, const StepContext& ctx, NodeId i, Counters& counters) {
  Vec x_bar = neighbor_sum(s.x, ctx.graph, i);
  counters.flops += static_cast<double>(ctx.problem.dim()) * ctx.graph.degree(i);
  BlockSolve res = solve_bg_block(ctx.problem, i, s.lambda_bar[i], x_bar, ctx.graph.degree(i),
                                  s.rho, ctx.solver, s.x[i]);
  counters.flops += res.flops;
  double moved = (res.x - s.x[i]).lpNorm<Eigen::Infinity>();
  s.x[i] = std::move(res.x);
  counters.transmissions += 1;
  counters.events += 1;
  s.k += 1;
  return moved;
}

void dual_update_bg(ALBGState& s, const Supergraph& graph, const PenaltySchedule* adaptive) {
  std::vector<Vec> incr;
  incr.reserve(s.x.size());
  double eps2 = 0.0;
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    incr.push_back(graph.degree(i) * s.x[i] - neighbor_sum(s.x, graph, i));
    eps2 += incr.back().squaredNorm();
  }
  for (NodeId i = 0; i < graph.num_nodes(); ++i) s.lambda_bar[i] += s.rho * incr[i];
  if (adaptive) {
    double eps = std::sqrt(eps2);
    s.rho = update_adaptive(s.rho, s.eps_prev, eps, adaptive->kappa, adaptive->sigma);
    s.eps_prev = eps;
  }
  s.t += 1;
}

double lagrangian_bg(const ALBGState& s, const Supergraph& graph, const Problem& problem) {
  double total = 0.0;
  for (NodeId i = 0; i < graph.num_nodes(); ++i)
    total += problem.local_value(i, s.x[i]) + s.lambda_bar[i].dot(s.x[i]);
  for (const auto& [i, j] : graph.edges()) total += 0.5 * s.rho * (s.x[i] - s.x[j]).squaredNorm();
  return total;
}

// ---------------------------------------------------------------- runner

void check_compatible(Variant variant, const FailureModel& failures) {
  if (variant == Variant::ALBG && failures.mode() != FailureMode::AlwaysOn)
    throw ConfigError("AL-BG needs reliable links (always-on failure model)", "failure_model");
}

long default_inner_events(Variant variant, const Supergraph& graph) {
  const long n = graph.num_nodes();
  switch (variant) {
    case Variant::ALG: return 10 * (n + graph.num_arcs());
    case Variant::ALMG: return 10 * 2 * n;
    case Variant::ALBG: return 10 * n;
  }
  return 10 * n;
}

namespace {

EventDistribution make_distribution(const Supergraph& g, const FailureModel& failures,
                                    const AlgoConfig& cfg) {
  check_compatible(cfg.variant, failures);
  ClockModel clocks = cfg.clocks;
  clocks.variant = cfg.variant;
  return event_distribution(g, failures, clocks);
}

}  // namespace

AlSimulation::AlSimulation(const Problem& problem, const Supergraph& graph,
                           const FailureModel& failures, AlgoConfig config, std::uint64_t seed,
                           double f_star)
    : problem_(problem),
      graph_(graph),
      failures_(failures),
      config_(std::move(config)),
      dist_(make_distribution(graph, failures, config_)),
      rng_(seed),
      f_star_(f_star) {
  if (failures.num_arcs() != graph.num_arcs())
    throw ConfigError("failure model does not match the graph", "failure_model");
  if (config_.outer < 0) throw ConfigError("outer iteration count must be >= 0", "outer");
  if (config_.inner_events < 0) throw ConfigError("inner event budget must be >= 0", "inner");
  if (config_.checkpoint_stride < 0)
    throw ConfigError("checkpoint stride must be >= 0", "checkpoint_stride");
  config_.schedule.validate();
  rho_ = config_.schedule.initial();
  inner_events_ = config_.inner_events > 0 ? config_.inner_events
                                           : default_inner_events(config_.variant, graph);
  if (config_.variant == Variant::ALBG)
    bg_ = init_albg_state(problem, rho_);
  else
    alg_ = init_alg_state(problem, graph, rho_);
}

double AlSimulation::step() {
  StepContext ctx{problem_, graph_, config_.solver};
  Event ev = sample_event(dist_, graph_, failures_, rng_);
  if (config_.variant == Variant::ALBG) {
    if (ev.kind != EventKind::BGUpdate) throw KindError("unexpected event in an AL-BG run");
    return step_bg(bg_, ctx, ev.node, counters_);
  }
  return inner_step_alg(alg_, ctx, ev, counters_);
}

long AlSimulation::run_inner(MetricsLog* log) {
  if (config_.schedule.kind != PenaltyKind::Adaptive) {
    rho_ = penalty_at(config_.schedule, config_.variant == Variant::ALBG ? bg_.t : alg_.t);
    if (config_.variant == Variant::ALBG)
      bg_.rho = rho_;
    else
      set_penalty(alg_, rho_);
  }
  const long window = 4 * static_cast<long>(dist_.size());
  long quiet = 0;
  long applied = 0;
  while (applied < inner_events_) {
    double moved = step();
    ++applied;
    if (log && config_.checkpoint_stride > 0 && counters_.events % config_.checkpoint_stride == 0)
      log->push_back(snapshot());
    if (config_.inner_stop_tol > 0.0) {
      quiet = moved <= config_.inner_stop_tol ? quiet + 1 : 0;
      if (quiet >= window) break;
    }
  }
  return applied;
}

void AlSimulation::outer_update() {
  const PenaltySchedule* adaptive =
      config_.schedule.kind == PenaltyKind::Adaptive ? &config_.schedule : nullptr;
  if (config_.variant == Variant::ALBG) {
    dual_update_bg(bg_, graph_, adaptive);
    rho_ = bg_.rho;
  } else {
    dual_update_alg(alg_, graph_, adaptive);
  }
  const double m = problem_.dim();
  counters_.flops += 6.0 * m * graph_.num_arcs();
}

MetricsLog AlSimulation::run(const OuterHook& after_outer) {
  MetricsLog log;
  for (int t = 0; t < config_.outer; ++t) {
    run_inner(&log);
    outer_update();
    log.push_back(snapshot());
    if (after_outer) after_outer(*this);
    if (config_.err_stop && std::abs(log.back().err_f) <= *config_.err_stop) break;
  }
  return log;
}

std::vector<Vec> AlSimulation::estimates() const {
  return config_.variant == Variant::ALBG ? bg_.x : alg_.x;
}

double AlSimulation::lagrangian() const {
  return config_.variant == Variant::ALBG ? lagrangian_bg(bg_, graph_, problem_)
                                          : lagrangian_alg(alg_, graph_, problem_);
}

double AlSimulation::dual_gap() const {
  return config_.variant == Variant::ALBG ? 0.0 : max_dual_gap(alg_, graph_);
}

MetricsRow AlSimulation::snapshot() const {
  const auto& x = config_.variant == Variant::ALBG ? bg_.x : alg_.x;
  if (!all_finite(x)) throw NumericFailure("non-finite primal iterate");
  MetricsRow r;
  r.t = config_.variant == Variant::ALBG ? bg_.t : alg_.t;
  r.k = counters_.events;
  r.transmissions = counters_.transmissions;
  r.flops = counters_.flops;
  r.err_f = err_f(problem_, x, f_star_);
  r.lagrangian = lagrangian();
  r.max_dual_gap = dual_gap();
  r.feasible = true;
  for (NodeId i = 0; i < graph_.num_nodes(); ++i)
    if (!problem_.feasible(i, x[i])) r.feasible = false;
  if (!std::isfinite(r.lagrangian) || !std::isfinite(r.err_f))
    throw NumericFailure("non-finite objective or Lagrangian");
  return r;
}

}  // namespace algossip
