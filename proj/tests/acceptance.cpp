// One PASS/FAIL line per acceptance criterion; thresholds are pinned here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>

#include "algossip/algo.hpp"
#include "algossip/baseline.hpp"
#include "algossip/harness.hpp"
#include "algossip/subsolve.hpp"

using namespace algossip;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome inner_descent() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<Vec> a, lo, hi;
  for (int i = 0; i < 4; ++i) {
    a.push_back(Vec::NullaryExpr(2, [&] { return 2.0 * nd(rng); }));
    lo.push_back(Vec::Constant(2, -1.5));
    hi.push_back(Vec::Constant(2, 1.0 + 0.5 * i));
  }
  QuadConsensus q(a, lo, hi);
  Supergraph g = make_ring(4);
  FailureModel flaky = FailureModel::uniform(g, 0.7);
  FailureModel solid = FailureModel::always_on(g);

  struct Case {
    Variant v;
    const FailureModel* f;
  };
  const int slots = 5, per_slot = 2500;
  long checked = 0;
  double worst = -1e300;
  bool ok = true;
  for (Case c : {Case{Variant::ALG, &flaky}, Case{Variant::ALMG, &flaky}, Case{Variant::ALBG, &solid}}) {
    AlgoConfig cfg;
    cfg.variant = c.v;
    cfg.schedule = PenaltySchedule::fixed(1.5);
    AlSimulation sim(q, g, *c.f, cfg, 7, 0.0);
    long here = 0;
    for (int s = 0; s < slots; ++s) {
      for (int k = 0; k < per_slot; ++k) {
        double before = sim.lagrangian();
        sim.step();
        double rise = sim.lagrangian() - before;
        worst = std::max(worst, rise);
        if (rise > 1e-12) ok = false;
        ++here;
      }
      sim.outer_update();
    }
    if (here < 10000) ok = false;
    checked += here;
  }
  return {ok, std::to_string(checked) + " events, largest rise " + fmt("%.2e", worst)};
}

// ---------------------------------------------------------------- 2

// Minimizer of a 1-D convex quadratic found from objective values only:
// bisection on the sign of a central difference.
double numeric_argmin(const std::function<double(double)>& h) {
  const double d = 1e-3;
  auto slope = [&](double y) { return (h(y + d) - h(y - d)) / (2 * d); };
  auto r = boost::math::tools::bisect(slope, -1e3, 1e3, boost::math::tools::eps_tolerance<double>(50));
  return 0.5 * (r.first + r.second);
}

Outcome closed_forms() {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> pos(0.05, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + trial % 3;
    auto rv = [&] { return Vec(Vec::NullaryExpr(m, [&] { return 3.0 * nd(rng); })); };
    Vec x = rv(), yj = rv(), mu = rv(), lam = rv();
    const double s = trial % 2 ? 1.0 : -1.0;
    const double rho = pos(rng), rl = pos(rng), rm = pos(rng);
    Vec y1 = y_closed_form(x, yj, mu, lam, rho, s);
    Vec y2 = y_closed_form_peredge(x, yj, mu, lam, rl, rm, s);
    for (int k = 0; k < m; ++k) {
      auto h1 = [&](double y) {
        return mu[k] * (x[k] - y) + 0.5 * rho * (x[k] - y) * (x[k] - y) + s * lam[k] * y +
               0.5 * rho * (y - yj[k]) * (y - yj[k]);
      };
      auto h2 = [&](double y) {
        return mu[k] * (x[k] - y) + 0.5 * rm * (x[k] - y) * (x[k] - y) + s * lam[k] * y +
               0.5 * rl * (y - yj[k]) * (y - yj[k]);
      };
      worst = std::max(worst, std::abs(y1[k] - numeric_argmin(h1)));
      worst = std::max(worst, std::abs(y2[k] - numeric_argmin(h2)));
    }
  }
  return {worst <= 1e-8, "2000 solves, max deviation " + fmt("%.2e", worst)};
}

// ---------------------------------------------------------------- 3

Outcome small_instances() {
  // mean of the targets is 1.44; the intersection [-1, 1] caps it at 1
  const std::vector<double> targets = {2.0, 1.5, 1.8, -0.3, 2.2};
  const std::vector<double> upper = {3.0, 3.0, 1.0, 3.0, 3.0};
  std::vector<Vec> a, lo, hi;
  double mean = 0.0, cap_lo = -1e300, cap_hi = 1e300;
  for (int i = 0; i < 5; ++i) {
    a.push_back(Vec::Constant(1, targets[i]));
    lo.push_back(Vec::Constant(1, -1.0));
    hi.push_back(Vec::Constant(1, upper[i]));
    mean += targets[i] / 5.0;
    cap_lo = std::max(cap_lo, -1.0);
    cap_hi = std::min(cap_hi, upper[i]);
  }
  const double xs = std::clamp(mean, cap_lo, cap_hi);
  double fs = 0.0;
  for (double t : targets) fs += (xs - t) * (xs - t);

  QuadConsensus q(a, lo, hi);
  Supergraph g = build_geometric(5, 0.6, 1);
  FailureModel flaky = FailureModel::geometric(g, 0.6, 0.5);
  FailureModel solid = FailureModel::always_on(g);

  auto run_al = [&](Variant v, const FailureModel& f, std::uint64_t seed) {
    AlgoConfig cfg;
    cfg.variant = v;
    cfg.schedule = PenaltySchedule::fixed(3.0);
    cfg.outer = 600;
    cfg.inner_events = 20000;
    cfg.inner_stop_tol = 1e-10;
    cfg.checkpoint_stride = 0;
    cfg.err_stop = 1e-6;
    AlSimulation sim(q, g, f, cfg, seed, fs);
    auto log = sim.run();
    return std::abs(log.back().err_f);
  };

  double worst_alg = 0.0;
  int bad = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    double e = run_al(Variant::ALG, flaky, seed);
    if (!std::isfinite(e) || e >= 1e-4) ++bad;  // e is |err_f|
    worst_alg = std::max(worst_alg, e);
  }
  double e_mg = run_al(Variant::ALMG, flaky, 1);
  double e_bg = run_al(Variant::ALBG, solid, 1);
  // x* sits on node 2's bound, so a fixed PS step leaves a bias of about
  // 50 alpha; the step is sized for that and the run long enough to settle
  PSConfig pc;
  pc.alpha = 1.5e-6;
  pc.rounds = 2000000;
  pc.checkpoint_stride = 1000;
  PSSimulation ps_sim(q, g, flaky, pc, 1, fs);
  const double e_ps = std::abs(ps_sim.run().back().err_f);
  const bool ok = bad == 0 && e_mg < 1e-4 && e_bg < 1e-4 && e_ps < 1e-4;
  return {ok, "ALG worst of 20 seeds " + fmt("%.1e", worst_alg) + ", ALMG " + fmt("%.1e", e_mg) +
                  ", ALBG " + fmt("%.1e", e_bg) + ", PS " + fmt("%.1e", e_ps) +
                  " (alpha " + fmt("%g", pc.alpha) + ")"};
}

// ---------------------------------------------------------------- 4

RunConfig desk_config(const std::string& algo, std::uint64_t seed, bool failures) {
  std::ostringstream ss;
  ss << "[problem]\nkind = logreg\nnodes = 10\nfeatures = 10\nsamples = 5\nseed = " << seed
     << "\n[graph]\nkind = geometric\nradius = 0.5\nseed = " << seed << "\n"
     << (failures ? "failures = geometric\nscale = 0.5\n" : "")
     << "[algo]\nname = " << algo << "\nschedule = fixed\nrho = 1\nsolver = proximal\n"
     << "[run]\nseed = " << seed << "\n";
  std::istringstream is(ss.str());
  return parse_config(is);
}

double lambda_bar_sum(const ALBGState& s) {
  Vec total = Vec::Zero(s.lambda_bar.front().size());
  for (const auto& v : s.lambda_bar) total += v;
  return total.lpNorm<Eigen::Infinity>();
}

Outcome dual_consistency() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  std::vector<Vec> a;
  for (int i = 0; i < 6; ++i) a.push_back(Vec::NullaryExpr(2, [&] { return nd(rng); }));
  QuadConsensus q(a);
  Supergraph g = make_ring(6);
  FailureModel f = FailureModel::always_on(g);
  const double fs = q.global_value(q.analytic_optimum());

  double worst_gap = 0.0;
  int updates = 0;
  for (Variant v : {Variant::ALG, Variant::ALMG}) {
    AlgoConfig cfg;
    cfg.variant = v;
    cfg.schedule = PenaltySchedule::fixed(1.0);
    cfg.outer = 50;
    cfg.inner_events = 200000;
    cfg.inner_stop_tol = 1e-10;
    cfg.checkpoint_stride = 0;
    AlSimulation sim(q, g, f, cfg, 3, fs);
    sim.run([&](const AlSimulation& s) {
      worst_gap = std::max(worst_gap, s.dual_gap());
      ++updates;
    });
  }

  double worst_sum = 0.0;
  int bg_updates = 0;
  auto watch = [&](const AlSimulation& s) {
    worst_sum = std::max(worst_sum, lambda_bar_sum(s.bg_state()));
    ++bg_updates;
  };
  {
    AlgoConfig cfg;
    cfg.variant = Variant::ALBG;
    cfg.outer = 50;
    AlSimulation sim(q, g, f, cfg, 3, fs);
    sim.run(watch);
  }
  {
    RunConfig c = desk_config("ALBG", 3, false);
    Instance inst = build_instance(c);
    AlgoConfig cfg;
    cfg.variant = Variant::ALBG;
    cfg.schedule = PenaltySchedule::adaptive(1.0, 0.3, 1.2);
    cfg.solver.method = InnerMethod::Proximal;
    cfg.outer = 50;
    AlSimulation sim(*inst.problem, inst.graph, inst.failures, cfg, 3, 0.0);
    sim.run(watch);
  }
  const bool ok = updates == 100 && worst_gap <= 1e-8 && worst_sum <= 1e-10;
  return {ok, "max lambda gap " + fmt("%.1e", worst_gap) + " over " + std::to_string(updates) +
                  " updates, max |sum lambda_bar| " + fmt("%.1e", worst_sum) + " over " +
                  std::to_string(bg_updates) + " updates"};
}

// ---------------------------------------------------------------- 5

Outcome desk_static() {
  RunConfig c = desk_config("ALBG", 3, false);
  Instance inst = build_instance(c);
  const double fs = oracle_for(c, inst).f_star;

  // static links make PS deterministic, so one tuned run serves every seed
  const std::vector<double> grid = {0.01, 0.003, 0.001, 0.0003};
  const long ps_rounds = 20000;
  AlphaChoice ps = tune_alpha(*inst.problem, inst.graph, inst.failures, grid, ps_rounds, 0, fs, 1e-3);
  // PS short of the target: its whole budget is a lower bound on its cost
  const double t_ps = ps.transmissions ? double(*ps.transmissions)
                                       : double(ps_rounds) * 2.0 * inst.graph.num_edges();

  std::vector<double> ratios;
  std::string detail;
  bool all_reach = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    AlgoConfig cfg;
    cfg.variant = Variant::ALBG;
    cfg.schedule = PenaltySchedule::fixed(1.0);
    cfg.solver.method = InnerMethod::Proximal;
    cfg.outer = 400;
    cfg.checkpoint_stride = 1;
    cfg.err_stop = 1e-3;
    AlSimulation bg(*inst.problem, inst.graph, inst.failures, cfg, seed, fs);
    auto t_bg = transmissions_to(bg.run(), 1e-3);
    if (!t_bg) {
      all_reach = false;
      detail += " " + std::string("missed");
      continue;
    }
    ratios.push_back(t_ps / double(*t_bg));
    detail += " " + std::to_string(*t_bg);
  }
  double median = 0.0;
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    median = ratios[ratios.size() / 2];
  }
  const bool ok = all_reach && ratios.size() == 5 && median >= 3.0;
  return {ok, "median PS/ALBG transmissions to 1e-3 " + fmt("%.3g", median) + "; ALBG seeds 1-5:" +
                  detail + "; PS " + (ps.transmissions ? "" : "> ") + fmt("%.3g", t_ps) +
                  " (best alpha " + fmt("%g", ps.alpha) + ", err " + fmt("%.2e", ps.final_err) + ")"};
}

// ---------------------------------------------------------------- 6

Outcome desk_random() {
  std::string detail;
  bool ok = true;
  for (const char* algo : {"ALG", "ALMG"}) {
    RunConfig c = desk_config(algo, 3, true);
    c.algo.outer = 100;
    c.algo.inner = 20000;
    c.algo.inner_tol = 1e-6;
    Instance inst = build_instance(c);
    const double fs = oracle_for(c, inst).f_star;
    RunResult r = execute(c, inst, fs);
    bool feasible = std::all_of(r.log.begin(), r.log.end(), [](const MetricsRow& row) { return row.feasible; });
    const double e = r.log.back().err_f;
    if (!(e <= 5e-3) || !feasible) ok = false;
    detail += std::string(detail.empty() ? "" : ", ") + algo + " " + fmt("%.2e", e) +
              (feasible ? " feasible" : " INFEASIBLE") + " over " + std::to_string(r.log.size()) +
              " rows";
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 7

double pearson_pvalue(const std::vector<long>& counts, const std::vector<double>& probs) {
  long n = 0;
  for (long c : counts) n += c;
  double stat = 0.0;
  int dof = -1;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (probs[k] == 0.0) {
      if (counts[k] != 0) return 0.0;
      continue;
    }
    const double e = n * probs[k];
    stat += (counts[k] - e) * (counts[k] - e) / e;
    ++dof;
  }
  if (dof < 1) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

Outcome event_law() {
  const int draws = 100000;
  std::vector<double> pvals;

  // AL-G outcomes on two graphs, law from clocks times arc success
  auto alg_case = [&](const Supergraph& g, const FailureModel& f, std::uint64_t seed) {
    auto dist = event_distribution(g, f, ClockModel::equal(Variant::ALG));
    const int n = g.num_nodes(), arcs = g.num_arcs();
    const double share = 1.0 / (n + arcs);
    std::vector<double> probs(n + arcs + 1, 0.0);
    for (int i = 0; i < n; ++i) probs[i] = share;
    for (ArcId a = 0; a < arcs; ++a) {
      probs[n + a] = share * f.success(a);
      probs[n + arcs] += share * (1.0 - f.success(a));
    }
    std::vector<long> counts(probs.size(), 0);
    Rng rng(seed);
    for (int k = 0; k < draws; ++k) {
      Event ev = sample_event(dist, g, f, rng);
      if (ev.kind == EventKind::XUpdate) ++counts[ev.node];
      else if (ev.kind == EventKind::YTransfer) ++counts[n + ev.arc];
      else ++counts[n + arcs];
    }
    pvals.push_back(pearson_pvalue(counts, probs));
  };
  Supergraph geo = build_geometric(10, 0.5, 5);
  alg_case(geo, FailureModel::geometric(geo, 0.5, 0.5), 11);
  Supergraph ring = make_ring(6);
  std::mt19937_64 prng(3);
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  std::vector<double> p(ring.num_arcs());
  for (auto& v : p) v = unif(prng);
  alg_case(ring, FailureModel::per_arc(p), 12);

  // AL-MG: x clock, non-empty broadcast or void per node
  {
    Supergraph g = build_geometric(8, 0.6, 9);
    FailureModel f = FailureModel::uniform(g, 0.4);
    auto dist = event_distribution(g, f, ClockModel::equal(Variant::ALMG));
    const int n = g.num_nodes();
    std::vector<double> probs(3 * n);
    for (int i = 0; i < n; ++i) {
      double none = 1.0;
      for (ArcId a : g.out_arcs(i)) none *= 1.0 - f.success(a);
      probs[i] = 0.5 / n;
      probs[n + i] = 0.5 / n * (1.0 - none);
      probs[2 * n + i] = 0.5 / n * none;
    }
    std::vector<long> counts(3 * n, 0);
    Rng rng(13);
    for (int k = 0; k < draws; ++k) {
      Event ev = sample_event(dist, g, f, rng);
      if (ev.kind == EventKind::XUpdate) ++counts[ev.node];
      else if (ev.kind == EventKind::MGBroadcast) ++counts[n + ev.node];
      else ++counts[2 * n + ev.node];
    }
    pvals.push_back(pearson_pvalue(counts, probs));
  }
  bool ok = std::all_of(pvals.begin(), pvals.end(), [](double v) { return v > 0.01; });
  return {ok, "p-values " + fmt("%.3f", pvals[0]) + ", " + fmt("%.3f", pvals[1]) + ", " +
                  fmt("%.3f", pvals[2])};
}

// ---------------------------------------------------------------- 8

Outcome metropolis() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> size(2, 25);
  std::uniform_real_distribution<double> keep(0.1, 1.0);
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    Supergraph g = build_geometric(n, 0.6, trial);
    std::bernoulli_distribution coin(keep(rng));
    std::vector<char> up(g.num_edges());
    for (auto& u : up) u = coin(rng);
    Eigen::MatrixXd w = metropolis_weights(g, up).dense();
    worst = std::max(worst, (w - w.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (w.rowwise().sum() - Vec::Ones(n)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (w.colwise().sum().transpose() - Vec::Ones(n)).cwiseAbs().maxCoeff());
    if (w.minCoeff() < 0.0) ok = false;
  }
  return {ok && worst <= 1e-12, "100 graphs, max deviation " + fmt("%.1e", worst)};
}

// ---------------------------------------------------------------- 9

Outcome determinism() {
  std::string detail;
  bool ok = true;
  for (const char* algo : {"ALG", "ALMG", "PS"}) {
    RunConfig c = desk_config(algo, 2, true);
    c.algo.outer = std::string(algo) == "PS" ? 500 : 3;
    c.checkpoint_stride = 50;
    std::string csv[2];
    for (auto& out : csv) {
      Instance inst = build_instance(c);
      RunResult r = execute(c, inst, oracle_for(c, inst).f_star);
      std::ostringstream os;
      write_csv(os, r.log);
      out = os.str();
    }
    if (csv[0] != csv[1] || csv[0].empty()) ok = false;
    detail += std::string(detail.empty() ? "" : ", ") + algo + " " + std::to_string(csv[0].size()) + " bytes";
  }
  return {ok, detail + (ok ? " identical" : " differ")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "inner descent invariant", 5.0, inner_descent},
      {2, "closed forms vs numeric minimizer", 1.0, closed_forms},
      {3, "small instances reach 1e-4", 30.0, small_instances},
      {4, "dual consistency", 120.0, dual_consistency},
      {5, "desk static LogReg: ALBG vs PS", 300.0, desk_static},
      {6, "desk random network: ALG and ALMG", 600.0, desk_random},
      {7, "event model chi-square", 60.0, event_law},
      {8, "Metropolis matrix properties", 10.0, metropolis},
      {9, "determinism", 120.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d: %s | %s | %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), secs, c.time_limit, in_time ? "" : " OVER TIME");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
