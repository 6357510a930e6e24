#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "algossip/errors.hpp"
#include "algossip/problem.hpp"

using namespace algossip;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

std::unique_ptr<LogReg> small_logreg(std::uint64_t seed, int nodes = 4, int features = 5) {
  LogRegParams p;
  p.nodes = nodes;
  p.features = features;
  p.samples = 5;
  p.seed = seed;
  return gen_logreg(p);
}

}  // namespace

TEST_CASE("quad consensus: two nodes, targets 0 and 2") {
  QuadConsensus q({vec({0.0}), vec({2.0})});
  CHECK(q.num_nodes() == 2);
  CHECK(q.dim() == 1);
  CHECK(q.analytic_optimum()[0] == 1.0);
  CHECK(q.global_value(vec({1.0})) == 2.0);
  CHECK(q.local_subgradient(1, vec({1.0}))[0] == -2.0);
  auto res = centralized_oracle(q);
  CHECK(res.f_star == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quad consensus with boxes: optimum is the clamped mean") {
  QuadConsensus q({vec({0.0}), vec({4.0}), vec({5.0})}, {vec({-1.0}), vec({-1.0}), vec({2.5})},
                  {vec({10.0}), vec({10.0}), vec({10.0})});
  CHECK(q.analytic_optimum()[0] == 3.0);
  QuadConsensus r({vec({0.0}), vec({1.0})}, {vec({2.0}), vec({-5.0})}, {vec({5.0}), vec({5.0})});
  CHECK(r.analytic_optimum()[0] == 2.0);
  CHECK(r.constraint_violation(0, vec({1.0})) == 1.0);
  CHECK(r.feasible(0, vec({2.0})));
  CHECK_FALSE(r.feasible(0, vec({1.9})));
  CHECK_THROWS_AS(QuadConsensus({vec({0.0}), vec({1.0})}, {vec({2.0}), vec({-5.0})},
                                {vec({3.0}), vec({1.0})}),
                  DomainError);
}

TEST_CASE("quad exact block minimizer matches (2a - c) / (2 + q)") {
  QuadConsensus q({vec({1.0, -2.0})}, {vec({-1.0, -1.0})}, {vec({1.0, 1.0})});
  Vec c = vec({0.4, -0.2});
  Vec x = *q.exact_block_minimizer(0, c, 3.0);
  CHECK(x[0] == doctest::Approx((2.0 - 0.4) / 5.0));
  CHECK(x[1] == doctest::Approx(-(4.0 - 0.2) / 5.0));
  CHECK(*q.exact_block_minimizer(0, vec({-10.0, 0.0}), 0.0) == vec({1.0, -1.0}));
}

TEST_CASE("quad oracle methods agree with the analytic optimum") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  std::vector<Vec> a, lo, hi;
  for (int i = 0; i < 5; ++i) {
    a.push_back(vec({nd(rng), nd(rng)}));
    lo.push_back(vec({-0.5 - std::abs(nd(rng)), -2.0}));
    hi.push_back(vec({0.2 + std::abs(nd(rng)), 2.0}));
  }
  QuadConsensus q(a, lo, hi);
  Vec xs = q.analytic_optimum();
  double fs = q.global_value(xs);
  auto comp = centralized_oracle(q, {100000, OracleMethod::Composite});
  CHECK(comp.f_star == doctest::Approx(fs).epsilon(1e-12));
  CHECK((comp.x - xs).norm() < 1e-8);
  auto sub = centralized_oracle(q, {20000, OracleMethod::Subgradient});
  CHECK(sub.f_star >= fs - 1e-12);
  CHECK(sub.f_star - fs < 1e-3);
  CHECK(sub.best_values.size() == 20000);
  for (std::size_t k = 1; k < sub.best_values.size(); ++k)
    CHECK(sub.best_values[k] <= sub.best_values[k - 1]);
}

TEST_CASE("err_f averages the global gap over node estimates") {
  QuadConsensus q({vec({0.0}), vec({2.0})});
  // f(1) = 2, f(0) = 4, f(3) = 10
  CHECK(err_f(q, {vec({1.0}), vec({1.0})}, 2.0) == 0.0);
  CHECK(err_f(q, {vec({0.0}), vec({3.0})}, 2.0) == doctest::Approx((2.0 + 8.0) / 2.0));
}

TEST_CASE("logreg generator follows the recipe") {
  LogRegParams p;
  p.nodes = 10;
  p.features = 10;
  p.samples = 5;
  p.seed = 3;
  auto lr = gen_logreg(p);
  CHECK(lr->num_nodes() == 10);
  CHECK(lr->dim() == 11);
  CHECK(lr->lambda() == doctest::Approx(0.5 * lr->lambda_max()));
  CHECK(lr->lambda_max() > 0.0);
  long zeros = 0, total = 0;
  for (int i = 0; i < 10; ++i) {
    const auto& d = lr->node(i);
    CHECK(d.features.rows() == 5);
    for (Eigen::Index j = 0; j < d.labels.size(); ++j) CHECK(std::abs(d.labels[j]) == 1.0);
    zeros += (d.features.array() == 0.0).count();
    total += d.features.size();
  }
  CHECK(std::abs(zeros / double(total) - 0.6) < 0.1);

  // radii put the unconstrained solution inside every private set
  auto res = centralized_oracle(*lr);
  for (int i = 0; i < 10; ++i) {
    CHECK(res.x.head(10).squaredNorm() <= lr->node(i).ball + 1e-9);
    CHECK(std::abs(res.x[10]) <= lr->node(i).offset_bound + 1e-9);
  }
}

TEST_CASE("logreg generator is reproducible") {
  auto a = small_logreg(9), b = small_logreg(9), c = small_logreg(10);
  CHECK(a->digest() == b->digest());
  CHECK(a->digest() != c->digest());
  CHECK(a->digest().size() == 64);
}

TEST_CASE("logreg gradient matches finite differences") {
  auto lr = small_logreg(5);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Vec x(lr->dim());
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = 0.3 * nd(rng);
    for (NodeId i = 0; i < lr->num_nodes(); ++i) {
      Vec g = lr->smooth_gradient(i, x);
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vec e = Vec::Zero(x.size());
        e[k] = 1e-6;
        double fd = (lr->smooth_value(i, x + e) - lr->smooth_value(i, x - e)) / 2e-6;
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("logreg value adds the l1 share") {
  auto lr = small_logreg(5);
  Vec x = Vec::Constant(lr->dim(), 0.5);
  const double share = lr->lambda() / lr->num_nodes();
  CHECK(lr->local_value(0, x) ==
        doctest::Approx(lr->smooth_value(0, x) + share * 0.5 * lr->features()));
  // the offset is not penalized
  CHECK(lr->l1_weights(0)[lr->features()] == 0.0);
}

TEST_CASE("logreg projection lands in the private set") {
  auto lr = small_logreg(6);
  Vec x = Vec::Constant(lr->dim(), 1e4);
  for (NodeId i = 0; i < lr->num_nodes(); ++i) {
    Vec p = lr->project(i, x);
    CHECK(lr->constraint_violation(i, p) <= 1e-12);
    CHECK(p.head(lr->features()).squaredNorm() == doctest::Approx(lr->node(i).ball));
    CHECK(std::abs(p[lr->features()]) == doctest::Approx(lr->node(i).offset_bound));
  }
}

TEST_CASE("logreg local prox beats random feasible points") {
  auto lr = small_logreg(7);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  const double t = 0.7;
  const Vec l1 = lr->l1_weights(0);
  auto obj = [&](const Vec& x, const Vec& z) {
    return l1.cwiseProduct(x.cwiseAbs()).sum() + 0.5 / t * (x - z).squaredNorm();
  };
  for (int trial = 0; trial < 20; ++trial) {
    Vec z(lr->dim());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = 2.0 * nd(rng);
    Vec p = lr->prox_local(0, z, t);
    CHECK(lr->feasible(0, p));
    for (int s = 0; s < 200; ++s) {
      Vec q = p;
      for (Eigen::Index k = 0; k < q.size(); ++k) q[k] += 1e-3 * nd(rng);
      q = lr->project(0, q);
      CHECK(obj(p, z) <= obj(q, z) + 1e-12);
    }
  }
}

TEST_CASE("lambda_max is the threshold for a zero weight vector") {
  LogRegParams p;
  p.nodes = 3;
  p.features = 4;
  p.samples = 6;
  p.seed = 21;
  p.sparsity = 0.0;
  auto lr = gen_logreg(p);
  std::vector<LogReg::NodeData> free_nodes;
  for (int i = 0; i < 3; ++i) {
    auto d = lr->node(i);
    d.ball = 1e6;
    d.offset_bound = 1e6;
    free_nodes.push_back(d);
  }
  const double lmax = logreg_lambda_max(free_nodes);
  CHECK(lmax == doctest::Approx(lr->lambda_max()));
  LogReg above(free_nodes, 1.01 * lmax, lmax);
  CHECK(centralized_oracle(above).x.head(4).lpNorm<Eigen::Infinity>() < 1e-8);
  LogReg below(free_nodes, 0.8 * lmax, lmax);
  CHECK(centralized_oracle(below).x.head(4).lpNorm<Eigen::Infinity>() > 1e-4);
}

TEST_CASE("lambda_max with a single class is zero") {
  LogReg::NodeData d;
  d.features = Eigen::MatrixXd::Ones(3, 2);
  d.labels = Vec::Ones(3);
  d.ball = 1.0;
  d.offset_bound = 1.0;
  CHECK(logreg_lambda_max({d}) == 0.0);
}

TEST_CASE("oracle is stable across budgets on the desk instance") {
  LogRegParams p;
  p.nodes = 10;
  p.features = 10;
  p.samples = 5;
  p.seed = 3;
  auto lr = gen_logreg(p);
  auto a = centralized_oracle(*lr, {100000, OracleMethod::Auto});
  auto b = centralized_oracle(*lr, {1000000, OracleMethod::Auto});
  CHECK(a.converged);
  CHECK(std::abs(a.f_star - b.f_star) <= 1e-6);
  for (NodeId i = 0; i < lr->num_nodes(); ++i) CHECK(lr->feasible(i, a.x));
}

TEST_CASE("subgradient oracle approaches the composite value") {
  auto lr = small_logreg(12);
  auto comp = centralized_oracle(*lr, {100000, OracleMethod::Composite});
  auto sub = centralized_oracle(*lr, {20000, OracleMethod::Subgradient, 0.5});
  CHECK(sub.f_star >= comp.f_star - 1e-9);
  CHECK(sub.f_star - comp.f_star < 1e-2 * (1.0 + std::abs(comp.f_star)));
}

TEST_CASE("problem text format round-trips") {
  auto lr = small_logreg(13);
  std::stringstream ss;
  lr->write(ss);
  auto back = read_problem(ss);
  CHECK(back->kind() == "logreg");
  CHECK(back->digest() == lr->digest());

  QuadConsensus q({vec({0.0, 1.0}), vec({2.0, 3.0})}, {vec({-1.0, -1.0}), vec({-1.0, -1.0})},
                  {vec({1.0, 1.0}), vec({1.5, 1.5})});
  std::stringstream qs;
  q.write(qs);
  auto qb = read_problem(qs);
  CHECK(qb->digest() == q.digest());

  QuadConsensus open({vec({0.0})});
  std::stringstream os;
  open.write(os);
  CHECK(read_problem(os)->digest() == open.digest());

  std::stringstream bad("kind circle\n");
  CHECK_THROWS_AS(read_problem(bad), ConfigError);
}

TEST_CASE("quad has no l1 part and an exact composite split") {
  QuadConsensus q({vec({0.0}), vec({2.0})});
  CHECK(q.has_composite());
  CHECK(q.l1_weights(0)[0] == 0.0);
}

TEST_CASE("common interval [2,3] moves the optimum to 2") {
  QuadConsensus q({vec({0.0}), vec({2.0})}, {vec({2.0}), vec({2.0})}, {vec({3.0}), vec({3.0})});
  CHECK(q.analytic_optimum()[0] == 2.0);
  CHECK(centralized_oracle(q).x[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("logreg with zero data costs log 2 per sample at the origin") {
  std::vector<LogReg::NodeData> nodes;
  for (int i = 0; i < 3; ++i) {
    LogReg::NodeData d;
    d.features = Eigen::MatrixXd::Zero(5, 4);
    d.labels = Vec::Ones(5);
    d.labels[1] = -1.0;
    d.ball = 1.0;
    d.offset_bound = 1.0;
    nodes.push_back(d);
  }
  LogReg lr(nodes, 0.3);
  CHECK(eval_global(lr, Vec::Zero(5)) == doctest::Approx(3 * 5 * std::log(2.0)));
}

TEST_CASE("noise-free constant model labels everything +1") {
  LogRegParams p;
  p.nodes = 4;
  p.features = 3;
  p.samples = 5;
  p.noise_var = 0.0;
  p.w_true = Vec::Zero(3);
  p.v_true = 1.0;
  auto lr = gen_logreg(p);
  for (int i = 0; i < 4; ++i) CHECK((lr->node(i).labels.array() == 1.0).all());
  CHECK(lr->lambda_max() == 0.0);
}

TEST_CASE("err_f: one node at the optimum, one two above") {
  QuadConsensus q({vec({0.0}), vec({2.0})});
  // f(1 + 1) = 4 + 0 = 4 = f* + 2
  CHECK(err_f(q, {vec({1.0}), vec({2.0})}, 2.0) == doctest::Approx(1.0));
  CHECK(err_f(q, {vec({0.0}), vec({0.0})}, 2.0) == doctest::Approx(2.0));
}
