#include "algossip/subsolve.hpp"

#include <cmath>

#include "algossip/errors.hpp"

namespace algossip {

double XSubproblem::objective(const Vec& x) const {
  return problem->local_value(node, x) + linear.dot(x) + 0.5 * quad * x.squaredNorm();
}

namespace {

BlockSolve subgradient_solve(const XSubproblem& sub, const InnerSolverConfig& cfg,
                             const Vec& warm, double warm_value) {
  const Problem& p = *sub.problem;
  const double m = p.dim();
  const double c0 = 1.0 / (sub.quad + 1.0);
  const double per_iter = p.subgradient_flops(sub.node) + p.value_flops(sub.node) +
                          p.projection_flops(sub.node) + 8.0 * m;
  BlockSolve out{warm, 0.0, 0};
  double best = warm_value;
  Vec x = warm;
  for (int k = 1; k <= cfg.budget; ++k) {
    Vec g = p.local_subgradient(sub.node, x) + sub.linear + sub.quad * x;
    Vec next = p.project(sub.node, x - (c0 / std::sqrt(static_cast<double>(k))) * g);
    double moved = (next - x).norm();
    x = std::move(next);
    double h = sub.objective(x);
    out.flops += per_iter;
    out.iterations = k;
    if (h < best) {
      best = h;
      out.x = x;
    }
    if (moved <= cfg.tol) break;
  }
  return out;
}

BlockSolve proximal_solve(const XSubproblem& sub, const InnerSolverConfig& cfg, const Vec& warm,
                          double warm_value) {
  const Problem& p = *sub.problem;
  const double m = p.dim();
  const double lip = p.smooth_lipschitz(sub.node) + sub.quad;
  const double step = 1.0 / lip;
  const double per_iter = 2.0 * p.subgradient_flops(sub.node) + p.projection_flops(sub.node) +
                          10.0 * m;
  auto grad = [&](const Vec& y) {
    return Vec(p.smooth_gradient(sub.node, y) + sub.linear + sub.quad * y);
  };
  BlockSolve out{warm, 0.0, 0};
  Vec x = warm;
  double fx = warm_value;
  Vec y = x;
  double t = 1.0;
  for (int k = 1; k <= cfg.budget; ++k) {
    Vec xn = p.prox_local(sub.node, y - step * grad(y), step);
    double fn = sub.objective(xn);
    out.flops += per_iter;
    out.iterations = k;
    if (fn > fx) {
      if (t == 1.0) break;
      t = 1.0;
      y = x;
      continue;
    }
    double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double moved = (xn - x).norm();
    y = xn + ((t - 1.0) / tn) * (xn - x);
    x = std::move(xn);
    fx = fn;
    t = tn;
    if (moved <= cfg.tol) break;
  }
  out.x = x;
  return out;
}

}  // namespace

BlockSolve solve_x_block(const XSubproblem& sub, const InnerSolverConfig& config,
                         const Vec& warm_start) {
  if (sub.problem == nullptr) throw DomainError("solve_x_block: no problem attached");
  if (config.budget < 1) throw DomainError("solve_x_block: inner budget must be >= 1");
  const Problem& p = *sub.problem;
  const double warm_value = sub.objective(warm_start);

  BlockSolve out;
  if (config.use_closed_form) {
    if (auto exact = p.exact_block_minimizer(sub.node, sub.linear, sub.quad)) {
      out.x = std::move(*exact);
      out.flops = p.value_flops(sub.node) + p.projection_flops(sub.node) + 4.0 * p.dim();
      out.iterations = 1;
    }
  }
  if (out.iterations == 0) {
    out = config.method == InnerMethod::Proximal && p.has_composite()
              ? proximal_solve(sub, config, warm_start, warm_value)
              : subgradient_solve(sub, config, warm_start, warm_value);
  }
  out.flops += 2.0 * p.value_flops(sub.node);
  // monotone safeguard
  if (!(sub.objective(out.x) <= warm_value)) out.x = warm_start;
  return out;
}

Vec y_closed_form(const Vec& x_i, const Vec& y_ji, const Vec& mu, const Vec& lambda, double rho,
                  double sign) {
  if (!(rho > 0.0)) throw DomainError("y_closed_form: rho must be positive");
  return 0.5 * y_ji + 0.5 * x_i + (mu - sign * lambda) / (2.0 * rho);
}

Vec y_closed_form_peredge(const Vec& x_i, const Vec& y_ji, const Vec& mu, const Vec& lambda,
                          double rho_lambda, double rho_mu, double sign) {
  const double total = rho_lambda + rho_mu;
  if (!(total > 0.0) || rho_lambda < 0.0 || rho_mu < 0.0)
    throw DomainError("y_closed_form_peredge: penalties must be nonnegative with positive sum");
  return (rho_mu * x_i + rho_lambda * y_ji + mu - sign * lambda) / total;
}

BlockSolve solve_bg_block(const Problem& problem, NodeId i, const Vec& lambda_bar,
                          const Vec& x_bar, int degree, double rho,
                          const InnerSolverConfig& config, const Vec& warm_start) {
  XSubproblem sub{&problem, i, lambda_bar - rho * x_bar, rho * degree};
  return solve_x_block(sub, config, warm_start);
}

}  // namespace algossip
