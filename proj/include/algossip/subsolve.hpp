#pragma once

#include "algossip/problem.hpp"
#include "algossip/types.hpp"

namespace algossip {

enum class InnerMethod {
  Subgradient,  // projected subgradient, step c0 / sqrt(k), c0 = 1 / (q + 1)
  Proximal,     // accelerated proximal gradient on the composite split
};

struct InnerSolverConfig {
  InnerMethod method = InnerMethod::Subgradient;
  int budget = 50;
  double tol = 1e-10;
  /// Use exact closed forms when the instance provides them.
  bool use_closed_form = true;
};

/// Local block: minimize f_i(x) + c'x + (q/2)|x|^2 over X_i.
struct XSubproblem {
  const Problem* problem = nullptr;
  NodeId node = 0;
  Vec linear;        // c
  double quad = 0.0; // q

  double objective(const Vec& x) const;
};

struct BlockSolve {
  Vec x;
  double flops = 0.0;
  int iterations = 0;
};

/// Approximate block minimizer, warm-started. Never returns a point with a
/// larger block objective than `warm_start`.
BlockSolve solve_x_block(const XSubproblem& sub, const InnerSolverConfig& config,
                         const Vec& warm_start);

/// Closed-form y-block minimizer for a common penalty:
///   y = (y_ji + x_i) / 2 + (mu - s * lambda) / (2 rho).
Vec y_closed_form(const Vec& x_i, const Vec& y_ji, const Vec& mu, const Vec& lambda, double rho,
                  double sign);

/// Per-edge penalty version, minimizing
///   mu'(x_i - y) + s lambda'(y - y_ji) + (rho_mu/2)|x_i - y|^2 + (rho_lambda/2)|y - y_ji|^2,
/// i.e. y = (rho_mu x_i + rho_lambda y_ji + mu - s lambda) / (rho_mu + rho_lambda).
Vec y_closed_form_peredge(const Vec& x_i, const Vec& y_ji, const Vec& mu, const Vec& lambda,
                          double rho_lambda, double rho_mu, double sign);

/// Broadcast-gossip local block:
///   minimize f_i(x) + (lambda_bar - rho x_bar)'x + (rho d_i / 2)|x|^2 over X_i.
BlockSolve solve_bg_block(const Problem& problem, NodeId i, const Vec& lambda_bar,
                          const Vec& x_bar, int degree, double rho,
                          const InnerSolverConfig& config, const Vec& warm_start);

}  // namespace algossip
