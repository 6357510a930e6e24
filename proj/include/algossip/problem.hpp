#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "algossip/types.hpp"

namespace algossip {

/// Separable constrained problem: minimize sum_i f_i(x) subject to x in X_i
/// for every node i. Each node only evaluates its own f_i and X_i.
///
/// Instances may also expose a composite split f_i = s_i + sum_k w_ik |x_k|
/// with s_i smooth and an exact prox of the l1 part plus the constraint; the
/// centralized oracle and the optional proximal inner solver use it.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string kind() const = 0;
  int num_nodes() const { return nodes_; }
  int dim() const { return dim_; }

  virtual double local_value(NodeId i, const Vec& x) const = 0;
  /// An element of the subdifferential of f_i at x.
  virtual Vec local_subgradient(NodeId i, const Vec& x) const = 0;
  /// Euclidean projection onto X_i.
  virtual Vec project(NodeId i, const Vec& x) const = 0;
  /// Euclidean projection onto the intersection of all X_i.
  virtual Vec project_intersection(const Vec& x) const = 0;
  /// Distance-like measure of how far x is outside X_i; zero when feasible.
  virtual double constraint_violation(NodeId i, const Vec& x) const = 0;

  bool feasible(NodeId i, const Vec& x, double tol = 1e-9) const {
    return constraint_violation(i, x) <= tol;
  }

  double global_value(const Vec& x) const;
  Vec global_subgradient(const Vec& x) const;

  /// argmin f_i(x) + c'x + (q/2)|x|^2 over X_i when a closed form exists.
  virtual std::optional<Vec> exact_block_minimizer(NodeId, const Vec& /*c*/, double /*q*/) const {
    return std::nullopt;
  }

  virtual bool has_composite() const { return false; }
  virtual double smooth_value(NodeId i, const Vec& x) const;
  virtual Vec smooth_gradient(NodeId i, const Vec& x) const;
  /// Lipschitz bound of grad s_i.
  virtual double smooth_lipschitz(NodeId i) const;
  /// Per-coordinate l1 weights of node i.
  virtual Vec l1_weights(NodeId i) const;
  /// argmin_x t * sum_k w_k |x_k| + 0.5 |x - z|^2 over X_i (node i's weights).
  virtual Vec prox_local(NodeId i, const Vec& z, double t) const;
  /// Same with the summed weights of all nodes, over the intersection of X_i.
  virtual Vec prox_intersection(const Vec& z, double t) const;

  /// Coarse flop costs (vector op = dim, inner product = 2 dim).
  virtual double value_flops(NodeId i) const = 0;
  virtual double subgradient_flops(NodeId i) const = 0;
  virtual double projection_flops(NodeId) const { return 3.0 * dim_; }

  /// Structured text dump; read_problem() inverts it.
  virtual void write(std::ostream& os) const = 0;
  /// SHA-256 of write(), hex encoded.
  std::string digest() const;

 protected:
  Problem(int nodes, int dim);

 private:
  int nodes_;
  int dim_;
};

/// f_i(x) = |x - a_i|^2 with an optional coordinate box per node.
class QuadConsensus final : public Problem {
 public:
  /// Unconstrained boxes are +-infinity.
  QuadConsensus(std::vector<Vec> targets, std::vector<Vec> lower = {}, std::vector<Vec> upper = {});

  std::string kind() const override { return "quad"; }
  const Vec& target(NodeId i) const { return targets_[i]; }
  const Vec& lower(NodeId i) const { return lower_[i]; }
  const Vec& upper(NodeId i) const { return upper_[i]; }

  double local_value(NodeId i, const Vec& x) const override;
  Vec local_subgradient(NodeId i, const Vec& x) const override;
  Vec project(NodeId i, const Vec& x) const override;
  Vec project_intersection(const Vec& x) const override;
  double constraint_violation(NodeId i, const Vec& x) const override;
  std::optional<Vec> exact_block_minimizer(NodeId i, const Vec& c, double q) const override;

  bool has_composite() const override { return true; }
  double smooth_value(NodeId i, const Vec& x) const override { return local_value(i, x); }
  Vec smooth_gradient(NodeId i, const Vec& x) const override { return local_subgradient(i, x); }
  double smooth_lipschitz(NodeId) const override { return 2.0; }
  Vec l1_weights(NodeId) const override { return Vec::Zero(dim()); }
  Vec prox_local(NodeId i, const Vec& z, double) const override { return project(i, z); }
  Vec prox_intersection(const Vec& z, double) const override { return project_intersection(z); }

  /// Closed-form solution of the full problem (separable strictly convex
  /// quadratic over the intersected box).
  Vec analytic_optimum() const;

  double value_flops(NodeId) const override { return 3.0 * dim(); }
  double subgradient_flops(NodeId) const override { return 2.0 * dim(); }
  double projection_flops(NodeId) const override { return 2.0 * dim(); }

  void write(std::ostream& os) const override;

 private:
  std::vector<Vec> targets_;
  std::vector<Vec> lower_;
  std::vector<Vec> upper_;
  Vec lo_cap_;
  Vec hi_cap_;
};

/// l1-regularized logistic regression split over nodes. The variable is the
/// stacked (w, v) of size features + 1; node i holds its samples, an equal
/// share lambda / N of the l1 penalty, and the set {|w|^2 <= k_i, |v| <= k'_i}.
class LogReg final : public Problem {
 public:
  struct NodeData {
    Eigen::MatrixXd features;  // samples x features
    Eigen::VectorXd labels;    // +-1
    double ball = 0.0;         // k_i, bound on w'w
    double offset_bound = 0.0; // k'_i, bound on |v|
  };

  LogReg(std::vector<NodeData> nodes, double lambda, double lambda_max = 0.0);

  std::string kind() const override { return "logreg"; }
  int features() const { return dim() - 1; }
  double lambda() const { return lambda_; }
  double lambda_max() const { return lambda_max_; }
  const NodeData& node(NodeId i) const { return data_[i]; }

  double local_value(NodeId i, const Vec& x) const override;
  Vec local_subgradient(NodeId i, const Vec& x) const override;
  Vec project(NodeId i, const Vec& x) const override;
  Vec project_intersection(const Vec& x) const override;
  double constraint_violation(NodeId i, const Vec& x) const override;

  bool has_composite() const override { return true; }
  double smooth_value(NodeId i, const Vec& x) const override;
  Vec smooth_gradient(NodeId i, const Vec& x) const override;
  double smooth_lipschitz(NodeId i) const override;
  Vec l1_weights(NodeId i) const override;
  Vec prox_local(NodeId i, const Vec& z, double t) const override;
  Vec prox_intersection(const Vec& z, double t) const override;

  double value_flops(NodeId i) const override;
  double subgradient_flops(NodeId i) const override;

  void write(std::ostream& os) const override;

 private:
  Vec prox_ball_box(const Vec& z, double thresh, double ball, double box) const;

  std::vector<NodeData> data_;
  double lambda_;
  double lambda_max_;
};

struct LogRegParams {
  int nodes = 20;
  int features = 20;
  int samples = 5;
  double noise_var = 0.1;
  double sparsity = 0.6;  // fraction of zero entries
  std::uint64_t seed = 0;
  double lambda_ratio = 0.5;  // lambda = ratio * lambda_max
  /// Overrides for the generating truth.
  std::optional<Vec> w_true;
  std::optional<double> v_true;
  int reference_budget = 20000;
};

/// Synthetic instance: sparse Gaussian features and truth, noisy sign
/// labels, lambda = ratio * lambda_max, and constraint radii scaled from an
/// unconstrained reference solve by (1 + U[0,1]).
std::unique_ptr<LogReg> gen_logreg(const LogRegParams& params);

/// Smallest l1 weight for which w = 0 is optimal (offset optimized).
double logreg_lambda_max(const std::vector<LogReg::NodeData>& nodes);

std::unique_ptr<Problem> read_problem(std::istream& is);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& text);

double eval_global(const Problem& p, const Vec& x);

/// (1/N) sum_i (f(x_i) - f_star).
double err_f(const Problem& p, const std::vector<Vec>& estimates, double f_star);

enum class OracleMethod { Auto, Subgradient, Composite };

struct OracleOptions {
  long budget = 100000;
  OracleMethod method = OracleMethod::Auto;
  double step_scale = 1.0;  // c in the c / sqrt(k) subgradient step
  int projection_sweeps = 50;
  double projection_tol = 1e-10;
};

struct OracleResult {
  Vec x;
  double f_star = 0.0;
  long iterations = 0;
  bool converged = true;  // false: best value still improving at budget end
  std::string method;
  std::vector<double> best_values;  // running best, subgradient path only
};

/// Centralized reference solve of the full problem.
///
/// Subgradient: projected subgradient with normalized step c/sqrt(k) and
/// best-iterate tracking, projecting onto the intersection by cyclic
/// projections. Composite: accelerated proximal gradient with adaptive
/// restart, used when the instance has a composite split.
OracleResult centralized_oracle(const Problem& p, const OracleOptions& options = {});

}  // namespace algossip
