#include "algossip/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "algossip/errors.hpp"

namespace algossip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + exp(-z)) without overflow
double softplus_neg(double z) { return std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// 1 / (1 + exp(z))
double sigmoid_neg(double z) {
  if (z >= 0) {
    double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double sign0(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_vec(std::ostream& os, const char* key, const Vec& v) {
  os << key;
  for (Eigen::Index k = 0; k < v.size(); ++k) os << ' ' << fmt(v[k]);
  os << '\n';
}

/// Whitespace tokenizer over a text stream that skips '#' comments.
class Tokens {
 public:
  explicit Tokens(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) toks_.push_back(tok);
    }
  }
  bool done() const { return pos_ >= toks_.size(); }
  std::string word() {
    if (done()) throw ConfigError("unexpected end of instance file", "problem");
    return toks_[pos_++];
  }
  void expect(const std::string& key) {
    auto w = word();
    if (w != key) throw ConfigError("expected '" + key + "', got '" + w + "'", "problem");
  }
  double number() {
    auto w = word();
    char* end = nullptr;
    double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0') throw ConfigError("bad number '" + w + "'", "problem");
    return v;
  }
  int integer() { return static_cast<int>(number()); }
  Vec vec(int n) {
    Vec v(n);
    for (int k = 0; k < n; ++k) v[k] = number();
    return v;
  }

 private:
  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------- Problem

Problem::Problem(int nodes, int dim) : nodes_(nodes), dim_(dim) {
  if (nodes < 1 || dim < 1) throw DomainError("problem needs at least one node and dimension");
}

double Problem::global_value(const Vec& x) const {
  double f = 0.0;
  for (NodeId i = 0; i < nodes_; ++i) f += local_value(i, x);
  return f;
}

Vec Problem::global_subgradient(const Vec& x) const {
  Vec g = Vec::Zero(dim_);
  for (NodeId i = 0; i < nodes_; ++i) g += local_subgradient(i, x);
  return g;
}

double Problem::smooth_value(NodeId, const Vec&) const {
  throw KindError(kind() + ": no composite structure");
}
Vec Problem::smooth_gradient(NodeId, const Vec&) const {
  throw KindError(kind() + ": no composite structure");
}
double Problem::smooth_lipschitz(NodeId) const {
  throw KindError(kind() + ": no composite structure");
}
Vec Problem::l1_weights(NodeId) const { throw KindError(kind() + ": no composite structure"); }
Vec Problem::prox_local(NodeId, const Vec&, double) const {
  throw KindError(kind() + ": no composite structure");
}
Vec Problem::prox_intersection(const Vec&, double) const {
  throw KindError(kind() + ": no composite structure");
}

std::string sha256_hex(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned k = 0; k < len; ++k) {
    out.push_back(hex[md[k] >> 4]);
    out.push_back(hex[md[k] & 15]);
  }
  return out;
}

std::string Problem::digest() const {
  std::ostringstream os;
  write(os);
  return sha256_hex(os.str());
}

double eval_global(const Problem& p, const Vec& x) { return p.global_value(x); }

double err_f(const Problem& p, const std::vector<Vec>& estimates, double f_star) {
  if (estimates.empty()) return 0.0;
  double total = 0.0;
  for (const auto& x : estimates) total += p.global_value(x) - f_star;
  return total / static_cast<double>(estimates.size());
}

// ---------------------------------------------------------------- QuadConsensus

QuadConsensus::QuadConsensus(std::vector<Vec> targets, std::vector<Vec> lower,
                             std::vector<Vec> upper)
    : Problem(static_cast<int>(targets.size()),
              targets.empty() ? 0 : static_cast<int>(targets.front().size())),
      targets_(std::move(targets)),
      lower_(std::move(lower)),
      upper_(std::move(upper)) {
  const int n = num_nodes(), m = dim();
  for (const auto& a : targets_)
    if (a.size() != m) throw DomainError("quad: targets must share one dimension");
  if (lower_.empty()) lower_.assign(n, Vec::Constant(m, -kInf));
  if (upper_.empty()) upper_.assign(n, Vec::Constant(m, kInf));
  if (static_cast<int>(lower_.size()) != n || static_cast<int>(upper_.size()) != n)
    throw DomainError("quad: one box per node");
  lo_cap_ = Vec::Constant(m, -kInf);
  hi_cap_ = Vec::Constant(m, kInf);
  for (int i = 0; i < n; ++i) {
    if (lower_[i].size() != m || upper_[i].size() != m) throw DomainError("quad: box dimension");
    if ((lower_[i].array() > upper_[i].array()).any()) throw DomainError("quad: empty box");
    lo_cap_ = lo_cap_.cwiseMax(lower_[i]);
    hi_cap_ = hi_cap_.cwiseMin(upper_[i]);
  }
  if ((lo_cap_.array() > hi_cap_.array()).any())
    throw DomainError("quad: constraint sets have empty intersection");
}

double QuadConsensus::local_value(NodeId i, const Vec& x) const {
  return (x - targets_[i]).squaredNorm();
}

Vec QuadConsensus::local_subgradient(NodeId i, const Vec& x) const {
  return 2.0 * (x - targets_[i]);
}

Vec QuadConsensus::project(NodeId i, const Vec& x) const {
  return x.cwiseMax(lower_[i]).cwiseMin(upper_[i]);
}

Vec QuadConsensus::project_intersection(const Vec& x) const {
  return x.cwiseMax(lo_cap_).cwiseMin(hi_cap_);
}

double QuadConsensus::constraint_violation(NodeId i, const Vec& x) const {
  double v = 0.0;
  for (int k = 0; k < dim(); ++k)
    v = std::max({v, lower_[i][k] - x[k], x[k] - upper_[i][k]});
  return v;
}

std::optional<Vec> QuadConsensus::exact_block_minimizer(NodeId i, const Vec& c, double q) const {
  // separable strictly convex quadratic: clamp of the stationary point is exact
  Vec x = (2.0 * targets_[i] - c) / (2.0 + q);
  return project(i, x);
}

Vec QuadConsensus::analytic_optimum() const {
  Vec mean = Vec::Zero(dim());
  for (const auto& a : targets_) mean += a;
  mean /= static_cast<double>(num_nodes());
  return project_intersection(mean);
}

void QuadConsensus::write(std::ostream& os) const {
  os << "kind quad\nnodes " << num_nodes() << "\ndim " << dim() << '\n';
  for (int i = 0; i < num_nodes(); ++i) {
    os << "node " << i << '\n';
    write_vec(os, "target", targets_[i]);
    write_vec(os, "lower", lower_[i]);
    write_vec(os, "upper", upper_[i]);
  }
}

// ---------------------------------------------------------------- LogReg

LogReg::LogReg(std::vector<NodeData> nodes, double lambda, double lambda_max)
    : Problem(static_cast<int>(nodes.size()),
              nodes.empty() ? 0 : static_cast<int>(nodes.front().features.cols()) + 1),
      data_(std::move(nodes)),
      lambda_(lambda),
      lambda_max_(lambda_max) {
  if (!(lambda >= 0.0)) throw DomainError("logreg: lambda must be nonnegative");
  for (const auto& d : data_) {
    if (d.features.cols() != features()) throw DomainError("logreg: feature dimension mismatch");
    if (d.labels.size() != d.features.rows()) throw DomainError("logreg: one label per sample");
    for (Eigen::Index j = 0; j < d.labels.size(); ++j)
      if (d.labels[j] != 1.0 && d.labels[j] != -1.0) throw DomainError("logreg: labels are +-1");
    if (!(d.ball > 0.0) || !(d.offset_bound > 0.0))
      throw DomainError("logreg: constraint radii must be positive");
  }
}

double LogReg::smooth_value(NodeId i, const Vec& x) const {
  const auto& d = data_[i];
  const int m = features();
  Vec z = d.features * x.head(m);
  double f = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) f += softplus_neg(d.labels[j] * (z[j] + x[m]));
  return f;
}

Vec LogReg::smooth_gradient(NodeId i, const Vec& x) const {
  const auto& d = data_[i];
  const int m = features();
  Vec z = d.features * x.head(m);
  Vec coef(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j)
    coef[j] = -d.labels[j] * sigmoid_neg(d.labels[j] * (z[j] + x[m]));
  Vec g(dim());
  g.head(m) = d.features.transpose() * coef;
  g[m] = coef.sum();
  return g;
}

double LogReg::smooth_lipschitz(NodeId i) const {
  const auto& d = data_[i];
  return 0.25 * (d.features.squaredNorm() + static_cast<double>(d.features.rows()));
}

Vec LogReg::l1_weights(NodeId) const {
  Vec w = Vec::Constant(dim(), lambda_ / num_nodes());
  w[features()] = 0.0;
  return w;
}

double LogReg::local_value(NodeId i, const Vec& x) const {
  return smooth_value(i, x) + lambda_ / num_nodes() * x.head(features()).lpNorm<1>();
}

Vec LogReg::local_subgradient(NodeId i, const Vec& x) const {
  Vec g = smooth_gradient(i, x);
  const double share = lambda_ / num_nodes();
  for (int k = 0; k < features(); ++k) g[k] += share * sign0(x[k]);
  return g;
}

Vec LogReg::prox_ball_box(const Vec& z, double thresh, double ball, double box) const {
  const int m = features();
  Vec x(dim());
  for (int k = 0; k < m; ++k) x[k] = soft_threshold(z[k], thresh);
  // soft-threshold then radial shrink is the exact prox of l1 + l2 ball
  double n2 = x.head(m).squaredNorm();
  if (n2 > ball) x.head(m) *= std::sqrt(ball / n2);
  x[m] = std::clamp(z[m], -box, box);
  return x;
}

Vec LogReg::project(NodeId i, const Vec& x) const {
  return prox_ball_box(x, 0.0, data_[i].ball, data_[i].offset_bound);
}

Vec LogReg::project_intersection(const Vec& x) const { return prox_intersection(x, 0.0); }

Vec LogReg::prox_local(NodeId i, const Vec& z, double t) const {
  return prox_ball_box(z, t * lambda_ / num_nodes(), data_[i].ball, data_[i].offset_bound);
}

Vec LogReg::prox_intersection(const Vec& z, double t) const {
  double ball = kInf, box = kInf;
  for (const auto& d : data_) {
    ball = std::min(ball, d.ball);
    box = std::min(box, d.offset_bound);
  }
  return prox_ball_box(z, t * lambda_, ball, box);
}

double LogReg::constraint_violation(NodeId i, const Vec& x) const {
  const auto& d = data_[i];
  double wn = x.head(features()).norm();
  return std::max({0.0, wn - std::sqrt(d.ball), std::abs(x[features()]) - d.offset_bound});
}

double LogReg::value_flops(NodeId i) const {
  const double m = features();
  return static_cast<double>(data_[i].features.rows()) * (8.0 * m + 40.0) + 2.0 * m;
}

double LogReg::subgradient_flops(NodeId i) const { return value_flops(i) + 2.0 * features(); }

void LogReg::write(std::ostream& os) const {
  os << "kind logreg\nnodes " << num_nodes() << "\nfeatures " << features() << '\n';
  os << "lambda " << fmt(lambda_) << "\nlambda_max " << fmt(lambda_max_) << '\n';
  for (int i = 0; i < num_nodes(); ++i) {
    const auto& d = data_[i];
    os << "node " << i << " samples " << d.features.rows() << " ball " << fmt(d.ball)
       << " offset " << fmt(d.offset_bound) << '\n';
    for (Eigen::Index j = 0; j < d.features.rows(); ++j) {
      os << "sample " << fmt(d.labels[j]);
      for (Eigen::Index k = 0; k < d.features.cols(); ++k) os << ' ' << fmt(d.features(j, k));
      os << '\n';
    }
  }
}

double logreg_lambda_max(const std::vector<LogReg::NodeData>& nodes) {
  double pos = 0, neg = 0;
  for (const auto& d : nodes)
    for (Eigen::Index j = 0; j < d.labels.size(); ++j) (d.labels[j] > 0 ? pos : neg) += 1.0;
  if (pos == 0 || neg == 0) return 0.0;  // offset alone drives the loss to zero
  const double v0 = std::log(pos / neg);
  Vec grad = Vec::Zero(nodes.front().features.cols());
  for (const auto& d : nodes)
    for (Eigen::Index j = 0; j < d.labels.size(); ++j)
      grad -= d.labels[j] * sigmoid_neg(d.labels[j] * v0) * d.features.row(j).transpose();
  return grad.lpNorm<Eigen::Infinity>();
}

std::unique_ptr<LogReg> gen_logreg(const LogRegParams& p) {
  if (p.nodes < 1 || p.features < 1 || p.samples < 1)
    throw DomainError("gen_logreg: counts must be >= 1");
  if (!(p.noise_var >= 0.0)) throw DomainError("gen_logreg: noise variance must be >= 0");
  Rng rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution nonzero(1.0 - p.sparsity);
  auto sparse_normal = [&]() { return nonzero(rng) ? normal(rng) : 0.0; };

  Vec w_true(p.features);
  for (int k = 0; k < p.features; ++k) w_true[k] = sparse_normal();
  double v_true = normal(rng);
  if (p.w_true) {
    if (p.w_true->size() != p.features) throw DomainError("gen_logreg: w_true dimension");
    w_true = *p.w_true;
  }
  if (p.v_true) v_true = *p.v_true;
  const double noise_sd = std::sqrt(p.noise_var);

  std::vector<LogReg::NodeData> nodes(p.nodes);
  for (auto& d : nodes) {
    d.features.resize(p.samples, p.features);
    d.labels.resize(p.samples);
    for (int j = 0; j < p.samples; ++j) {
      for (int k = 0; k < p.features; ++k) d.features(j, k) = sparse_normal();
      double eps = noise_sd > 0 ? noise_sd * normal(rng) : 0.0;
      double score = d.features.row(j).dot(w_true) + v_true + eps;
      d.labels[j] = score >= 0 ? 1.0 : -1.0;
    }
    d.ball = kInf;
    d.offset_bound = kInf;
  }
  const double lambda_max = logreg_lambda_max(nodes);
  const double lambda = p.lambda_ratio * lambda_max;

  // unconstrained reference solution sets the private radii
  LogReg free_problem(nodes, lambda, lambda_max);
  OracleOptions ref;
  ref.budget = p.reference_budget;
  ref.method = OracleMethod::Composite;
  Vec ref_x = centralized_oracle(free_problem, ref).x;
  const double w2 = ref_x.head(p.features).squaredNorm();
  const double v_abs = std::abs(ref_x[p.features]);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& d : nodes) {
    d.ball = std::max((1.0 + unit(rng)) * w2, 1e-6);
    d.offset_bound = std::max((1.0 + unit(rng)) * v_abs, 1e-6);
  }
  return std::make_unique<LogReg>(std::move(nodes), lambda, lambda_max);
}

std::unique_ptr<Problem> read_problem(std::istream& is) {
  Tokens t(is);
  t.expect("kind");
  const std::string kind = t.word();
  if (kind == "quad") {
    t.expect("nodes");
    int n = t.integer();
    t.expect("dim");
    int m = t.integer();
    std::vector<Vec> a(n), lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      t.expect("node");
      if (t.integer() != i) throw ConfigError("nodes out of order", "problem");
      t.expect("target");
      a[i] = t.vec(m);
      t.expect("lower");
      lo[i] = t.vec(m);
      t.expect("upper");
      hi[i] = t.vec(m);
    }
    return std::make_unique<QuadConsensus>(std::move(a), std::move(lo), std::move(hi));
  }
  if (kind == "logreg") {
    t.expect("nodes");
    int n = t.integer();
    t.expect("features");
    int m = t.integer();
    t.expect("lambda");
    double lambda = t.number();
    t.expect("lambda_max");
    double lambda_max = t.number();
    std::vector<LogReg::NodeData> nodes(n);
    for (int i = 0; i < n; ++i) {
      auto& d = nodes[i];
      t.expect("node");
      if (t.integer() != i) throw ConfigError("nodes out of order", "problem");
      t.expect("samples");
      int s = t.integer();
      t.expect("ball");
      d.ball = t.number();
      t.expect("offset");
      d.offset_bound = t.number();
      d.features.resize(s, m);
      d.labels.resize(s);
      for (int j = 0; j < s; ++j) {
        t.expect("sample");
        d.labels[j] = t.number();
        for (int k = 0; k < m; ++k) d.features(j, k) = t.number();
      }
    }
    return std::make_unique<LogReg>(std::move(nodes), lambda, lambda_max);
  }
  throw ConfigError("unknown problem kind '" + kind + "'", "problem");
}

// ---------------------------------------------------------------- oracle

namespace {

Vec cyclic_projection(const Problem& p, Vec x, int sweeps, double tol) {
  for (int s = 0; s < sweeps; ++s) {
    Vec prev = x;
    for (NodeId i = 0; i < p.num_nodes(); ++i) x = p.project(i, x);
    if ((x - prev).norm() <= tol) break;
  }
  return x;
}

OracleResult subgradient_oracle(const Problem& p, const OracleOptions& o) {
  OracleResult r;
  r.method = "subgradient";
  Vec x = cyclic_projection(p, Vec::Zero(p.dim()), o.projection_sweeps, o.projection_tol);
  r.x = x;
  r.f_star = p.global_value(x);
  r.best_values.reserve(static_cast<std::size_t>(o.budget));
  for (long k = 1; k <= o.budget; ++k) {
    Vec g = p.global_subgradient(x);
    double gn = g.norm();
    if (gn == 0.0) {
      r.best_values.push_back(r.f_star);
      r.iterations = k;
      break;
    }
    x = cyclic_projection(p, x - (o.step_scale / std::sqrt(static_cast<double>(k)) / gn) * g,
                          o.projection_sweeps, o.projection_tol);
    double f = p.global_value(x);
    if (f < r.f_star) {
      r.f_star = f;
      r.x = x;
    }
    r.best_values.push_back(r.f_star);
    r.iterations = k;
  }
  const long n = static_cast<long>(r.best_values.size());
  const long window = std::max(1L, n / 10);
  if (n > window) {
    double rate = (r.best_values[n - 1 - window] - r.best_values[n - 1]) / window;
    r.converged = rate <= 1e-8;
  }
  return r;
}

double composite_value(const Problem& p, const Vec& x, const Vec& l1) {
  double f = l1.cwiseProduct(x.cwiseAbs()).sum();
  for (NodeId i = 0; i < p.num_nodes(); ++i) f += p.smooth_value(i, x);
  return f;
}

OracleResult composite_oracle(const Problem& p, const OracleOptions& o) {
  OracleResult r;
  r.method = "composite";
  double lip = 0.0;
  Vec l1 = Vec::Zero(p.dim());
  for (NodeId i = 0; i < p.num_nodes(); ++i) {
    lip += p.smooth_lipschitz(i);
    l1 += p.l1_weights(i);
  }
  const double step = 1.0 / lip;
  auto grad = [&](const Vec& y) {
    Vec g = Vec::Zero(p.dim());
    for (NodeId i = 0; i < p.num_nodes(); ++i) g += p.smooth_gradient(i, y);
    return g;
  };

  Vec x = p.prox_intersection(Vec::Zero(p.dim()), 0.0);
  double fx = composite_value(p, x, l1);
  Vec y = x;
  double t = 1.0;
  int still = 0;
  long k = 1;
  for (; k <= o.budget; ++k) {
    Vec xn = p.prox_intersection(y - step * grad(y), step);
    double fn = composite_value(p, xn, l1);
    if (fn > fx) {
      // function-value restart: drop momentum and retry from x
      if (t == 1.0) break;  // plain proximal step failed to descend: at rounding floor
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
    still = moved <= 1e-14 * (1.0 + x.norm()) ? still + 1 : 0;
    if (still >= 5) break;
  }
  r.x = x;
  r.f_star = p.global_value(x);
  r.iterations = std::min(k, o.budget);
  r.converged = k <= o.budget;
  return r;
}

}  // namespace

OracleResult centralized_oracle(const Problem& p, const OracleOptions& options) {
  if (options.budget < 1) throw DomainError("oracle budget must be >= 1");
  OracleMethod method = options.method;
  if (method == OracleMethod::Auto)
    method = p.has_composite() ? OracleMethod::Composite : OracleMethod::Subgradient;
  if (method == OracleMethod::Composite) {
    if (!p.has_composite()) throw KindError(p.kind() + ": composite oracle unavailable");
    return composite_oracle(p, options);
  }
  return subgradient_oracle(p, options);
}

}  // namespace algossip
