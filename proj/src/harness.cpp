#include "algossip/harness.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "algossip/errors.hpp"

namespace algossip {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ALG: return "ALG";
    case Algorithm::ALMG: return "ALMG";
    case Algorithm::ALBG: return "ALBG";
    case Algorithm::PS: return "PS";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  up.erase(std::remove(up.begin(), up.end(), '-'), up.end());
  if (up == "ALG") return Algorithm::ALG;
  if (up == "ALMG") return Algorithm::ALMG;
  if (up == "ALBG") return Algorithm::ALBG;
  if (up == "PS") return Algorithm::PS;
  throw ConfigError("unknown algorithm '" + name + "'", "algo.name");
}

namespace {

// ---------------------------------------------------------------- text helpers

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("expected a number, got '" + text + "'", key);
  return v;
}

long to_long(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0' || errno == ERANGE)
    throw ConfigError("expected an integer, got '" + text + "'", key);
  return v;
}

std::uint64_t to_seed(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || *end != '\0' || errno == ERANGE)
    throw ConfigError("expected a nonnegative integer, got '" + text + "'", key);
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("expected a boolean, got '" + text + "'", key);
}

std::vector<double> to_list(const std::string& key, const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, sep))
    if (!trim(cell).empty()) out.push_back(to_double(key, cell));
  return out;
}

// "1,2;3,4" -> one vector per node.
std::vector<Vec> to_vectors(const std::string& key, const std::string& text) {
  std::vector<Vec> out;
  std::stringstream ss(text);
  std::string node;
  while (std::getline(ss, node, ';')) {
    if (trim(node).empty()) continue;
    std::vector<double> v = to_list(key, node, ',');
    out.push_back(Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + num(v[k]);
  return s;
}

std::string from_vectors(const std::vector<Vec>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ';';
    for (Eigen::Index k = 0; k < vs[i].size(); ++k) s += (k ? "," : "") + num(vs[i][k]);
  }
  return s;
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"problem",
       {"kind", "file", "targets", "lower", "upper", "nodes", "features", "samples", "noise_var",
        "sparsity", "seed", "lambda_ratio", "reference_budget", "f_star", "oracle_budget",
        "oracle_method", "oracle_step"}},
      {"graph", {"kind", "nodes", "radius", "seed", "file", "failures", "success", "scale"}},
      {"algo",
       {"name", "schedule", "rho", "a", "b", "k", "c", "kappa", "sigma", "outer", "inner",
        "inner_tol", "solver", "solver_budget", "solver_tol", "closed_form", "alpha", "alpha_grid",
        "alpha_target"}},
      {"run", {"seed", "checkpoint_stride", "err_stop", "oracle_cache"}},
  };
  return keys;
}

std::string oracle_method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::Auto: return "auto";
    case OracleMethod::Subgradient: return "subgradient";
    case OracleMethod::Composite: return "composite";
  }
  return "?";
}

OracleMethod parse_oracle_method(const std::string& s) {
  if (s == "auto") return OracleMethod::Auto;
  if (s == "subgradient") return OracleMethod::Subgradient;
  if (s == "composite") return OracleMethod::Composite;
  throw ConfigError("unknown oracle method '" + s + "'", "problem.oracle_method");
}

PenaltyKind parse_penalty_kind(const std::string& s) {
  if (s == "fixed") return PenaltyKind::Fixed;
  if (s == "power") return PenaltyKind::Power;
  if (s == "geometric") return PenaltyKind::Geometric;
  if (s == "adaptive") return PenaltyKind::Adaptive;
  throw ConfigError("unknown penalty schedule '" + s + "'", "algo.schedule");
}

Variant to_variant(Algorithm a) {
  switch (a) {
    case Algorithm::ALG: return Variant::ALG;
    case Algorithm::ALMG: return Variant::ALMG;
    case Algorithm::ALBG: return Variant::ALBG;
    case Algorithm::PS: break;
  }
  throw KindError("PS is not an augmented-Lagrangian variant");
}

fs::path resolve(const fs::path& base, const std::string& file) {
  fs::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string graph_text(const Supergraph& g, const FailureModel& f) {
  std::ostringstream os;
  write_graph(os, g, f);
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- config

std::map<std::string, std::string> RunConfig::canonical() const {
  std::map<std::string, std::string> m;
  const auto& p = problem;
  m["problem.kind"] = p.kind;
  if (p.kind == "file") m["problem.file"] = p.file;
  if (p.kind == "quad") {
    m["problem.targets"] = from_vectors(p.targets);
    m["problem.lower"] = from_vectors(p.lower);
    m["problem.upper"] = from_vectors(p.upper);
  }
  if (p.kind == "logreg") {
    m["problem.nodes"] = std::to_string(p.logreg.nodes);
    m["problem.features"] = std::to_string(p.logreg.features);
    m["problem.samples"] = std::to_string(p.logreg.samples);
    m["problem.noise_var"] = num(p.logreg.noise_var);
    m["problem.sparsity"] = num(p.logreg.sparsity);
    m["problem.seed"] = std::to_string(p.logreg.seed);
    m["problem.lambda_ratio"] = num(p.logreg.lambda_ratio);
    m["problem.reference_budget"] = std::to_string(p.logreg.reference_budget);
  }
  m["problem.f_star"] = p.f_star ? num(*p.f_star) : "oracle";
  m["problem.oracle_budget"] = std::to_string(p.oracle.budget);
  m["problem.oracle_method"] = oracle_method_name(p.oracle.method);
  m["problem.oracle_step"] = num(p.oracle.step_scale);

  m["graph.kind"] = graph.kind;
  m["graph.nodes"] = std::to_string(graph.nodes);
  if (graph.kind == "geometric") {
    m["graph.radius"] = num(graph.radius);
    m["graph.seed"] = std::to_string(graph.seed);
  }
  if (graph.kind == "file") m["graph.file"] = graph.file;
  m["graph.failures"] = graph.failures;
  if (graph.failures == "uniform") m["graph.success"] = num(graph.success);
  if (graph.failures == "geometric") m["graph.scale"] = num(graph.scale);

  const auto& a = algo;
  m["algo.name"] = to_string(a.algorithm);
  m["algo.schedule"] = to_string(a.schedule.kind);
  m["algo.rho"] = num(a.schedule.rho);
  m["algo.a"] = num(a.schedule.a);
  m["algo.b"] = num(a.schedule.b);
  m["algo.k"] = num(a.schedule.k);
  m["algo.c"] = num(a.schedule.c);
  m["algo.kappa"] = num(a.schedule.kappa);
  m["algo.sigma"] = num(a.schedule.sigma);
  m["algo.outer"] = std::to_string(a.outer);
  m["algo.inner"] = std::to_string(a.inner);
  m["algo.inner_tol"] = num(a.inner_tol);
  m["algo.solver"] = a.solver.method == InnerMethod::Proximal ? "proximal" : "subgradient";
  m["algo.solver_budget"] = std::to_string(a.solver.budget);
  m["algo.solver_tol"] = num(a.solver.tol);
  m["algo.closed_form"] = a.solver.use_closed_form ? "true" : "false";
  m["algo.alpha"] = num(a.alpha);
  m["algo.alpha_grid"] = from_list(a.alpha_grid);
  m["algo.alpha_target"] = num(a.alpha_target);

  m["run.seed"] = std::to_string(seed);
  m["run.checkpoint_stride"] = std::to_string(checkpoint_stride);
  m["run.err_stop"] = err_stop ? num(*err_stop) : "none";
  return m;
}

std::string RunConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : canonical()) text += k + "=" + v + "\n";
  return sha256_hex(text);
}

RunConfig parse_config(std::istream& is, const fs::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message() + " (line " + std::to_string(e.line()) + ")", "config");
  }

  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key outside of any section", section);
    auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) throw ConfigError("unknown section", "[" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key", section + "." + key);
      kv[section + "." + key] = trim(value.data());
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  RunConfig c;
  c.base_dir = base_dir;
  auto& p = c.problem;
  if (auto v = get("problem.kind")) p.kind = *v;
  if (p.kind != "quad" && p.kind != "logreg" && p.kind != "file")
    throw ConfigError("unknown problem kind '" + p.kind + "'", "problem.kind");
  if (auto v = get("problem.file")) p.file = *v;
  if (auto v = get("problem.targets")) p.targets = to_vectors("problem.targets", *v);
  if (auto v = get("problem.lower")) p.lower = to_vectors("problem.lower", *v);
  if (auto v = get("problem.upper")) p.upper = to_vectors("problem.upper", *v);
  if (auto v = get("problem.nodes")) p.logreg.nodes = static_cast<int>(to_long("problem.nodes", *v));
  if (auto v = get("problem.features"))
    p.logreg.features = static_cast<int>(to_long("problem.features", *v));
  if (auto v = get("problem.samples"))
    p.logreg.samples = static_cast<int>(to_long("problem.samples", *v));
  if (auto v = get("problem.noise_var")) p.logreg.noise_var = to_double("problem.noise_var", *v);
  if (auto v = get("problem.sparsity")) p.logreg.sparsity = to_double("problem.sparsity", *v);
  if (auto v = get("problem.seed")) p.logreg.seed = to_seed("problem.seed", *v);
  if (auto v = get("problem.lambda_ratio"))
    p.logreg.lambda_ratio = to_double("problem.lambda_ratio", *v);
  if (auto v = get("problem.reference_budget"))
    p.logreg.reference_budget = static_cast<int>(to_long("problem.reference_budget", *v));
  if (auto v = get("problem.f_star")) p.f_star = to_double("problem.f_star", *v);
  if (auto v = get("problem.oracle_budget")) p.oracle.budget = to_long("problem.oracle_budget", *v);
  if (auto v = get("problem.oracle_method")) p.oracle.method = parse_oracle_method(*v);
  if (auto v = get("problem.oracle_step")) p.oracle.step_scale = to_double("problem.oracle_step", *v);

  auto& g = c.graph;
  if (auto v = get("graph.kind")) g.kind = *v;
  if (auto v = get("graph.nodes")) g.nodes = static_cast<int>(to_long("graph.nodes", *v));
  if (auto v = get("graph.radius")) g.radius = to_double("graph.radius", *v);
  if (auto v = get("graph.seed")) g.seed = to_seed("graph.seed", *v);
  if (auto v = get("graph.file")) g.file = *v;
  if (auto v = get("graph.failures")) g.failures = *v;
  if (auto v = get("graph.success")) g.success = to_double("graph.success", *v);
  if (auto v = get("graph.scale")) g.scale = to_double("graph.scale", *v);

  auto& a = c.algo;
  if (auto v = get("algo.name")) a.algorithm = parse_algorithm(*v);
  PenaltySchedule& s = a.schedule;
  if (auto v = get("algo.schedule")) s.kind = parse_penalty_kind(*v);
  if (auto v = get("algo.rho")) s.rho = to_double("algo.rho", *v);
  if (auto v = get("algo.a")) s.a = to_double("algo.a", *v);
  if (auto v = get("algo.b")) s.b = to_double("algo.b", *v);
  if (auto v = get("algo.k")) s.k = to_double("algo.k", *v);
  if (auto v = get("algo.c")) s.c = to_double("algo.c", *v);
  if (auto v = get("algo.kappa")) s.kappa = to_double("algo.kappa", *v);
  if (auto v = get("algo.sigma")) s.sigma = to_double("algo.sigma", *v);
  if (auto v = get("algo.outer")) a.outer = static_cast<int>(to_long("algo.outer", *v));
  if (auto v = get("algo.inner")) a.inner = to_long("algo.inner", *v);
  if (auto v = get("algo.inner_tol")) a.inner_tol = to_double("algo.inner_tol", *v);
  if (auto v = get("algo.solver")) {
    if (*v == "subgradient")
      a.solver.method = InnerMethod::Subgradient;
    else if (*v == "proximal")
      a.solver.method = InnerMethod::Proximal;
    else
      throw ConfigError("unknown inner solver '" + *v + "'", "algo.solver");
  }
  if (auto v = get("algo.solver_budget"))
    a.solver.budget = static_cast<int>(to_long("algo.solver_budget", *v));
  if (auto v = get("algo.solver_tol")) a.solver.tol = to_double("algo.solver_tol", *v);
  if (auto v = get("algo.closed_form")) a.solver.use_closed_form = to_bool("algo.closed_form", *v);
  if (auto v = get("algo.alpha")) a.alpha = to_double("algo.alpha", *v);
  if (auto v = get("algo.alpha_grid")) a.alpha_grid = to_list("algo.alpha_grid", *v, ',');
  if (auto v = get("algo.alpha_target")) a.alpha_target = to_double("algo.alpha_target", *v);

  if (auto v = get("run.seed")) c.seed = to_seed("run.seed", *v);
  if (auto v = get("run.checkpoint_stride"))
    c.checkpoint_stride = to_long("run.checkpoint_stride", *v);
  if (auto v = get("run.err_stop")) c.err_stop = to_double("run.err_stop", *v);
  if (auto v = get("run.oracle_cache")) c.oracle_cache = *v;

  validate(c);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), "config");
  return parse_config(in, path.parent_path());
}

void validate(const RunConfig& c) {
  const auto& p = c.problem;
  if (p.kind == "file" && p.file.empty()) throw ConfigError("file problem needs a path", "problem.file");
  if (p.kind == "quad") {
    if (p.targets.empty()) throw ConfigError("quad problem needs targets", "problem.targets");
    if (!p.lower.empty() && p.lower.size() != p.targets.size())
      throw ConfigError("one lower bound per node", "problem.lower");
    if (!p.upper.empty() && p.upper.size() != p.targets.size())
      throw ConfigError("one upper bound per node", "problem.upper");
  }
  if (p.kind == "logreg") {
    const auto& l = p.logreg;
    if (l.nodes < 1) throw ConfigError("need at least one node", "problem.nodes");
    if (l.features < 1) throw ConfigError("need at least one feature", "problem.features");
    if (l.samples < 1) throw ConfigError("need at least one sample per node", "problem.samples");
    if (!(l.sparsity >= 0.0 && l.sparsity < 1.0))
      throw ConfigError("sparsity must lie in [0, 1)", "problem.sparsity");
    if (!(l.noise_var >= 0.0)) throw ConfigError("noise variance must be >= 0", "problem.noise_var");
    if (!(l.lambda_ratio >= 0.0))
      throw ConfigError("lambda ratio must be >= 0", "problem.lambda_ratio");
  }
  if (p.oracle.budget < 1) throw ConfigError("oracle budget must be >= 1", "problem.oracle_budget");

  const auto& g = c.graph;
  static const std::set<std::string> graph_kinds = {"geometric", "ring", "path", "complete", "file"};
  if (!graph_kinds.count(g.kind)) throw ConfigError("unknown graph kind '" + g.kind + "'", "graph.kind");
  if (g.kind == "file" && g.file.empty()) throw ConfigError("file graph needs a path", "graph.file");
  if (g.nodes < 0) throw ConfigError("node count must be >= 0", "graph.nodes");
  if (g.kind == "geometric" && !(g.radius > 0.0))
    throw ConfigError("radius must be positive", "graph.radius");
  static const std::set<std::string> failure_kinds = {"none", "uniform", "geometric", "file"};
  if (!failure_kinds.count(g.failures))
    throw ConfigError("unknown failure model '" + g.failures + "'", "graph.failures");
  if (g.failures == "geometric" && g.kind != "geometric")
    throw ConfigError("geometric failures need a geometric graph", "graph.failures");
  if (g.failures == "file" && g.kind != "file")
    throw ConfigError("file failures need a file graph", "graph.failures");
  if (g.failures == "uniform" && !(g.success > 0.0 && g.success <= 1.0))
    throw ConfigError("success probability must lie in (0, 1]", "graph.success");
  if (g.failures == "geometric" && !(g.scale > 0.0 && g.scale < 1.0))
    throw ConfigError("failure scale must lie in (0, 1)", "graph.scale");

  const auto& a = c.algo;
  if (a.algorithm == Algorithm::ALBG && g.failures != "none" &&
      !(g.failures == "uniform" && g.success == 1.0))
    throw ConfigError("AL-BG needs reliable links (failures = none)", "graph.failures");
  if (a.outer < 0) throw ConfigError("must be >= 0", "algo.outer");
  if (a.inner < 0) throw ConfigError("must be >= 0", "algo.inner");
  if (a.inner_tol < 0.0) throw ConfigError("must be >= 0", "algo.inner_tol");
  if (a.solver.budget < 1) throw ConfigError("must be >= 1", "algo.solver_budget");
  if (a.algorithm == Algorithm::PS) {
    if (!(a.alpha > 0.0)) throw ConfigError("PS step must be positive", "algo.alpha");
    for (double v : a.alpha_grid)
      if (!(v > 0.0)) throw ConfigError("PS steps must be positive", "algo.alpha_grid");
  } else {
    try {
      a.schedule.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what(), "algo.schedule");
    }
  }
  if (c.checkpoint_stride < 0) throw ConfigError("must be >= 0", "run.checkpoint_stride");
}

// ---------------------------------------------------------------- instance

Instance build_instance(const RunConfig& c) {
  Instance inst;
  const auto& p = c.problem;
  if (p.kind == "quad") {
    inst.problem = std::make_unique<QuadConsensus>(p.targets, p.lower, p.upper);
  } else if (p.kind == "logreg") {
    inst.problem = gen_logreg(p.logreg);
  } else {
    fs::path path = resolve(c.base_dir, p.file);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string(), "problem.file");
    inst.problem = read_problem(in);
  }
  const int n = inst.problem->num_nodes();
  const auto& g = c.graph;
  if (g.nodes != 0 && g.nodes != n)
    throw ConfigError("graph and problem node counts differ", "graph.nodes");

  std::optional<FailureModel> from_file;
  if (g.kind == "geometric") {
    inst.graph = build_geometric(n, g.radius, g.seed);
  } else if (g.kind == "ring") {
    inst.graph = make_ring(n);
  } else if (g.kind == "path") {
    inst.graph = make_path(n);
  } else if (g.kind == "complete") {
    inst.graph = make_complete(n);
  } else {
    fs::path path = resolve(c.base_dir, g.file);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string(), "graph.file");
    auto [graph, failures] = read_graph(in);
    if (graph.num_nodes() != n) throw ConfigError("graph and problem node counts differ", "graph.file");
    inst.graph = std::move(graph);
    from_file = std::move(failures);
  }
  if (!inst.graph.is_connected()) throw ConfigError("graph is not connected", "graph");

  if (g.failures == "none")
    inst.failures = FailureModel::always_on(inst.graph);
  else if (g.failures == "uniform")
    inst.failures = FailureModel::uniform(inst.graph, g.success);
  else if (g.failures == "geometric")
    inst.failures = FailureModel::geometric(inst.graph, g.radius, g.scale);
  else
    inst.failures = *from_file;
  if (c.algo.algorithm != Algorithm::PS)
    check_compatible(to_variant(c.algo.algorithm), inst.failures);

  inst.problem_digest = inst.problem->digest();
  inst.graph_digest = sha256_hex(graph_text(inst.graph, inst.failures));
  inst.hash = sha256_hex(inst.problem_digest + "\n" + inst.graph_digest);
  return inst;
}

// ---------------------------------------------------------------- oracle

OracleRecord oracle_for(const RunConfig& c, const Instance& inst) {
  OracleRecord rec;
  if (c.problem.f_star) {
    rec.f_star = *c.problem.f_star;
    rec.method = "config";
    return rec;
  }
  const auto& o = c.problem.oracle;
  const std::string key = sha256_hex(inst.problem_digest + "|" + std::to_string(o.budget) + "|" +
                                     oracle_method_name(o.method) + "|" + num(o.step_scale))
                              .substr(0, 32);
  fs::path file;
  if (!c.oracle_cache.empty()) {
    file = resolve(c.base_dir, c.oracle_cache) / (key + ".json");
    std::ifstream in(file);
    if (in) {
      try {
        json j = json::parse(in);
        if (j.at("problem_digest").get<std::string>() == inst.problem_digest) {
          rec.f_star = j.at("f_star").get<double>();
          auto x = j.at("x").get<std::vector<double>>();
          rec.x = Eigen::Map<Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
          rec.method = j.at("method").get<std::string>();
          rec.iterations = j.at("iterations").get<long>();
          rec.converged = j.at("converged").get<bool>();
          rec.from_cache = true;
          return rec;
        }
      } catch (const json::exception&) {
        // unreadable cache entry: recompute and overwrite
      }
    }
  }
  OracleResult res = centralized_oracle(*inst.problem, o);
  rec.f_star = res.f_star;
  rec.x = res.x;
  rec.method = res.method;
  rec.iterations = res.iterations;
  rec.converged = res.converged;
  if (!file.empty()) {
    fs::create_directories(file.parent_path());
    json j;
    j["problem_digest"] = inst.problem_digest;
    j["f_star"] = rec.f_star;
    j["x"] = std::vector<double>(rec.x.data(), rec.x.data() + rec.x.size());
    j["method"] = rec.method;
    j["iterations"] = rec.iterations;
    j["converged"] = rec.converged;
    j["budget"] = o.budget;
    std::ofstream out(file);
    out << j.dump(2) << '\n';
  }
  return rec;
}

// ---------------------------------------------------------------- run

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json vecs_json(const std::vector<Vec>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back(vec_json(v));
  return arr;
}

}  // namespace

RunResult execute(const RunConfig& c, const Instance& inst, double f_star) {
  validate(c);
  RunResult out;
  out.f_star = f_star;
  json state;
  state["algorithm"] = to_string(c.algo.algorithm);
  const Problem& problem = *inst.problem;

  if (c.algo.algorithm == Algorithm::PS) {
    double alpha = c.algo.alpha;
    if (!c.algo.alpha_grid.empty())
      alpha = tune_alpha(problem, inst.graph, inst.failures, c.algo.alpha_grid, c.algo.outer,
                         c.seed, f_star, c.algo.alpha_target)
                  .alpha;
    PSConfig pc;
    pc.alpha = alpha;
    pc.rounds = c.algo.outer;
    pc.checkpoint_stride = 1;
    pc.err_stop = c.err_stop;
    PSSimulation sim(problem, inst.graph, inst.failures, pc, c.seed, f_star);
    out.log.push_back(sim.snapshot());
    MetricsLog rest = sim.run();
    out.log.insert(out.log.end(), rest.begin(), rest.end());
    out.x = sim.state().x;
    out.alpha = alpha;
    state["alpha"] = alpha;
    state["x"] = vecs_json(out.x);
  } else {
    AlgoConfig ac;
    ac.variant = to_variant(c.algo.algorithm);
    ac.schedule = c.algo.schedule;
    ac.outer = c.algo.outer;
    ac.inner_events = c.algo.inner;
    ac.inner_stop_tol = c.algo.inner_tol;
    ac.solver = c.algo.solver;
    ac.clocks = ClockModel::equal(ac.variant);
    ac.checkpoint_stride = c.checkpoint_stride;
    ac.err_stop = c.err_stop;
    AlSimulation sim(problem, inst.graph, inst.failures, ac, c.seed, f_star);
    out.log.push_back(sim.snapshot());
    MetricsLog rest = sim.run();
    out.log.insert(out.log.end(), rest.begin(), rest.end());
    out.x = sim.estimates();
    if (ac.variant == Variant::ALBG) {
      const auto& s = sim.bg_state();
      state["x"] = vecs_json(s.x);
      state["lambda_bar"] = vecs_json(s.lambda_bar);
      state["rho"] = s.rho;
      state["t"] = s.t;
      state["k"] = s.k;
    } else {
      const auto& s = sim.alg_state();
      state["x"] = vecs_json(s.x);
      json arcs = json::array();
      for (ArcId a = 0; a < inst.graph.num_arcs(); ++a) {
        Arc arc = inst.graph.arc(a);
        arcs.push_back({{"from", arc.from},
                        {"to", arc.to},
                        {"y", vec_json(s.y[a])},
                        {"y_copy", vec_json(s.y_copy[a])},
                        {"mu", vec_json(s.mu[a])},
                        {"lambda", vec_json(s.lambda[a])},
                        {"rho_lambda", s.rho_lambda[a]},
                        {"rho_mu", s.rho_mu[a]}});
      }
      state["arcs"] = arcs;
      state["t"] = s.t;
      state["k"] = s.k;
    }
  }
  out.state_json = state.dump(1) + "\n";

  json manifest;
  json cfg = json::object();
  for (const auto& [k, v] : c.canonical()) cfg[k] = v;
  manifest["config"] = cfg;
  manifest["config_hash"] = c.hash();
  manifest["seed"] = c.seed;
  manifest["algorithm"] = to_string(c.algo.algorithm);
  manifest["instance_hash"] = inst.hash;
  manifest["problem_digest"] = inst.problem_digest;
  manifest["graph_digest"] = inst.graph_digest;
  manifest["f_star"] = f_star;
  manifest["rows"] = out.log.size();
  if (c.algo.algorithm == Algorithm::PS) manifest["alpha"] = out.alpha;
  out.manifest_json = manifest.dump(2) + "\n";
  return out;
}

void write_outputs(const RunResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "trace.csv", std::ios::binary);
    write_csv(csv, r.log);
  }
  std::ofstream(dir / "manifest.json", std::ios::binary) << r.manifest_json;
  std::ofstream(dir / "state.json", std::ios::binary) << r.state_json;
}

// ---------------------------------------------------------------- compare / sweep

std::vector<CompareEntry> compare(const std::vector<RunConfig>& configs,
                                  const std::vector<std::string>& labels,
                                  const std::vector<double>& thresholds) {
  std::vector<CompareEntry> table;
  std::optional<std::string> hash;
  std::optional<double> f_ref;
  for (std::size_t n = 0; n < configs.size(); ++n) {
    const RunConfig& c = configs[n];
    Instance inst = build_instance(c);
    if (hash && *hash != inst.hash)
      throw MismatchError("runs do not share a problem and graph instance");
    hash = inst.hash;
    double f_star = oracle_for(c, inst).f_star;
    if (f_ref && *f_ref != f_star) throw MismatchError("runs do not share the f_star reference");
    f_ref = f_star;
    RunResult r = execute(c, inst, f_star);
    CompareEntry e;
    e.label = n < labels.size() ? labels[n] : to_string(c.algo.algorithm);
    e.algorithm = c.algo.algorithm;
    e.seed = c.seed;
    for (double th : thresholds) e.transmissions.push_back(transmissions_to(r.log, th));
    e.final_err = std::abs(r.log.back().err_f);
    table.push_back(std::move(e));
  }
  return table;
}

void write_compare(std::ostream& os, const std::vector<CompareEntry>& table,
                   const std::vector<double>& thresholds) {
  os << "label,algorithm,seed";
  for (double th : thresholds) os << ",tx@" << num(th);
  os << ",final_err_f\n";
  for (const auto& e : table) {
    os << e.label << ',' << to_string(e.algorithm) << ',' << e.seed;
    for (const auto& t : e.transmissions) {
      os << ',';
      if (t) os << *t;
      else os << "NA";
    }
    os << ',' << num(e.final_err) << '\n';
  }
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto dots = text.find("..");
  if (dots != std::string::npos) {
    std::uint64_t lo = to_seed("seeds", text.substr(0, dots));
    std::uint64_t hi = to_seed("seeds", text.substr(dots + 2));
    if (hi < lo) throw ConfigError("empty seed range", "seeds");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ','))
    if (!trim(cell).empty()) seeds.push_back(to_seed("seeds", cell));
  if (seeds.empty()) throw ConfigError("no seeds given", "seeds");
  return seeds;
}

void write_extract(std::ostream& os, const MetricsLog& log, const std::string& axis) {
  if (axis != "transmissions" && axis != "flops" && axis != "k")
    throw ConfigError("axis must be transmissions, flops or k", "x");
  os << "# " << axis << " err_f\n";
  for (const auto& r : log) {
    double x = axis == "transmissions" ? static_cast<double>(r.transmissions)
               : axis == "flops"       ? r.flops
                                       : static_cast<double>(r.k);
    os << num(x) << ' ' << num(r.err_f) << '\n';
  }
}

}  // namespace algossip
