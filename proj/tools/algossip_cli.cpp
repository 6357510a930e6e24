// Command-line front end: run, compare, oracle, sweep, extract, graph.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "algossip/errors.hpp"
#include "algossip/harness.hpp"

namespace fs = std::filesystem;
using namespace algossip;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0' || !(v > 0.0))
      throw ConfigError("bad threshold '" + cell + "'", "thresholds");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("no thresholds given", "thresholds");
  return out;
}

double resolve_f_star(const RunConfig& cfg, const Instance& inst) {
  OracleRecord rec = oracle_for(cfg, inst);
  if (!rec.converged)
    std::cerr << "warning: oracle did not converge within its budget (" << rec.iterations
              << " iterations)\n";
  return rec.f_star;
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  RunConfig cfg = load_config(config);
  if (seed) cfg.seed = *seed;
  Instance inst = build_instance(cfg);
  RunResult r = execute(cfg, inst, resolve_f_star(cfg, inst));
  write_outputs(r, out);
  const MetricsRow& last = r.log.back();
  std::printf("%s: %zu rows, final err_f %.6g after %ld transmissions -> %s\n",
              to_string(cfg.algo.algorithm).c_str(), r.log.size(), last.err_f, last.transmissions,
              (fs::path(out) / "trace.csv").c_str());
  return 0;
}

int cmd_compare(const std::vector<std::string>& files, const std::string& thresholds) {
  std::vector<RunConfig> cfgs;
  std::vector<std::string> labels;
  for (const auto& f : files) {
    cfgs.push_back(load_config(f));
    labels.push_back(fs::path(f).stem().string());
  }
  auto th = parse_thresholds(thresholds);
  write_compare(std::cout, compare(cfgs, labels, th), th);
  return 0;
}

int cmd_oracle(const std::string& config) {
  RunConfig cfg = load_config(config);
  Instance inst = build_instance(cfg);
  OracleRecord rec = oracle_for(cfg, inst);
  if (!rec.converged) std::cerr << "warning: oracle did not converge within its budget\n";
  std::printf("f_star %.17g\nmethod %s\niterations %ld\ncached %s\ninstance %s\n", rec.f_star,
              rec.method.c_str(), rec.iterations, rec.from_cache ? "yes" : "no",
              inst.problem_digest.c_str());
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& seeds, const std::string& out,
              const std::string& thresholds) {
  RunConfig cfg = load_config(config);
  auto th = parse_thresholds(thresholds);
  Instance inst = build_instance(cfg);
  double f_star = resolve_f_star(cfg, inst);
  fs::create_directories(out);
  std::ofstream summary(fs::path(out) / "summary.csv");
  summary << "seed,final_err_f,transmissions";
  for (double t : th) summary << ",tx@" << t;
  summary << '\n';
  for (std::uint64_t s : parse_seed_range(seeds)) {
    RunConfig c = cfg;
    c.seed = s;
    RunResult r = execute(c, inst, f_star);
    write_outputs(r, fs::path(out) / ("seed_" + std::to_string(s)));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.log.back().err_f);
    summary << s << ',' << buf << ',' << r.log.back().transmissions;
    for (double t : th) {
      auto tx = transmissions_to(r.log, t);
      summary << ',';
      if (tx) summary << *tx;
      else summary << "NA";
    }
    summary << '\n';
    std::printf("seed %llu: final err_f %.6g\n", static_cast<unsigned long long>(s),
                r.log.back().err_f);
  }
  return 0;
}

int cmd_extract(const std::string& trace, const std::string& axis) {
  std::ifstream in(trace);
  if (!in) throw ConfigError("cannot open " + trace, "trace");
  write_extract(std::cout, read_csv(in), axis);
  return 0;
}

int cmd_graph(const std::string& config) {
  RunConfig cfg = load_config(config);
  Instance inst = build_instance(cfg);
  write_graph(std::cout, inst.graph, inst.failures);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented-Lagrangian gossip optimization simulator"};
  app.require_subcommand(1);

  std::string config, out = "out", seeds = "0..19", thresholds = "1e-2,1e-3", trace,
                      axis = "transmissions";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> configs;

  auto* run = app.add_subcommand("run", "run one configuration");
  run->add_option("--config", config, "config file")->required();
  run->add_option("--seed", seed, "override [run] seed");
  run->add_option("--out", out, "output directory");

  auto* cmp = app.add_subcommand("compare", "transmissions-to-threshold table");
  cmp->add_option("--configs", configs, "config files")->required();
  cmp->add_option("--thresholds", thresholds, "comma-separated err_f levels");

  auto* orc = app.add_subcommand("oracle", "compute or look up f_star");
  orc->add_option("--config", config, "config file")->required();

  auto* swp = app.add_subcommand("sweep", "run a configuration over many seeds");
  swp->add_option("--config", config, "config file")->required();
  swp->add_option("--seeds", seeds, "a..b or comma list");
  swp->add_option("--out", out, "output directory");
  swp->add_option("--thresholds", thresholds, "comma-separated err_f levels");

  auto* ext = app.add_subcommand("extract", "two-column err_f series for plotting");
  ext->add_option("--trace", trace, "trace.csv")->required();
  ext->add_option("--x", axis, "transmissions | flops | k");

  auto* gph = app.add_subcommand("graph", "print the supergraph of a configuration");
  gph->add_option("--config", config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, seed, out);
    if (*cmp) return cmd_compare(configs, thresholds);
    if (*orc) return cmd_oracle(config);
    if (*swp) return cmd_sweep(config, seeds, out, thresholds);
    if (*ext) return cmd_extract(trace, axis);
    if (*gph) return cmd_graph(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MismatchError& e) {
    std::cerr << "mismatch: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
