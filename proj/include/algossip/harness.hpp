#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "algossip/algo.hpp"
#include "algossip/baseline.hpp"
#include "algossip/graph.hpp"
#include "algossip/metrics.hpp"
#include "algossip/problem.hpp"

namespace algossip {

enum class Algorithm { ALG, ALMG, ALBG, PS };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct ProblemSpec {
  std::string kind = "logreg";  // quad | logreg | file
  std::string file;
  std::vector<Vec> targets;
  std::vector<Vec> lower;
  std::vector<Vec> upper;
  LogRegParams logreg;
  std::optional<double> f_star;
  OracleOptions oracle;
};

struct GraphSpec {
  std::string kind = "geometric";  // geometric | ring | path | complete | file
  int nodes = 0;                   // 0: as many as the problem has
  double radius = 0.4;
  std::uint64_t seed = 0;
  std::string file;
  std::string failures = "none";  // none | uniform | geometric
  double success = 1.0;
  double scale = 0.5;
};

struct AlgoSpec {
  Algorithm algorithm = Algorithm::ALBG;
  PenaltySchedule schedule = PenaltySchedule::power(1.3, 1.0);
  int outer = 50;  // outer iterations, or rounds for PS
  long inner = 0;
  double inner_tol = 0.0;
  InnerSolverConfig solver;
  double alpha = 0.1;
  std::vector<double> alpha_grid;  // PS: tune alpha on this grid when non-empty
  double alpha_target = 1e-3;
};

/// Parsed experiment configuration.
struct RunConfig {
  ProblemSpec problem;
  GraphSpec graph;
  AlgoSpec algo;
  std::uint64_t seed = 0;
  long checkpoint_stride = 100;
  std::optional<double> err_stop;
  std::string oracle_cache;  // directory; empty disables caching
  std::filesystem::path base_dir;

  /// Every setting as `section.key` -> canonical text, seed included.
  std::map<std::string, std::string> canonical() const;
  /// SHA-256 over canonical(); changes iff a setting or the seed changes.
  std::string hash() const;
};

/// INI-style text with sections [problem], [graph], [algo], [run]. Unknown
/// sections or keys raise ConfigError naming the key.
RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Cross-field checks (variant / failure model compatibility and ranges).
void validate(const RunConfig& config);

struct Instance {
  std::unique_ptr<Problem> problem;
  Supergraph graph;
  FailureModel failures;
  std::string problem_digest;
  std::string graph_digest;
  /// Digest over problem and graph; runs with equal hashes are comparable.
  std::string hash;
};

Instance build_instance(const RunConfig& config);

struct OracleRecord {
  double f_star = 0.0;
  Vec x;
  std::string method;
  long iterations = 0;
  bool converged = true;
  bool from_cache = false;
};

/// f_star from the config if given, else the cached or freshly computed
/// centralized solution (written back to the cache directory).
OracleRecord oracle_for(const RunConfig& config, const Instance& instance);

struct RunResult {
  MetricsLog log;
  std::vector<Vec> x;
  double f_star = 0.0;
  double alpha = 0.0;  // PS step actually used
  std::string state_json;
  std::string manifest_json;
};

/// Executes one run: initial row, then the algorithm's checkpoints.
RunResult execute(const RunConfig& config, const Instance& instance, double f_star);
/// Writes trace.csv, manifest.json and state.json under `out_dir`.
void write_outputs(const RunResult& result, const std::filesystem::path& out_dir);

struct CompareEntry {
  std::string label;
  Algorithm algorithm = Algorithm::ALG;
  std::uint64_t seed = 0;
  std::vector<std::optional<long>> transmissions;  // per threshold
  double final_err = 0.0;
};

/// Transmissions-to-threshold table over runs on one instance.
std::vector<CompareEntry> compare(const std::vector<RunConfig>& configs,
                                  const std::vector<std::string>& labels,
                                  const std::vector<double>& thresholds);
void write_compare(std::ostream& os, const std::vector<CompareEntry>& table,
                   const std::vector<double>& thresholds);

/// "a..b" (inclusive) or a comma list.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// Two whitespace-separated columns: x (transmissions | flops | k) and err_f.
void write_extract(std::ostream& os, const MetricsLog& log, const std::string& axis);

}  // namespace algossip
