#include "algossip/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "algossip/errors.hpp"

namespace algossip {

void write_csv(std::ostream& os, const MetricsLog& log) {
  os << kCsvHeader << '\n';
  char buf[256];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%ld,%ld,%.17g,%.17g,%.17g,%.17g,%d\n", r.t, r.k,
                  r.transmissions, r.flops, r.err_f, r.lagrangian, r.max_dual_gap,
                  r.feasible ? 1 : 0);
    os << buf;
  }
}

MetricsLog read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw ConfigError("not a trace file (header mismatch)", "csv");
  MetricsLog log;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ConfigError("trace row has wrong column count", "csv");
    MetricsRow r;
    r.t = std::atoi(cells[0].c_str());
    r.k = std::atol(cells[1].c_str());
    r.transmissions = std::atol(cells[2].c_str());
    r.flops = std::strtod(cells[3].c_str(), nullptr);
    r.err_f = std::strtod(cells[4].c_str(), nullptr);
    r.lagrangian = std::strtod(cells[5].c_str(), nullptr);
    r.max_dual_gap = std::strtod(cells[6].c_str(), nullptr);
    r.feasible = cells[7] == "1";
    log.push_back(r);
  }
  return log;
}

}  // namespace algossip
