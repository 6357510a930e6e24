#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace algossip {

/// Cumulative cost counters of one run.
struct Counters {
  long events = 0;
  long transmissions = 0;  // m-vector sends, failed attempts included
  double flops = 0.0;
};

struct MetricsRow {
  int t = 0;
  long k = 0;
  long transmissions = 0;
  double flops = 0.0;
  double err_f = 0.0;
  double lagrangian = 0.0;
  double max_dual_gap = 0.0;
  bool feasible = true;

  bool operator==(const MetricsRow&) const = default;
};

using MetricsLog = std::vector<MetricsRow>;

/// Column order of the CSV trace.
inline constexpr const char* kCsvHeader =
    "t,k,transmissions,flops,err_f,L_value,max_dual_gap,feasible";

/// One header line, then one row per entry; floats with 17 significant
/// digits so parsing reproduces the log exactly.
void write_csv(std::ostream& os, const MetricsLog& log);
MetricsLog read_csv(std::istream& is);

}  // namespace algossip
