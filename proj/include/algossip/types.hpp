#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace algossip {

using Vec = Eigen::VectorXd;
using Rng = std::mt19937_64;

using NodeId = int;
using ArcId = int;

/// sign(j - i) over node ids; the lower id of an edge carries the + sign.
inline double edge_sign(NodeId i, NodeId j) { return j > i ? 1.0 : -1.0; }

}  // namespace algossip
