#pragma once

#include <vector>

#include "gridflex/model.hpp"
#include "gridflex/simplex.hpp"

namespace gridflex {

/// DC dispatch at one alpha level with every line's susceptance multiplier
/// held fixed.
struct LpSubproblem {
  const Network& net;
  double alpha = 1.0;
  Direction direction = Direction::Max;
  /// Per-line multiplier; empty means all zero. Out-of-service entries are ignored.
  std::vector<double> beta_fixed;
  /// Per-bus objective weights; empty means the buses' own weights.
  std::vector<double> weights;
};

struct LpOptions {
  /// Re-solve with the aggregate pinned, minimizing the weighted distance
  /// of each demand from its forecast, so per-bus values are reproducible.
  bool tie_break = true;
  lp::Options simplex;
};

/// Maximizes or minimizes the weighted served demand. Min and Max are always
/// separate programs. Infeasibility is reported through `status`.
AlphaCutSolution solve_fixed_beta(const LpSubproblem& problem, const LpOptions& options = {});

/// Largest (Max) or smallest (Min) weighted demand the fuzzy bounds admit
/// at this alpha, ignoring the network.
double ideal_objective(const Network& net, double alpha, Direction direction,
                       const std::vector<double>& weights = {});

}  // namespace gridflex
