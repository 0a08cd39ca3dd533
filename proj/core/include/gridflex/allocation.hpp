#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridflex/repression.hpp"

namespace gridflex {

/// Lines with |beta| at or below this are considered idle.
inline constexpr double kActivationThreshold = 1e-4;

struct AllocationPoint {
  double tau = 0.0;
  bool defined = true;
  double total_lr = 0.0;
  /// Deployment at the most stressed cut (alpha = 0, load increase), per line.
  std::vector<double> beta;
};

struct Activation {
  int line_index = -1;
  std::string label;
  double tau = 0.0;  // first budget at which the line is used
  bool ambiguous = false;  // another line activates at the same budget
};

struct AllocationResult {
  std::vector<AllocationPoint> points;
  std::vector<Activation> activation_order;
};

/// `count` uniform budgets from 0 to the sum of per-line ranges the strategy
/// leaves available.
std::vector<double> default_tau_values(const Network& net, const Strategy& strategy, int count = 20);

/// Budget-constrained deployment for each tau (ascending, >= 0). `outage`
/// takes one line out of service first.
AllocationResult allocate(const Network& net, const Strategy& strategy, const std::vector<double>& taus,
                          std::optional<int> outage, const AlphaGrid& grid, const SolverSettings& settings);

}  // namespace gridflex
