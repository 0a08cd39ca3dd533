#pragma once

#include <string>
#include <vector>

#include "gridflex/repression.hpp"

namespace gridflex {

struct OutageCell {
  StrategyKind kind = StrategyKind::Base;
  double capacity = 0.0;
  bool defined = true;
  double total_lr = 0.0;
  int worst_bus_id = 0;  // 0 when no bus is repressed
  double worst_bus_lr = 0.0;
  std::vector<double> bus_lr;  // network bus order
};

struct OutageEntry {
  int line_index = -1;  // -1 for the intact network
  std::string label;    // "intact" or the line label
  bool islanding = false;
  std::vector<OutageCell> cells;

  /// Base-strategy total LR (NaN when not computed or islanding).
  double base_lr() const;
  const OutageCell* find(StrategyKind kind, double capacity) const;
};

struct ContingencyOptions {
  bool include_intact = true;
  /// Line labels to study; empty means every in-service line.
  std::vector<std::string> only;
};

struct ContingencyTable {
  /// Intact entry first (when requested), then outages ranked by Base LR
  /// descending; islanding outages last. Ties keep line order.
  std::vector<OutageEntry> entries;
};

/// Single-circuit outage screening. Base is evaluated once per outage;
/// other strategies once per capacity.
ContingencyTable n_minus_1(const Network& net, const std::vector<StrategyKind>& strategies,
                           const std::vector<double>& capacities, const AlphaGrid& grid,
                           const SolverSettings& settings, const ContingencyOptions& options = {});

}  // namespace gridflex
