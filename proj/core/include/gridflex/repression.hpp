#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "gridflex/bilinear.hpp"
#include "gridflex/model.hpp"

namespace gridflex {

/// Ordered alpha levels; always contains 0 and 1.
class AlphaGrid {
 public:
  /// Throws std::invalid_argument unless strictly increasing from 0 to 1.
  explicit AlphaGrid(std::vector<double> points);
  static AlphaGrid uniform(int count = 21);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<double> points_;
};

/// Forecast and achieved demand interval of one bus at one alpha level.
struct EnvelopePoint {
  double alpha = 0.0;
  Interval forecast;
  Interval achieved;
  bool feasible = true;
};

/// Largest alpha with repression in one direction. `degree` is 1 and
/// `repressed` false when no level shows repression.
struct RepressionDegree {
  double degree = 1.0;
  bool repressed = false;
};

struct BusRepression {
  int bus_id = 0;
  bool has_demand = false;
  double lr_up = 0.0;    // MW, load-increase direction
  double lr_down = 0.0;  // MW, load-reduction direction
  RepressionDegree degree_max;  // load increase
  RepressionDegree degree_min;  // load reduction
  std::vector<EnvelopePoint> envelope;

  double lr() const { return lr_up + lr_down; }
};

struct RepressionResult {
  std::vector<BusRepression> buses;  // network bus order
  double total_lr = 0.0;
  double total_lr_up = 0.0;
  double total_lr_down = 0.0;
  /// Alpha levels where either direction was infeasible. When non-empty the
  /// LR totals are NaN.
  std::vector<double> infeasible_alphas;
  /// Solutions per grid level; index [level][0] is Min, [level][1] is Max.
  std::vector<std::array<AlphaCutSolution, 2>> solutions;

  bool defined() const { return infeasible_alphas.empty(); }
  /// Bus with the largest LR, or -1 when every bus is unrepressed.
  int worst_bus() const;
};

/// Gap below which a bus counts as unrepressed at one level (MW); smaller
/// gaps are solver noise and count as zero.
inline constexpr double kRepressionTol = 1e-4;

struct RepressionOptions {
  std::optional<double> budget;
  /// Bisection width for degrees; 0 disables refinement (grid-level degrees).
  double degree_width = 1e-3;
};

/// Solves every (alpha, direction) cut and integrates the per-bus gaps with
/// the trapezoid rule over the grid.
RepressionResult compute_repression(const Network& net, const Strategy& strategy, const AlphaGrid& grid,
                                    const SolverSettings& settings, const RepressionOptions& options = {});

/// Solution of one cut under a strategy: the plain LP for Base, the
/// adjustable-susceptance program otherwise.
AlphaCutSolution solve_cut(const Network& net, const Strategy& strategy, std::optional<double> budget,
                           double alpha, Direction direction, const SolverSettings& settings,
                           std::uint64_t stream);

struct SweepCell {
  StrategyKind kind = StrategyKind::Base;
  double capacity = 0.0;
  double total_lr = 0.0;
  bool defined = true;
};

/// One repression study per (strategy, capacity); rows in input order.
std::vector<SweepCell> capacity_sweep(const Network& net, const std::vector<StrategyKind>& strategies,
                                      const std::vector<double>& capacities, const AlphaGrid& grid,
                                      const SolverSettings& settings);

/// Smallest capacity in [lo, hi] at which total LR vanishes (<= tol MW),
/// found by bisection to `width`. Empty when LR is still positive at hi.
std::optional<double> zero_repression_capacity(const Network& net, StrategyKind kind, const AlphaGrid& grid,
                                               const SolverSettings& settings, double lo, double hi,
                                               double width = 1e-3, double tol = 1e-3);

}  // namespace gridflex
