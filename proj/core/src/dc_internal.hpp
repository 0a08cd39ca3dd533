#pragma once

// Shared pieces of the DC programs: per-unit network view and the
// demand/generation columns every formulation carries.

#include <Eigen/Dense>

#include <vector>

#include "gridflex/model.hpp"
#include "gridflex/simplex.hpp"

namespace gridflex::detail {

struct DcView {
  explicit DcView(const Network& net);

  const Network& net;
  double base = 100.0;
  int num_buses = 0;
  int ref = 0;                       // reference bus index
  std::vector<int> from, to;         // bus index per line
  std::vector<int> active;           // in-service line indices
  std::vector<int> gen_bus;          // bus index per generator
  std::vector<int> reduced;          // bus index -> reduced index, -1 for ref

  /// Per-unit susceptance of line k with multiplier beta.
  double b(int k, double beta) const { return net.lines[k].susceptance() * (1.0 + beta); }
  double limit_pu(int k) const { return net.lines[k].limit / base; }

  /// Inverse of the reduced susceptance matrix (reference row/col removed).
  Eigen::MatrixXd reduced_inverse(const std::vector<double>& beta) const;
};

/// Demand and generator columns at one alpha level.
///
/// When `split` is set each demand is represented as forecast + up - down so
/// the distance from forecast is linear.
struct InjectionColumns {
  InjectionColumns(const DcView& view, lp::Problem& lp, double alpha, bool split);

  struct DemandColumn {
    int bus = -1;
    int var = -1;   // unsplit column
    int up = -1;    // split columns
    int down = -1;
    double forecast = 0.0;  // pu
    double lower = 0.0;     // pu
    double upper = 0.0;     // pu
  };

  std::vector<DemandColumn> demands;
  std::vector<int> gens;            // column per generator
  std::vector<int> demand_of_bus;   // bus index -> entry in `demands`, -1 if none

  /// Appends coef * P_demand(bus) to `row`, returning the constant part.
  double add_demand(lp::Row& row, int bus, double coef) const;
  /// Appends coef * sum of generator outputs at `bus` to `row`.
  void add_generation(lp::Row& row, int bus, double coef) const;
  /// Demand value in pu from a primal vector.
  double demand_value(const std::vector<double>& x, int bus) const;

  std::vector<std::vector<int>> gens_at_bus;
};

/// Adds the weighted demand as an objective and returns the constant term.
double set_demand_objective(const InjectionColumns& cols, lp::Problem& lp,
                            const std::vector<double>& weights, double sign);

/// Full solution from per-unit injections and angles.
AlphaCutSolution assemble_solution(const DcView& view, const InjectionColumns& cols,
                                   const std::vector<double>& x, const std::vector<double>& theta,
                                   const std::vector<double>& beta, double alpha, Direction dir,
                                   const std::vector<double>& weights);

/// Angles (radians, reference zero) for net injections in pu.
std::vector<double> angles_from_injections(const DcView& view, const Eigen::MatrixXd& reduced_inverse,
                                           const std::vector<double>& injection);

SolveStatus to_solve_status(lp::Status s);

}  // namespace gridflex::detail
