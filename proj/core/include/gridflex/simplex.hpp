#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace gridflex::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Sparse row `lower <= sum(coef * x[var]) <= upper`.
struct Row {
  std::vector<std::pair<int, double>> terms;
  double lower = -kInf;
  double upper = kInf;
};

/// minimize cost' x  subject to  rows, lower <= x <= upper.
class Problem {
 public:
  int add_variable(double lower, double upper, double cost = 0.0);
  int add_row(Row row);

  int num_variables() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  void set_cost(int var, double cost) { cost_[var] = cost; }
  void set_bounds(int var, double lower, double upper);

  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<double> cost_, lower_, upper_;
  std::vector<Row> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Options {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 40;
  /// 0 selects 50 * (rows + columns).
  int max_iterations = 0;
};

struct Result {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
  /// Largest row or bound violation of `x` against the original data.
  double max_violation = 0.0;
};

/// Bounded-variable primal simplex on a dense tableau.
///
/// Two phases with artificial variables; Dantzig pricing with a fallback to
/// Bland's rule after a run of degenerate pivots. Deterministic: identical
/// input produces bitwise identical output.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace gridflex::lp
