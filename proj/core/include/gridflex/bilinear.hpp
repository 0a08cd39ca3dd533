#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gridflex/model.hpp"

namespace gridflex {

/// Dispatch with adjustable line susceptances: flow = B (1 + beta) (d_i - d_j),
/// beta bounded per line by the strategy and, optionally, a total budget on
/// sum |beta|.
struct BilinearProblem {
  const Network& net;
  double alpha = 1.0;
  Direction direction = Direction::Max;
  Strategy strategy;
  std::optional<double> budget;
  std::vector<double> weights;  // empty: bus weights
};

struct SolverSettings {
  int max_outer_iters = 100;
  double tol_obj = 1e-6;  // MW
  int multistarts = 16;
  std::uint64_t seed = 0;
  int oracle_grid_points = 5;
  /// Worker threads for studies that fan out independent solves.
  int threads = 1;
};

/// Per-solve diagnostics.
struct MfactsTrace {
  int starts_run = 0;
  int starts_converged = 0;
  int lp_solves = 0;
  int best_start = -1;
};

/// Alternating LPs (beta fixed / angles fixed) from several starts, refined
/// by an exact search over flow-direction patterns when no budget is set.
/// Returns the best start; ties within tol_obj prefer smaller sum |beta|,
/// then the lower start index.
AlphaCutSolution solve_mfacts(const BilinearProblem& problem, const SolverSettings& settings,
                              MfactsTrace* trace = nullptr);

class OracleCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> beta;  // per line
  long lp_solves = 0;
};

/// Exhaustive search over a uniform beta grid (endpoints and zero included)
/// on every adjustable line, followed by one finer grid around the best
/// point. Throws OracleCapExceeded when the grid would need more than
/// `max_solves` LPs.
OracleResult brute_force_oracle(const BilinearProblem& problem, int grid_points,
                                long max_solves = 1'000'000);

}  // namespace gridflex
