#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gridflex {

/// Triangular membership function of one bus's active demand, in MW.
///
/// `lower <= forecast <= upper`; the membership is 1 at `forecast` and
/// falls linearly to 0 at the support bounds.
struct FuzzyDemand {
  double forecast = 0.0;
  double upper = 0.0;
  double lower = 0.0;

  friend bool operator==(const FuzzyDemand&, const FuzzyDemand&) = default;
};

/// Closed interval in MW.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Alpha-cut of a triangular demand. Throws std::invalid_argument when
/// alpha lies outside [0, 1].
Interval fuzzy_bounds(const FuzzyDemand& demand, double alpha);

struct Bus {
  int id = 0;
  double weight = 1.0;
  std::optional<FuzzyDemand> demand;

  friend bool operator==(const Bus&, const Bus&) = default;
};

struct Generator {
  int bus = 0;
  double p_min = 0.0;  // MW
  double p_max = 0.0;  // MW

  friend bool operator==(const Generator&, const Generator&) = default;
};

struct Line {
  int from = 0;
  int to = 0;
  int circuit = 1;
  double x = 0.0;      // per-unit reactance
  double limit = 0.0;  // MW
  double beta_min = 0.0;
  double beta_max = 0.0;
  bool candidate = true;
  bool in_service = true;

  double susceptance() const { return 1.0 / x; }
  friend bool operator==(const Line&, const Line&) = default;
};

/// Human-readable line label, e.g. "3-24" or "15-21#2" for a second circuit.
std::string line_label(const Line& line);

/// Most negative susceptance multiplier a device may apply. Beyond this the
/// line degenerates towards an open circuit.
inline constexpr double kBetaFloor = -0.9;

struct Network {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;
  std::optional<int> reference_bus;

  /// Explicit reference bus, or the lowest bus id when unset.
  int effective_reference_bus() const;
  /// Index into `buses`, or -1.
  int bus_index(int id) const;
  /// Index of the line with this label ("from-to" or "from-to#circuit"),
  /// matching either orientation. -1 when absent.
  int find_line(const std::string& label) const;

  friend bool operator==(const Network&, const Network&) = default;
};

/// Returns a human-readable list of invariant violations; empty when the
/// network is valid and its in-service graph is connected.
std::vector<std::string> validate_network(const Network& net);

/// True when the in-service lines connect every bus.
bool is_connected(const Network& net);

/// Copy of `net` with line `line_index` taken out of service.
Network with_outage(const Network& net, int line_index);

/// Copy of `net` where every candidate line's device range is replaced by
/// [lo, hi]. Used for capacity sweeps that exceed the bundled device ranges.
Network with_device_range(const Network& net, double lo, double hi);

enum class StrategyKind { Base, Inductive, Capacitive, Smart };

struct Strategy {
  StrategyKind kind = StrategyKind::Base;
  double capacity = 0.0;

  /// Range the strategy allows before intersecting with a line's own range.
  Interval beta_range() const;
  friend bool operator==(const Strategy&, const Strategy&) = default;
};

std::string to_string(StrategyKind kind);
/// Accepts "base", "inductive", "capacitive", "smart" and "c1".."c4".
std::optional<StrategyKind> parse_strategy_kind(const std::string& text);

/// Per-line beta bounds after composing the strategy, the line's own device
/// range, its candidacy and service state. Out-of-service and non-candidate
/// lines get [0, 0].
std::vector<Interval> effective_beta_bounds(const Network& net, const Strategy& strategy);

enum class Direction { Min, Max };
enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

std::string to_string(Direction direction);
std::string to_string(SolveStatus status);

/// One alpha level, one optimization direction. Vectors are indexed like
/// the network's buses, generators and lines; values are MW and radians.
struct AlphaCutSolution {
  double alpha = 0.0;
  Direction direction = Direction::Max;
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> demand;
  std::vector<double> generation;
  std::vector<double> angle;
  std::vector<double> flow;
  std::vector<double> beta;

  bool optimal() const { return status == SolveStatus::Optimal; }
  double beta_l1() const;
};

/// Residuals of a solution against the network equations, in MW.
struct Residuals {
  double balance = 0.0;
  double flow_equation = 0.0;
  double line_limit = 0.0;
  double bounds = 0.0;
};

Residuals check_solution(const Network& net, const AlphaCutSolution& sol);

/// Weight vector from bus weights.
std::vector<double> bus_weights(const Network& net);

}  // namespace gridflex
