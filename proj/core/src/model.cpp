#include "gridflex/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gridflex {

Interval fuzzy_bounds(const FuzzyDemand& d, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  const double spread = 1.0 - alpha;
  return {d.forecast - spread * (d.forecast - d.lower), d.forecast + spread * (d.upper - d.forecast)};
}

std::string line_label(const Line& line) {
  std::string s = std::to_string(line.from) + "-" + std::to_string(line.to);
  if (line.circuit != 1) s += "#" + std::to_string(line.circuit);
  return s;
}

int Network::effective_reference_bus() const {
  if (reference_bus) return *reference_bus;
  if (buses.empty()) return 0;
  return std::min_element(buses.begin(), buses.end(),
                          [](const Bus& a, const Bus& b) { return a.id < b.id; })
      ->id;
}

int Network::bus_index(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == id) return static_cast<int>(i);
  return -1;
}

int Network::find_line(const std::string& label) const {
  int from = 0, to = 0, circuit = 1;
  char dash = 0;
  std::istringstream in(label);
  if (!(in >> from >> dash >> to) || dash != '-') return -1;
  if (in.peek() == '#') {
    in.get();
    if (!(in >> circuit)) return -1;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const bool same = (l.from == from && l.to == to) || (l.from == to && l.to == from);
    if (same && l.circuit == circuit) return static_cast<int>(i);
  }
  return -1;
}

namespace {

bool connected_over(const Network& net, const std::vector<bool>& usable) {
  const std::size_t n = net.buses.size();
  if (n <= 1) return true;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = n;
  for (std::size_t i = 0; i < net.lines.size(); ++i) {
    if (!usable[i]) continue;
    const int a = net.bus_index(net.lines[i].from);
    const int b = net.bus_index(net.lines[i].to);
    if (a < 0 || b < 0) continue;
    const int ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

}  // namespace

bool is_connected(const Network& net) {
  std::vector<bool> usable(net.lines.size());
  for (std::size_t i = 0; i < net.lines.size(); ++i) usable[i] = net.lines[i].in_service;
  return connected_over(net, usable);
}

std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> issues;
  auto report = [&](std::string msg) { issues.push_back(std::move(msg)); };

  if (!(net.base_mva > 0.0) || !std::isfinite(net.base_mva)) report("base_mva must be positive");
  if (net.buses.empty()) report("network has no buses");

  std::set<int> ids;
  for (const Bus& b : net.buses) {
    const std::string tag = "bus " + std::to_string(b.id);
    if (!ids.insert(b.id).second) report(tag + ": duplicate bus id");
    if (!std::isfinite(b.weight) || b.weight < 0.0) report(tag + ": weight must be finite and >= 0");
    if (b.demand) {
      const FuzzyDemand& d = *b.demand;
      if (!std::isfinite(d.forecast) || !std::isfinite(d.upper) || !std::isfinite(d.lower))
        report(tag + ": demand values must be finite");
      if (d.lower < 0.0 || d.forecast < 0.0 || d.upper < 0.0) report(tag + ": negative demand");
      if (!(d.lower <= d.forecast && d.forecast <= d.upper))
        report(tag + ": demand bounds must satisfy lower <= forecast <= upper");
    }
  }

  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    const std::string tag = "generator " + std::to_string(g) + " at bus " + std::to_string(gen.bus);
    if (!ids.count(gen.bus)) report(tag + ": unknown bus");
    if (!(gen.p_min >= 0.0 && gen.p_min <= gen.p_max) || !std::isfinite(gen.p_max))
      report(tag + ": limits must satisfy 0 <= p_min <= p_max");
  }

  std::map<std::tuple<int, int, int>, int> seen;
  for (const Line& l : net.lines) {
    const std::string tag = "line " + line_label(l);
    if (!ids.count(l.from) || !ids.count(l.to)) report(tag + ": unknown bus");
    if (l.from == l.to) report(tag + ": self loop");
    if (!(l.x > 0.0) || !std::isfinite(l.x)) report(tag + ": nonpositive reactance");
    if (!(l.limit > 0.0)) report(tag + ": nonpositive thermal limit");
    if (!(l.beta_min >= kBetaFloor && l.beta_min <= 0.0 && l.beta_max >= 0.0) ||
        !std::isfinite(l.beta_max))
      report(tag + ": beta range must satisfy -0.9 <= beta_min <= 0 <= beta_max");
    const auto key = std::make_tuple(std::min(l.from, l.to), std::max(l.from, l.to), l.circuit);
    if (seen[key]++ > 0) report(tag + ": duplicate circuit");
  }

  if (net.reference_bus && !ids.count(*net.reference_bus)) report("reference bus does not exist");
  if (!net.buses.empty() && !is_connected(net)) report("network is disconnected over in-service lines");
  return issues;
}

Network with_outage(const Network& net, int line_index) {
  Network out = net;
  out.lines.at(static_cast<std::size_t>(line_index)).in_service = false;
  return out;
}

Network with_device_range(const Network& net, double lo, double hi) {
  Network out = net;
  for (Line& l : out.lines) {
    if (!l.candidate) continue;
    l.beta_min = lo;
    l.beta_max = hi;
  }
  return out;
}

Interval Strategy::beta_range() const {
  const double cap = std::max(0.0, capacity);
  switch (kind) {
    case StrategyKind::Base: return {0.0, 0.0};
    case StrategyKind::Inductive: return {std::max(-cap, kBetaFloor), 0.0};
    case StrategyKind::Capacitive: return {0.0, cap};
    case StrategyKind::Smart: return {std::max(-cap, kBetaFloor), cap};
  }
  return {0.0, 0.0};
}

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Base: return "base";
    case StrategyKind::Inductive: return "inductive";
    case StrategyKind::Capacitive: return "capacitive";
    case StrategyKind::Smart: return "smart";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy_kind(const std::string& text) {
  std::string s;
  for (char c : text) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "base" || s == "c1") return StrategyKind::Base;
  if (s == "inductive" || s == "c2") return StrategyKind::Inductive;
  if (s == "capacitive" || s == "c3") return StrategyKind::Capacitive;
  if (s == "smart" || s == "c4") return StrategyKind::Smart;
  return std::nullopt;
}

std::vector<Interval> effective_beta_bounds(const Network& net, const Strategy& strategy) {
  const Interval range = strategy.beta_range();
  std::vector<Interval> out(net.lines.size(), Interval{0.0, 0.0});
  for (std::size_t i = 0; i < net.lines.size(); ++i) {
    const Line& l = net.lines[i];
    if (!l.in_service || !l.candidate) continue;
    const double lo = std::max({range.lower, l.beta_min, kBetaFloor});
    const double hi = std::min(range.upper, l.beta_max);
    out[i] = lo <= hi ? Interval{lo, hi} : Interval{0.0, 0.0};
  }
  return out;
}

std::string to_string(Direction d) { return d == Direction::Min ? "min" : "max"; }

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

double AlphaCutSolution::beta_l1() const {
  double s = 0.0;
  for (double b : beta) s += std::abs(b);
  return s;
}

Residuals check_solution(const Network& net, const AlphaCutSolution& sol) {
  Residuals r;
  const double base = net.base_mva;
  std::vector<double> net_injection(net.buses.size(), 0.0);
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    net_injection[net.bus_index(gen.bus)] += sol.generation[g];
    r.bounds = std::max({r.bounds, gen.p_min - sol.generation[g], sol.generation[g] - gen.p_max});
  }
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    net_injection[i] -= sol.demand[i];
    const Bus& b = net.buses[i];
    if (b.demand) {
      const Interval iv = fuzzy_bounds(*b.demand, sol.alpha);
      r.bounds = std::max({r.bounds, iv.lower - sol.demand[i], sol.demand[i] - iv.upper});
    } else {
      r.bounds = std::max(r.bounds, std::abs(sol.demand[i]));
    }
  }
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    const Line& l = net.lines[k];
    if (!l.in_service) {
      r.flow_equation = std::max(r.flow_equation, std::abs(sol.flow[k]));
      continue;
    }
    const int a = net.bus_index(l.from), b = net.bus_index(l.to);
    const double expected = base * l.susceptance() * (1.0 + sol.beta[k]) * (sol.angle[a] - sol.angle[b]);
    r.flow_equation = std::max(r.flow_equation, std::abs(expected - sol.flow[k]));
    r.line_limit = std::max(r.line_limit, std::abs(sol.flow[k]) - l.limit);
    net_injection[a] -= sol.flow[k];
    net_injection[b] += sol.flow[k];
  }
  for (double v : net_injection) r.balance = std::max(r.balance, std::abs(v));
  r.bounds = std::max(r.bounds, 0.0);
  r.line_limit = std::max(r.line_limit, 0.0);
  return r;
}

std::vector<double> bus_weights(const Network& net) {
  std::vector<double> w;
  w.reserve(net.buses.size());
  for (const Bus& b : net.buses) w.push_back(b.weight);
  return w;
}

}  // namespace gridflex
