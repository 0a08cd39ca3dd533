#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gridflex/lpcore.hpp"
#include "gridflex/model.hpp"
#include "gridflex/parallel.hpp"

namespace gridflex::testing {

/// Gen at bus 1 (0..500 MW), demand (300, 330, 270) at bus 2, one line
/// x = 0.1 limited to 310 MW.
inline Network two_bus() {
  Network n;
  n.buses = {{1, 1.0, std::nullopt}, {2, 1.0, FuzzyDemand{300, 330, 270}}};
  n.generators = {{1, 0.0, 500.0}};
  n.lines = {{1, 2, 1, 0.1, 310.0, -0.2, 0.2, true, true}};
  return n;
}

/// Gen at 1, load at 3; paths 1-3 (limited) and 1-2-3 (ample).
inline Network triangle() {
  Network n;
  n.buses = {{1, 1.0, std::nullopt}, {2, 1.0, std::nullopt}, {3, 1.0, FuzzyDemand{300, 360, 240}}};
  n.generators = {{1, 0.0, 1000.0}};
  n.lines = {{1, 2, 1, 0.05, 400.0, -0.2, 0.2, true, true},
             {2, 3, 1, 0.05, 400.0, -0.2, 0.2, true, true},
             {1, 3, 1, 0.05, 200.0, -0.2, 0.2, true, true}};
  return n;
}

/// Two identical parallel corridors; corridor A is limited, B is not.
/// Pushing flow from A to B (beta_A < 0 or beta_B > 0) is optimal.
inline Network parallel_paths() {
  Network n;
  n.buses = {{1, 1.0, std::nullopt}, {2, 1.0, FuzzyDemand{200, 260, 140}}};
  n.generators = {{1, 0.0, 1000.0}};
  n.lines = {{1, 2, 1, 0.1, 110.0, -0.2, 0.2, true, true}, {1, 2, 2, 0.1, 500.0, -0.2, 0.2, true, true}};
  return n;
}

/// Random connected network with `buses` buses: a random spanning tree plus
/// `extra` chords, demands at most buses, and generators at two buses.
/// Values are drawn on coarse grids so limits bind at some alpha levels.
inline Network random_network(std::uint64_t seed, int buses, int extra) {
  CounterRng rng(seed, 0xcafe);
  auto pick = [&](int n) { return static_cast<int>(rng.uniform() * n); };
  auto round_to = [](double v, double step) { return std::round(v / step) * step; };
  Network n;
  n.base_mva = 100.0;
  double total = 0.0;
  for (int i = 1; i <= buses; ++i) {
    Bus b;
    b.id = i;
    b.weight = rng.uniform() < 0.2 ? round_to(rng.uniform(0.5, 2.0), 0.25) : 1.0;
    if (i > 1 && rng.uniform() < 0.8) {
      const double f = round_to(rng.uniform(20.0, 200.0), 1.0);
      const double up = round_to(f * rng.uniform(0.02, 0.3), 0.5);
      const double down = round_to(f * rng.uniform(0.02, 0.3), 0.5);
      b.demand = FuzzyDemand{f, f + up, f - down};
      total += f + up;
    }
    n.buses.push_back(b);
  }
  const int g2 = 2 + pick(buses - 1);
  n.generators.push_back({1, 0.0, round_to(0.7 * total + 50.0, 1.0)});
  n.generators.push_back({g2, round_to(rng.uniform(0.0, 10.0), 1.0), round_to(0.5 * total + 20.0, 1.0)});

  auto add_line = [&](int a, int b, int circuit) {
    Line l;
    l.from = a;
    l.to = b;
    l.circuit = circuit;
    l.x = round_to(rng.uniform(0.01, 0.12), 0.001);
    l.limit = round_to(rng.uniform(0.25, 1.0) * (total / 2.0 + 30.0), 1.0);
    const double cap = round_to(rng.uniform(0.05, 0.4), 0.05);
    l.beta_min = -cap;
    l.beta_max = cap;
    l.candidate = rng.uniform() < 0.85;
    n.lines.push_back(l);
  };
  for (int i = 2; i <= buses; ++i) add_line(1 + pick(i - 1), i, 1);
  for (int e = 0; e < extra; ++e) {
    int a = 1 + pick(buses), b = 1 + pick(buses);
    if (a == b) b = a % buses + 1;
    int circuit = 1;
    for (const Line& l : n.lines)
      if ((l.from == a && l.to == b) || (l.from == b && l.to == a)) circuit = std::max(circuit, l.circuit + 1);
    add_line(a, b, circuit);
  }
  if (rng.uniform() < 0.5) n.reference_bus = 1 + pick(buses);
  return n;
}

/// First random network at or after `seed` that is feasible at alpha = 0 in
/// both directions and cannot reach its upper demand bounds.
inline Network repressed_network(std::uint64_t& seed, int buses, int extra) {
  for (;; ++seed) {
    Network n = random_network(seed, buses, extra);
    const auto lo = solve_fixed_beta({n, 0.0, Direction::Min});
    const auto hi = solve_fixed_beta({n, 0.0, Direction::Max});
    if (lo.optimal() && hi.optimal() && hi.objective < ideal_objective(n, 0.0, Direction::Max) - 1e-3) {
      ++seed;
      return n;
    }
  }
}

}  // namespace gridflex::testing
