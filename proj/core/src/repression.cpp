#include "gridflex/repression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "gridflex/lpcore.hpp"
#include "gridflex/parallel.hpp"

namespace gridflex {

AlphaGrid::AlphaGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2 || points_.front() != 0.0 || points_.back() != 1.0)
    throw std::invalid_argument("alpha grid must start at 0 and end at 1");
  for (std::size_t i = 1; i < points_.size(); ++i)
    if (!(points_[i] > points_[i - 1])) throw std::invalid_argument("alpha grid must be strictly increasing");
}

AlphaGrid AlphaGrid::uniform(int count) {
  if (count < 2) throw std::invalid_argument("alpha grid needs at least two points");
  std::vector<double> pts(count);
  for (int i = 0; i < count; ++i) pts[i] = static_cast<double>(i) / (count - 1);
  pts.back() = 1.0;
  return AlphaGrid(std::move(pts));
}

int RepressionResult::worst_bus() const {
  int worst = -1;
  double value = kRepressionTol;
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].lr() > value) {
      value = buses[i].lr();
      worst = static_cast<int>(i);
    }
  }
  return worst;
}

namespace {

std::uint64_t stream_for(double alpha, Direction d) {
  return std::bit_cast<std::uint64_t>(alpha) * 2 + (d == Direction::Max ? 1 : 0);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return area;
}

double gap(const Bus& bus, const AlphaCutSolution& sol, std::size_t i) {
  if (!bus.demand || !sol.optimal()) return 0.0;
  const Interval iv = fuzzy_bounds(*bus.demand, sol.alpha);
  const double g = sol.direction == Direction::Max ? iv.upper - sol.demand[i] : sol.demand[i] - iv.lower;
  return g > kRepressionTol ? g : 0.0;
}

}  // namespace

AlphaCutSolution solve_cut(const Network& net, const Strategy& strategy, std::optional<double> budget,
                           double alpha, Direction direction, const SolverSettings& settings,
                           std::uint64_t stream) {
  if (strategy.kind == StrategyKind::Base || strategy.capacity <= 0.0) {
    return solve_fixed_beta({net, alpha, direction, {}, {}});
  }
  SolverSettings s = settings;
  s.seed = settings.seed ^ (stream * 0x9e3779b97f4a7c15ULL);
  return solve_mfacts({net, alpha, direction, strategy, budget, {}}, s);
}

RepressionResult compute_repression(const Network& net, const Strategy& strategy, const AlphaGrid& grid,
                                    const SolverSettings& settings, const RepressionOptions& options) {
  const auto& alphas = grid.points();
  const int levels = static_cast<int>(alphas.size());
  RepressionResult out;
  out.solutions.resize(levels);

  parallel_for(levels * 2, settings.threads, [&](int task) {
    const int level = task / 2;
    const Direction dir = task % 2 == 0 ? Direction::Min : Direction::Max;
    out.solutions[level][task % 2] =
        solve_cut(net, strategy, options.budget, alphas[level], dir, settings, stream_for(alphas[level], dir));
  });

  for (int level = 0; level < levels; ++level) {
    if (!out.solutions[level][0].optimal() || !out.solutions[level][1].optimal())
      out.infeasible_alphas.push_back(alphas[level]);
  }

  // Off-grid cuts for degree bisection, cached per (alpha, direction).
  std::map<std::pair<double, int>, AlphaCutSolution> extra;
  auto cut_at = [&](double alpha, Direction dir) -> const AlphaCutSolution& {
    const auto key = std::make_pair(alpha, dir == Direction::Max ? 1 : 0);
    auto it = extra.find(key);
    if (it == extra.end())
      it = extra.emplace(key, solve_cut(net, strategy, options.budget, alpha, dir, settings, stream_for(alpha, dir)))
               .first;
    return it->second;
  };

  const std::size_t nb = net.buses.size();
  out.buses.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const Bus& bus = net.buses[i];
    BusRepression& br = out.buses[i];
    br.bus_id = bus.id;
    br.has_demand = bus.demand.has_value();
    if (!bus.demand) continue;

    std::vector<double> up(levels), down(levels);
    for (int level = 0; level < levels; ++level) {
      const AlphaCutSolution& mn = out.solutions[level][0];
      const AlphaCutSolution& mx = out.solutions[level][1];
      up[level] = gap(bus, mx, i);
      down[level] = gap(bus, mn, i);
      EnvelopePoint ep;
      ep.alpha = alphas[level];
      ep.forecast = fuzzy_bounds(*bus.demand, alphas[level]);
      ep.feasible = mn.optimal() && mx.optimal();
      ep.achieved = {mn.optimal() ? mn.demand[i] : std::numeric_limits<double>::quiet_NaN(),
                     mx.optimal() ? mx.demand[i] : std::numeric_limits<double>::quiet_NaN()};
      br.envelope.push_back(ep);
    }
    br.lr_up = trapezoid(alphas, up);
    br.lr_down = trapezoid(alphas, down);
    if (!out.defined()) br.lr_up = br.lr_down = std::numeric_limits<double>::quiet_NaN();

    auto degree = [&](const std::vector<double>& gaps, Direction dir) {
      RepressionDegree d;
      int last = -1;
      for (int level = 0; level < levels; ++level)
        if (gaps[level] > kRepressionTol) last = level;
      if (last < 0) return d;
      d.repressed = true;
      if (last == levels - 1) {
        d.degree = 1.0;
        return d;
      }
      double lo = alphas[last], hi = alphas[last + 1];
      if (options.degree_width > 0.0) {
        while (hi - lo > options.degree_width) {
          const double mid = 0.5 * (lo + hi);
          const AlphaCutSolution& sol = cut_at(mid, dir);
          if (sol.optimal() && gap(bus, sol, i) > kRepressionTol) lo = mid;
          else hi = mid;
        }
        d.degree = 0.5 * (lo + hi);
      } else {
        d.degree = lo;
      }
      return d;
    };
    br.degree_max = degree(up, Direction::Max);
    br.degree_min = degree(down, Direction::Min);
  }

  if (out.defined()) {
    for (const BusRepression& br : out.buses) {
      out.total_lr_up += br.lr_up;
      out.total_lr_down += br.lr_down;
    }
    out.total_lr = out.total_lr_up + out.total_lr_down;
  } else {
    out.total_lr = out.total_lr_up = out.total_lr_down = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<SweepCell> capacity_sweep(const Network& net, const std::vector<StrategyKind>& strategies,
                                      const std::vector<double>& capacities, const AlphaGrid& grid,
                                      const SolverSettings& settings) {
  for (double c : capacities)
    if (c < 0.0 || c > -kBetaFloor) throw std::invalid_argument("capacity must lie in [0, 0.9]");
  std::vector<SweepCell> cells;
  RepressionOptions opts;
  opts.degree_width = 0.0;
  for (StrategyKind kind : strategies) {
    for (double cap : capacities) {
      const RepressionResult r = compute_repression(net, {kind, cap}, grid, settings, opts);
      cells.push_back({kind, cap, r.total_lr, r.defined()});
    }
  }
  return cells;
}

std::optional<double> zero_repression_capacity(const Network& net, StrategyKind kind, const AlphaGrid& grid,
                                               const SolverSettings& settings, double lo, double hi,
                                               double width, double tol) {
  RepressionOptions opts;
  opts.degree_width = 0.0;
  auto lr_at = [&](double cap) { return compute_repression(net, {kind, cap}, grid, settings, opts).total_lr; };
  if (!(lr_at(hi) <= tol)) return std::nullopt;
  if (lr_at(lo) <= tol) return lo;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (lr_at(mid) <= tol) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace gridflex
