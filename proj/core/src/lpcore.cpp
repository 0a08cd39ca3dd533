#include "gridflex/lpcore.hpp"

#include <algorithm>
#include <cmath>

#include "dc_internal.hpp"

namespace gridflex {

using detail::DcView;
using detail::InjectionColumns;

double ideal_objective(const Network& net, double alpha, Direction direction,
                       const std::vector<double>& weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& b = net.buses[i];
    if (!b.demand) continue;
    const double w = weights.empty() ? b.weight : weights[i];
    const Interval iv = fuzzy_bounds(*b.demand, alpha);
    total += w * (direction == Direction::Max ? iv.upper : iv.lower);
  }
  return total;
}

namespace {

struct FlowRow {
  int line = -1;
  std::vector<double> ptdf;  // per bus
};

// Flow rows of every line whose flow range over the variable box can
// exceed its limit.
std::vector<FlowRow> screen_rows(const DcView& view, const InjectionColumns& cols, const lp::Problem& lp,
                                 const Eigen::MatrixXd& xinv, const std::vector<double>& beta) {
  std::vector<FlowRow> out;
  auto x_of = [&](int bus, int reduced_col) {
    return view.reduced[bus] < 0 ? 0.0 : xinv(view.reduced[bus], reduced_col);
  };
  for (int k : view.active) {
    FlowRow fr;
    fr.line = k;
    fr.ptdf.assign(view.num_buses, 0.0);
    const double bk = view.b(k, beta[k]);
    for (int i = 0; i < view.num_buses; ++i) {
      const int ri = view.reduced[i];
      if (ri < 0) continue;
      fr.ptdf[i] = bk * (x_of(view.from[k], ri) - x_of(view.to[k], ri));
    }
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < view.num_buses; ++i) {
      const double c = fr.ptdf[i];
      if (std::abs(c) < 1e-12) continue;
      for (int g : cols.gens_at_bus[i]) {
        const double a = c * lp.lower()[g], b = c * lp.upper()[g];
        lo += std::min(a, b);
        hi += std::max(a, b);
      }
      const int e = cols.demand_of_bus[i];
      if (e >= 0) {
        const double a = -c * cols.demands[e].lower, b = -c * cols.demands[e].upper;
        lo += std::min(a, b);
        hi += std::max(a, b);
      }
    }
    const double lim = view.limit_pu(k);
    if (lo >= -lim && hi <= lim) continue;
    out.push_back(std::move(fr));
  }
  return out;
}

void add_balance_row(const DcView& view, const InjectionColumns& cols, lp::Problem& lp) {
  lp::Row balance;
  double constant = 0.0;
  for (int i = 0; i < view.num_buses; ++i) {
    cols.add_generation(balance, i, 1.0);
    constant += cols.add_demand(balance, i, -1.0);
  }
  balance.lower = balance.upper = -constant;
  lp.add_row(std::move(balance));
}

void add_flow_row(const DcView& view, const InjectionColumns& cols, lp::Problem& lp, const FlowRow& fr) {
  lp::Row row;
  double constant = 0.0;
  for (int i = 0; i < view.num_buses; ++i) {
    const double c = fr.ptdf[i];
    if (std::abs(c) < 1e-12) continue;
    cols.add_generation(row, i, c);
    constant += cols.add_demand(row, i, -c);
  }
  const double lim = view.limit_pu(fr.line);
  row.lower = -lim - constant;
  row.upper = lim - constant;
  lp.add_row(std::move(row));
}

std::vector<double> injections(const DcView& view, const InjectionColumns& cols,
                               const std::vector<double>& x) {
  std::vector<double> inj(view.num_buses, 0.0);
  for (int i = 0; i < view.num_buses; ++i) {
    for (int g : cols.gens_at_bus[i]) inj[i] += x[g];
    inj[i] -= cols.demand_value(x, i);
  }
  return inj;
}

}  // namespace

AlphaCutSolution solve_fixed_beta(const LpSubproblem& p, const LpOptions& o) {
  const DcView view(p.net);
  const std::vector<double> weights = p.weights.empty() ? bus_weights(p.net) : p.weights;
  std::vector<double> beta(p.net.lines.size(), 0.0);
  for (int k : view.active)
    if (!p.beta_fixed.empty()) beta[k] = p.beta_fixed[k];
  const Eigen::MatrixXd xinv = view.reduced_inverse(beta);
  const double sign = p.direction == Direction::Max ? -1.0 : 1.0;

  lp::Problem first;
  InjectionColumns cols(view, first, p.alpha, /*split=*/false);
  const std::vector<FlowRow> kept = screen_rows(view, cols, first, xinv, beta);
  add_balance_row(view, cols, first);
  for (const FlowRow& fr : kept) add_flow_row(view, cols, first, fr);
  detail::set_demand_objective(cols, first, weights, sign);
  const lp::Result r1 = lp::solve(first, o.simplex);

  AlphaCutSolution failed;
  failed.alpha = p.alpha;
  failed.direction = p.direction;
  failed.status = detail::to_solve_status(r1.status);
  if (r1.status != lp::Status::Optimal) return failed;

  std::vector<double> x = r1.x;
  const InjectionColumns* final_cols = &cols;
  lp::Problem second;
  InjectionColumns split_cols(view, second, p.alpha, /*split=*/true);
  if (o.tie_break && !cols.demands.empty()) {
    add_balance_row(view, split_cols, second);
    for (const FlowRow& fr : kept) add_flow_row(view, split_cols, second, fr);
    const double optimum = sign * r1.objective;  // weighted demand in pu
    lp::Row pin;
    double constant = 0.0;
    for (const auto& c : split_cols.demands) constant += split_cols.add_demand(pin, c.bus, weights[c.bus]);
    const double slack = 1e-9 * std::max(1.0, std::abs(optimum));
    if (p.direction == Direction::Max) {
      pin.lower = optimum - slack - constant;
    } else {
      pin.upper = optimum + slack - constant;
    }
    second.add_row(std::move(pin));
    const double nb = static_cast<double>(view.num_buses);
    for (const auto& c : split_cols.demands) {
      // Lower bus ids carry a slightly larger penalty so exact ties resolve in id order.
      int rank = 0;
      for (const Bus& b : p.net.buses) rank += b.id < p.net.buses[c.bus].id ? 1 : 0;
      const double rho = 1.0 + 1e-3 * (nb - rank) / nb;
      second.set_cost(c.up, rho);
      second.set_cost(c.down, rho);
    }
    const lp::Result r2 = lp::solve(second, o.simplex);
    if (r2.status == lp::Status::Optimal) {
      x = r2.x;
      final_cols = &split_cols;
    }
  }

  const std::vector<double> theta =
      detail::angles_from_injections(view, xinv, injections(view, *final_cols, x));
  AlphaCutSolution out =
      detail::assemble_solution(view, *final_cols, x, theta, beta, p.alpha, p.direction, weights);
  // The stage-one optimum, not the pinned re-solve, is the reported value.
  out.objective = sign * r1.objective * view.base;
  return out;
}

}  // namespace gridflex
