#include "dc_internal.hpp"

#include <stdexcept>

namespace gridflex::detail {

DcView::DcView(const Network& n) : net(n), base(n.base_mva) {
  num_buses = static_cast<int>(n.buses.size());
  ref = n.bus_index(n.effective_reference_bus());
  if (ref < 0) throw std::invalid_argument("reference bus not found");
  from.resize(n.lines.size());
  to.resize(n.lines.size());
  for (std::size_t k = 0; k < n.lines.size(); ++k) {
    from[k] = n.bus_index(n.lines[k].from);
    to[k] = n.bus_index(n.lines[k].to);
    if (n.lines[k].in_service) active.push_back(static_cast<int>(k));
  }
  for (const Generator& g : n.generators) gen_bus.push_back(n.bus_index(g.bus));
  reduced.assign(num_buses, -1);
  int next = 0;
  for (int i = 0; i < num_buses; ++i)
    if (i != ref) reduced[i] = next++;
}

Eigen::MatrixXd DcView::reduced_inverse(const std::vector<double>& beta) const {
  const int nr = num_buses - 1;
  Eigen::MatrixXd bred = Eigen::MatrixXd::Zero(nr, nr);
  for (int k : active) {
    const double bk = b(k, beta.empty() ? 0.0 : beta[k]);
    const int a = reduced[from[k]], c = reduced[to[k]];
    if (a >= 0) bred(a, a) += bk;
    if (c >= 0) bred(c, c) += bk;
    if (a >= 0 && c >= 0) {
      bred(a, c) -= bk;
      bred(c, a) -= bk;
    }
  }
  if (nr == 0) return bred;
  return bred.partialPivLu().inverse();
}

InjectionColumns::InjectionColumns(const DcView& view, lp::Problem& lp, double alpha, bool split) {
  const Network& net = view.net;
  demand_of_bus.assign(view.num_buses, -1);
  gens_at_bus.assign(view.num_buses, {});
  for (int i = 0; i < view.num_buses; ++i) {
    const Bus& bus = net.buses[i];
    if (!bus.demand) continue;
    const Interval iv = fuzzy_bounds(*bus.demand, alpha);
    DemandColumn c;
    c.bus = i;
    c.forecast = bus.demand->forecast / view.base;
    c.lower = iv.lower / view.base;
    c.upper = iv.upper / view.base;
    if (split) {
      c.up = lp.add_variable(0.0, std::max(0.0, c.upper - c.forecast));
      c.down = lp.add_variable(0.0, std::max(0.0, c.forecast - c.lower));
    } else {
      c.var = lp.add_variable(c.lower, c.upper);
    }
    demand_of_bus[i] = static_cast<int>(demands.size());
    demands.push_back(c);
  }
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    gens.push_back(lp.add_variable(gen.p_min / view.base, gen.p_max / view.base));
    gens_at_bus[view.gen_bus[g]].push_back(gens.back());
  }
}

double InjectionColumns::add_demand(lp::Row& row, int bus, double coef) const {
  const int e = demand_of_bus[bus];
  if (e < 0 || coef == 0.0) return 0.0;
  const DemandColumn& c = demands[e];
  if (c.var >= 0) {
    row.terms.emplace_back(c.var, coef);
    return 0.0;
  }
  row.terms.emplace_back(c.up, coef);
  row.terms.emplace_back(c.down, -coef);
  return coef * c.forecast;
}

void InjectionColumns::add_generation(lp::Row& row, int bus, double coef) const {
  if (coef == 0.0) return;
  for (int g : gens_at_bus[bus]) row.terms.emplace_back(g, coef);
}

double InjectionColumns::demand_value(const std::vector<double>& x, int bus) const {
  const int e = demand_of_bus[bus];
  if (e < 0) return 0.0;
  const DemandColumn& c = demands[e];
  if (c.var >= 0) return x[c.var];
  return c.forecast + x[c.up] - x[c.down];
}

double set_demand_objective(const InjectionColumns& cols, lp::Problem& lp,
                            const std::vector<double>& weights, double sign) {
  double constant = 0.0;
  for (const auto& c : cols.demands) {
    const double w = sign * weights[c.bus];
    if (c.var >= 0) {
      lp.set_cost(c.var, w);
    } else {
      lp.set_cost(c.up, w);
      lp.set_cost(c.down, -w);
      constant += w * c.forecast;
    }
  }
  return constant;
}

std::vector<double> angles_from_injections(const DcView& view, const Eigen::MatrixXd& xinv,
                                           const std::vector<double>& injection) {
  std::vector<double> theta(view.num_buses, 0.0);
  const int nr = view.num_buses - 1;
  if (nr == 0) return theta;
  Eigen::VectorXd p(nr);
  for (int i = 0; i < view.num_buses; ++i)
    if (view.reduced[i] >= 0) p(view.reduced[i]) = injection[i];
  const Eigen::VectorXd t = xinv * p;
  for (int i = 0; i < view.num_buses; ++i)
    if (view.reduced[i] >= 0) theta[i] = t(view.reduced[i]);
  return theta;
}

AlphaCutSolution assemble_solution(const DcView& view, const InjectionColumns& cols,
                                   const std::vector<double>& x, const std::vector<double>& theta,
                                   const std::vector<double>& beta, double alpha, Direction dir,
                                   const std::vector<double>& weights) {
  const Network& net = view.net;
  AlphaCutSolution s;
  s.alpha = alpha;
  s.direction = dir;
  s.status = SolveStatus::Optimal;
  s.demand.assign(view.num_buses, 0.0);
  s.angle = theta;
  for (int i = 0; i < view.num_buses; ++i) {
    s.demand[i] = cols.demand_value(x, i) * view.base;
    s.objective += weights[i] * s.demand[i];
  }
  s.generation.resize(net.generators.size());
  for (std::size_t g = 0; g < net.generators.size(); ++g) s.generation[g] = x[cols.gens[g]] * view.base;
  s.beta.assign(net.lines.size(), 0.0);
  s.flow.assign(net.lines.size(), 0.0);
  for (int k : view.active) {
    s.beta[k] = beta.empty() ? 0.0 : beta[k];
    s.flow[k] = view.base * view.b(k, s.beta[k]) * (theta[view.from[k]] - theta[view.to[k]]);
  }
  return s;
}

SolveStatus to_solve_status(lp::Status s) {
  switch (s) {
    case lp::Status::Optimal: return SolveStatus::Optimal;
    case lp::Status::Infeasible: return SolveStatus::Infeasible;
    case lp::Status::IterationLimit: return SolveStatus::IterationLimit;
    case lp::Status::Unbounded: return SolveStatus::NumericalFailure;
  }
  return SolveStatus::NumericalFailure;
}

}  // namespace gridflex::detail
