#include "gridflex/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridflex {

std::vector<double> default_tau_values(const Network& net, const Strategy& strategy, int count) {
  if (count < 1) throw std::invalid_argument("tau count must be positive");
  double total = 0.0;
  for (const Interval& b : effective_beta_bounds(net, strategy)) total += std::max(std::abs(b.lower), std::abs(b.upper));
  std::vector<double> taus(count);
  for (int i = 0; i < count; ++i) taus[i] = count == 1 ? total : total * i / (count - 1);
  return taus;
}

AllocationResult allocate(const Network& net, const Strategy& strategy, const std::vector<double>& taus,
                          std::optional<int> outage, const AlphaGrid& grid, const SolverSettings& settings) {
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] >= 0.0)) throw std::invalid_argument("tau must be nonnegative");
    if (i > 0 && !(taus[i] > taus[i - 1])) throw std::invalid_argument("tau values must be strictly increasing");
  }
  const Network study = outage ? with_outage(net, *outage) : net;
  const std::size_t nl = study.lines.size();

  AllocationResult out;
  RepressionOptions opts;
  opts.degree_width = 0.0;
  for (double tau : taus) {
    opts.budget = tau;
    const RepressionResult r = compute_repression(study, strategy, grid, settings, opts);
    AllocationPoint p;
    p.tau = tau;
    p.defined = r.defined();
    p.total_lr = r.total_lr;
    const AlphaCutSolution& stressed = r.solutions.front()[1];
    p.beta = stressed.optimal() ? stressed.beta : std::vector<double>(nl, 0.0);
    out.points.push_back(std::move(p));
  }

  // First budget index at which each line exceeds the threshold.
  struct First {
    int line;
    std::size_t point;
    double magnitude;
  };
  std::vector<First> firsts;
  for (std::size_t k = 0; k < nl; ++k) {
    for (std::size_t t = 0; t < out.points.size(); ++t) {
      const double m = std::abs(out.points[t].beta[k]);
      if (m > kActivationThreshold) {
        firsts.push_back({static_cast<int>(k), t, m});
        break;
      }
    }
  }
  std::stable_sort(firsts.begin(), firsts.end(), [](const First& a, const First& b) {
    if (a.point != b.point) return a.point < b.point;
    return a.magnitude > b.magnitude;
  });
  for (const First& f : firsts) {
    Activation a;
    a.line_index = f.line;
    a.label = line_label(study.lines[f.line]);
    a.tau = out.points[f.point].tau;
    a.ambiguous = std::count_if(firsts.begin(), firsts.end(), [&](const First& g) { return g.point == f.point; }) > 1;
    out.activation_order.push_back(a);
  }
  return out;
}

}  // namespace gridflex
