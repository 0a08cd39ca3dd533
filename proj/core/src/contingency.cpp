#include "gridflex/contingency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gridflex/parallel.hpp"

namespace gridflex {

double OutageEntry::base_lr() const {
  const OutageCell* c = find(StrategyKind::Base, 0.0);
  return c ? c->total_lr : std::numeric_limits<double>::quiet_NaN();
}

const OutageCell* OutageEntry::find(StrategyKind kind, double capacity) const {
  for (const OutageCell& c : cells)
    if (c.kind == kind && (kind == StrategyKind::Base || std::abs(c.capacity - capacity) < 1e-12)) return &c;
  return nullptr;
}

namespace {

OutageCell summarize(StrategyKind kind, double capacity, const RepressionResult& r, const Network& net) {
  OutageCell cell;
  cell.kind = kind;
  cell.capacity = capacity;
  cell.defined = r.defined();
  cell.total_lr = r.total_lr;
  for (const BusRepression& b : r.buses) cell.bus_lr.push_back(b.lr());
  const int worst = r.worst_bus();
  if (worst >= 0) {
    cell.worst_bus_id = net.buses[worst].id;
    cell.worst_bus_lr = r.buses[worst].lr();
  }
  return cell;
}

}  // namespace

ContingencyTable n_minus_1(const Network& net, const std::vector<StrategyKind>& strategies,
                           const std::vector<double>& capacities, const AlphaGrid& grid,
                           const SolverSettings& settings, const ContingencyOptions& options) {
  std::vector<OutageEntry> entries;
  if (options.include_intact) {
    OutageEntry intact;
    intact.label = "intact";
    entries.push_back(intact);
  }
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    if (!net.lines[k].in_service) continue;
    OutageEntry e;
    e.line_index = static_cast<int>(k);
    e.label = line_label(net.lines[k]);
    if (!options.only.empty()) {
      const bool wanted = std::any_of(options.only.begin(), options.only.end(),
                                      [&](const std::string& s) { return net.find_line(s) == e.line_index; });
      if (!wanted) continue;
    }
    entries.push_back(e);
  }
  for (const std::string& s : options.only)
    if (net.find_line(s) < 0) throw std::invalid_argument("unknown line in outage filter: " + s);

  // Cell plan: Base once, other strategies once per capacity.
  std::vector<Strategy> plan;
  for (StrategyKind kind : strategies) {
    if (kind == StrategyKind::Base) {
      plan.push_back({kind, 0.0});
      continue;
    }
    for (double cap : capacities) plan.push_back({kind, cap});
  }

  SolverSettings inner = settings;
  inner.threads = 1;
  RepressionOptions ropts;
  ropts.degree_width = 0.0;
  const int jobs = static_cast<int>(entries.size() * plan.size());
  std::vector<OutageCell> cells(jobs);
  std::vector<char> island(entries.size(), 0);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (entries[e].line_index < 0) continue;
    island[e] = !is_connected(with_outage(net, entries[e].line_index));
  }

  parallel_for(jobs, settings.threads, [&](int job) {
    const std::size_t e = job / plan.size();
    const Strategy& strategy = plan[job % plan.size()];
    if (island[e]) return;
    const Network study = entries[e].line_index < 0 ? net : with_outage(net, entries[e].line_index);
    const RepressionResult r = compute_repression(study, strategy, grid, inner, ropts);
    cells[job] = summarize(strategy.kind, strategy.capacity, r, study);
  });

  for (std::size_t e = 0; e < entries.size(); ++e) {
    entries[e].islanding = island[e] != 0;
    if (entries[e].islanding) continue;
    for (std::size_t c = 0; c < plan.size(); ++c) entries[e].cells.push_back(cells[e * plan.size() + c]);
  }

  const auto first_outage = entries.begin() + (options.include_intact ? 1 : 0);
  std::stable_sort(first_outage, entries.end(), [](const OutageEntry& a, const OutageEntry& b) {
    if (a.islanding != b.islanding) return !a.islanding;
    const double la = a.base_lr(), lb = b.base_lr();
    const double ka = std::isnan(la) ? -1.0 : la, kb = std::isnan(lb) ? -1.0 : lb;
    return ka > kb;
  });
  return {std::move(entries)};
}

}  // namespace gridflex
