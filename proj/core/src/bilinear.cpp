#include "gridflex/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dc_internal.hpp"
#include "gridflex/lpcore.hpp"
#include "gridflex/parallel.hpp"

namespace gridflex {

using detail::DcView;
using detail::InjectionColumns;

namespace {

constexpr double kAngleEps = 1e-10;

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

class MfactsSolver {
 public:
  MfactsSolver(const BilinearProblem& p, const SolverSettings& s)
      : p_(p), s_(s), view_(p.net), bounds_(effective_beta_bounds(p.net, p.strategy)) {
    weights_ = p.weights.empty() ? bus_weights(p.net) : p.weights;
    for (int k : view_.active)
      if (bounds_[k].lower < bounds_[k].upper) adjustable_.push_back(k);
  }

  const std::vector<int>& adjustable() const { return adjustable_; }
  const std::vector<Interval>& bounds() const { return bounds_; }
  int lp_solves() const { return lp_solves_; }

  // Larger is better in both directions.
  double score(double objective) const {
    return p_.direction == Direction::Max ? objective : -objective;
  }

  AlphaCutSolution fixed(const std::vector<double>& beta, bool tie_break = false) {
    ++lp_solves_;
    LpOptions o;
    o.tie_break = tie_break;
    return solve_fixed_beta({p_.net, p_.alpha, p_.direction, beta, weights_}, o);
  }

  // Angles held at `cur`; optimizes dispatch and beta on adjustable lines.
  // With `minimize_beta` the objective is pinned near `pin` and sum |beta| is
  // minimized instead. Returns the new beta vector.
  std::optional<std::vector<double>> beta_step(const AlphaCutSolution& cur, bool minimize_beta = false,
                                               double pin = 0.0) {
    const bool split = p_.budget.has_value() || minimize_beta;
    lp::Problem lp;
    InjectionColumns cols(view_, lp, p_.alpha, false);
    const double base = view_.base;

    struct BetaCols {
      int line, plain = -1, pos = -1, neg = -1;
      double gain;  // d(flow)/d(beta) in pu
    };
    std::vector<BetaCols> vars;
    std::vector<double> beta = cur.beta;
    for (int k : adjustable_) {
      const double dtheta = cur.angle[view_.from[k]] - cur.angle[view_.to[k]];
      const double gain = view_.b(k, 0.0) * dtheta;
      Interval iv = bounds_[k];
      if (std::abs(gain) > kAngleEps) {
        const double lim = view_.limit_pu(k);
        const double a = -lim / std::abs(gain) - 1.0, b = lim / std::abs(gain) - 1.0;
        iv.lower = std::max(iv.lower, a);
        iv.upper = std::min(iv.upper, b);
        if (iv.lower > iv.upper) iv.lower = iv.upper = std::clamp(cur.beta[k], bounds_[k].lower, bounds_[k].upper);
      }
      BetaCols bc{k, -1, -1, -1, gain};
      if (split) {
        bc.pos = lp.add_variable(0.0, std::max(0.0, bounds_[k].upper));
        bc.neg = lp.add_variable(0.0, std::max(0.0, -bounds_[k].lower));
        lp::Row r;
        r.terms = {{bc.pos, 1.0}, {bc.neg, -1.0}};
        r.lower = iv.lower;
        r.upper = iv.upper;
        lp.add_row(std::move(r));
      } else {
        bc.plain = lp.add_variable(iv.lower, iv.upper);
      }
      vars.push_back(bc);
    }
    std::vector<int> var_of_line(p_.net.lines.size(), -1);
    for (std::size_t v = 0; v < vars.size(); ++v) var_of_line[vars[v].line] = static_cast<int>(v);

    for (int i = 0; i < view_.num_buses; ++i) {
      lp::Row r;
      cols.add_generation(r, i, 1.0);
      cols.add_demand(r, i, -1.0);
      double constant = 0.0;
      for (int k : view_.active) {
        const int sgn = view_.from[k] == i ? -1 : (view_.to[k] == i ? 1 : 0);
        if (sgn == 0) continue;
        const double dtheta = cur.angle[view_.from[k]] - cur.angle[view_.to[k]];
        const int v = var_of_line[k];
        if (v < 0) {
          constant += sgn * view_.b(k, beta[k]) * dtheta;
          continue;
        }
        const BetaCols& bc = vars[v];
        constant += sgn * bc.gain;
        if (std::abs(bc.gain) <= kAngleEps) continue;
        if (bc.plain >= 0) {
          r.terms.emplace_back(bc.plain, sgn * bc.gain);
        } else {
          r.terms.emplace_back(bc.pos, sgn * bc.gain);
          r.terms.emplace_back(bc.neg, -sgn * bc.gain);
        }
      }
      if (r.terms.empty()) continue;
      r.lower = r.upper = -constant;
      lp.add_row(std::move(r));
    }

    if (p_.budget) {
      lp::Row r;
      for (const BetaCols& bc : vars) {
        r.terms.emplace_back(bc.pos, 1.0);
        r.terms.emplace_back(bc.neg, 1.0);
      }
      r.upper = *p_.budget;
      lp.add_row(std::move(r));
    }

    const double sign = p_.direction == Direction::Max ? -1.0 : 1.0;
    if (minimize_beta) {
      lp::Row r;
      for (const auto& c : cols.demands) r.terms.emplace_back(c.var, weights_[c.bus]);
      const double slack = s_.tol_obj / base;
      if (p_.direction == Direction::Max) r.lower = pin / base - slack;
      else r.upper = pin / base + slack;
      lp.add_row(std::move(r));
      for (const BetaCols& bc : vars) {
        lp.set_cost(bc.pos, 1.0);
        lp.set_cost(bc.neg, 1.0);
      }
    } else {
      detail::set_demand_objective(cols, lp, weights_, sign);
    }

    ++lp_solves_;
    const lp::Result res = lp::solve(lp);
    if (res.status != lp::Status::Optimal) return std::nullopt;
    for (const BetaCols& bc : vars) {
      const double value = bc.plain >= 0 ? res.x[bc.plain] : res.x[bc.pos] - res.x[bc.neg];
      beta[bc.line] = std::clamp(value, bounds_[bc.line].lower, bounds_[bc.line].upper);
    }
    return beta;
  }

  // Exact program for a fixed flow-direction pattern on the adjustable
  // lines: the flow of line k lies between B(1+lo)dtheta and B(1+hi)dtheta.
  // Each adjustable line sits in the network at B(1+lo) and carries an extra
  // flow e_k between 0 and B(hi-lo)dtheta, modeled as a pair of injections.
  // `caps` narrows each line's range (used under a budget).
  struct ConeResult {
    double objective = 0.0;  // MW
    std::vector<double> beta;
  };

  std::optional<ConeResult> cone(const std::vector<int>& pattern, const std::vector<Interval>& caps) {
    const std::size_t nl = p_.net.lines.size();
    std::vector<double> base_beta(nl, 0.0);
    std::vector<char> variable(nl, 0);
    for (int k : adjustable_) {
      variable[k] = caps[k].lower < caps[k].upper;
      base_beta[k] = variable[k] ? caps[k].lower : std::clamp(0.0, caps[k].lower, caps[k].upper);
    }
    const Eigen::MatrixXd xinv = view_.reduced_inverse(base_beta);
    auto x_of = [&](int bus, int col) { return view_.reduced[bus] < 0 ? 0.0 : xinv(view_.reduced[bus], col); };

    lp::Problem lp;
    InjectionColumns cols(view_, lp, p_.alpha, false);
    std::vector<int> extra(nl, -1);
    for (int k : adjustable_) {
      if (!variable[k]) continue;
      const double span = (caps[k].upper - caps[k].lower) / (1.0 + caps[k].lower) * view_.limit_pu(k);
      extra[k] = pattern[k] >= 0 ? lp.add_variable(0.0, span) : lp.add_variable(-span, 0.0);
    }

    // Sensitivity of line k's angle difference to a unit injection per bus.
    auto sensitivity = [&](int k) {
      std::vector<double> c(view_.num_buses, 0.0);
      for (int i = 0; i < view_.num_buses; ++i) {
        const int ri = view_.reduced[i];
        if (ri >= 0) c[i] = x_of(view_.from[k], ri) - x_of(view_.to[k], ri);
      }
      return c;
    };
    // Appends scale * dtheta_k to `row`; returns the constant part.
    auto add_dtheta = [&](lp::Row& row, const std::vector<double>& c, double scale) {
      double constant = 0.0;
      for (int i = 0; i < view_.num_buses; ++i) {
        if (c[i] == 0.0) continue;
        cols.add_generation(row, i, scale * c[i]);
        constant += cols.add_demand(row, i, -scale * c[i]);
      }
      for (int j : adjustable_) {
        if (extra[j] < 0) continue;
        const double coef = scale * (c[view_.to[j]] - c[view_.from[j]]);
        if (coef != 0.0) row.terms.emplace_back(extra[j], coef);
      }
      return constant;
    };

    {
      lp::Row balance;
      double constant = 0.0;
      for (int i = 0; i < view_.num_buses; ++i) {
        cols.add_generation(balance, i, 1.0);
        constant += cols.add_demand(balance, i, -1.0);
      }
      balance.lower = balance.upper = -constant;
      lp.add_row(std::move(balance));
    }
    std::vector<std::vector<double>> sens(nl);
    for (int k : view_.active) {
      sens[k] = sensitivity(k);
      const double bk = view_.b(k, base_beta[k]);
      const double lim = view_.limit_pu(k);
      lp::Row r;
      const double constant = add_dtheta(r, sens[k], bk);
      if (extra[k] >= 0) r.terms.emplace_back(extra[k], 1.0);
      r.lower = -lim - constant;
      r.upper = lim - constant;
      lp.add_row(std::move(r));
      if (extra[k] < 0) continue;
      // e_k - B(hi-lo) dtheta_k on the side given by the pattern.
      lp::Row c;
      const double gap = view_.b(k, caps[k].upper) - bk;
      const double cc = add_dtheta(c, sens[k], -gap);
      c.terms.emplace_back(extra[k], 1.0);
      if (pattern[k] >= 0) c.upper = -cc;
      else c.lower = -cc;
      lp.add_row(std::move(c));
    }
    const double sign = p_.direction == Direction::Max ? -1.0 : 1.0;
    detail::set_demand_objective(cols, lp, weights_, sign);

    ++lp_solves_;
    const lp::Result res = lp::solve(lp);
    if (res.status != lp::Status::Optimal) return std::nullopt;

    ConeResult out;
    out.objective = sign * res.objective * view_.base;
    out.beta = base_beta;
    std::vector<double> inj(view_.num_buses, 0.0);
    for (int i = 0; i < view_.num_buses; ++i) {
      for (int g : cols.gens_at_bus[i]) inj[i] += res.x[g];
      inj[i] -= cols.demand_value(res.x, i);
    }
    for (int j : adjustable_) {
      if (extra[j] < 0) continue;
      inj[view_.from[j]] -= res.x[extra[j]];
      inj[view_.to[j]] += res.x[extra[j]];
    }
    for (int k : adjustable_) {
      if (extra[k] < 0) continue;
      double dtheta = 0.0;
      for (int i = 0; i < view_.num_buses; ++i) dtheta += sens[k][i] * inj[i];
      const double nominal = view_.b(k, 0.0) * dtheta;
      const double flow = view_.b(k, base_beta[k]) * dtheta + res.x[extra[k]];
      double beta = base_beta[k];
      if (std::abs(nominal) > kAngleEps) beta = flow / nominal - 1.0;
      out.beta[k] = std::clamp(beta, caps[k].lower, caps[k].upper);
    }
    return out;
  }

  struct Incumbent {
    AlphaCutSolution sol;
    bool converged = false;
  };

  Incumbent alternate(std::vector<double> beta) {
    Incumbent inc;
    inc.sol = fixed(beta);
    if (!inc.sol.optimal()) return inc;
    for (int it = 0; it < s_.max_outer_iters; ++it) {
      auto next_beta = beta_step(inc.sol);
      if (!next_beta) {
        inc.converged = true;
        break;
      }
      AlphaCutSolution next = fixed(*next_beta);
      if (!next.optimal()) {
        inc.converged = true;
        break;
      }
      const double gain = score(next.objective) - score(inc.sol.objective);
      if (gain >= -s_.tol_obj) inc.sol = std::move(next);
      if (gain < s_.tol_obj) {
        inc.converged = true;
        break;
      }
    }
    return inc;
  }

  std::vector<int> pattern_of(const AlphaCutSolution& sol) const {
    std::vector<int> pattern(p_.net.lines.size(), 1);
    for (int k : adjustable_) pattern[k] = sol.angle[view_.from[k]] - sol.angle[view_.to[k]] >= 0.0 ? 1 : -1;
    return pattern;
  }

  // First-improvement search over single flips of the direction pattern.
  void improve_by_patterns(Incumbent& inc, const std::vector<Interval>& caps) {
    const bool memo = &caps == &bounds_;
    std::vector<int> pattern = pattern_of(inc.sol);
    auto evaluate = [&](const std::vector<int>& pat) -> std::optional<AlphaCutSolution> {
      std::optional<ConeResult> c;
      if (memo) {
        auto it = cone_cache_.find(pat);
        if (it == cone_cache_.end()) it = cone_cache_.emplace(pat, cone(pat, caps)).first;
        c = it->second;
      } else {
        c = cone(pat, caps);
      }
      if (!c || score(c->objective) <= score(inc.sol.objective) + s_.tol_obj) return std::nullopt;
      AlphaCutSolution sol = fixed(c->beta);
      if (!sol.optimal()) return std::nullopt;
      return sol;
    };
    if (auto first = evaluate(pattern); first && score(first->objective) > score(inc.sol.objective) + s_.tol_obj)
      inc.sol = std::move(*first);
    for (int pass = 0; pass < s_.max_outer_iters; ++pass) {
      bool improved = false;
      for (int k : adjustable_) {
        if (caps[k].lower >= caps[k].upper) continue;
        std::vector<int> trial = pattern;
        trial[k] = -trial[k];
        auto sol = evaluate(trial);
        if (sol && score(sol->objective) > score(inc.sol.objective) + s_.tol_obj) {
          inc.sol = std::move(*sol);
          pattern = pattern_of(inc.sol);
          pattern[k] = trial[k];
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
  }

  std::vector<double> random_start(CounterRng& rng) const {
    std::vector<double> beta(p_.net.lines.size(), 0.0);
    for (int k : adjustable_) beta[k] = rng.uniform(bounds_[k].lower, bounds_[k].upper);
    return project_to_budget(std::move(beta));
  }

  std::vector<double> project_to_budget(std::vector<double> beta) const {
    if (!p_.budget) return beta;
    const double total = l1(beta);
    if (total > *p_.budget && total > 0.0) {
      const double scale = *p_.budget / total;
      for (double& b : beta) b *= scale;
    }
    return beta;
  }

  bool reached_ideal(double objective) const {
    const double ideal = ideal_objective(p_.net, p_.alpha, p_.direction, weights_);
    return score(objective) >= score(ideal) - s_.tol_obj;
  }

 private:
  const BilinearProblem& p_;
  const SolverSettings& s_;
  DcView view_;
  std::vector<Interval> bounds_;
  std::vector<double> weights_;
  std::vector<int> adjustable_;
  int lp_solves_ = 0;
  std::map<std::vector<int>, std::optional<ConeResult>> cone_cache_;
};

}  // namespace

AlphaCutSolution solve_mfacts(const BilinearProblem& p, const SolverSettings& s, MfactsTrace* trace) {
  MfactsSolver solver(p, s);
  MfactsTrace local;
  MfactsTrace& tr = trace ? *trace : local;
  const std::vector<double> zero(p.net.lines.size(), 0.0);

  AlphaCutSolution base = solver.fixed(zero);
  if (!base.optimal() || solver.adjustable().empty() || solver.reached_ideal(base.objective) ||
      (p.budget && *p.budget <= 0.0)) {
    AlphaCutSolution out = base.optimal() ? solver.fixed(zero, true) : base;
    tr.lp_solves = solver.lp_solves();
    return out;
  }

  // Start list: zero, the strategy corners, then seeded random points.
  std::vector<std::vector<double>> starts;
  starts.push_back(zero);
  {
    std::vector<double> lo = zero, hi = zero;
    for (int k : solver.adjustable()) {
      lo[k] = solver.bounds()[k].lower;
      hi[k] = solver.bounds()[k].upper;
    }
    if (l1(lo) > 0.0) starts.push_back(solver.project_to_budget(lo));
    if (l1(hi) > 0.0) starts.push_back(solver.project_to_budget(hi));
  }
  CounterRng rng(s.seed, 0x6d66616374735ULL);
  while (static_cast<int>(starts.size()) < std::max(1, s.multistarts)) {
    CounterRng stream = rng.split(starts.size());
    starts.push_back(solver.random_start(stream));
  }

  std::optional<MfactsSolver::Incumbent> best;
  for (std::size_t idx = 0; idx < starts.size(); ++idx) {
    MfactsSolver::Incumbent inc = solver.alternate(starts[idx]);
    ++tr.starts_run;
    if (!inc.sol.optimal()) continue;
    if (!p.budget) {
      solver.improve_by_patterns(inc, solver.bounds());
    } else {
      // Reallocate within the per-line magnitudes the incumbent already uses.
      for (int round = 0; round < s.max_outer_iters; ++round) {
        std::vector<Interval> caps(p.net.lines.size(), Interval{0.0, 0.0});
        for (int k : solver.adjustable()) {
          const double t = std::abs(inc.sol.beta[k]);
          caps[k] = {std::max(solver.bounds()[k].lower, -t), std::min(solver.bounds()[k].upper, t)};
        }
        const double before = solver.score(inc.sol.objective);
        solver.improve_by_patterns(inc, caps);
        MfactsSolver::Incumbent again = solver.alternate(inc.sol.beta);
        if (again.sol.optimal() && solver.score(again.sol.objective) >= solver.score(inc.sol.objective))
          inc.sol = std::move(again.sol);
        if (solver.score(inc.sol.objective) <= before + s.tol_obj) break;
      }
    }
    if (inc.converged) ++tr.starts_converged;
    const bool take = !best ||
                      solver.score(inc.sol.objective) > solver.score(best->sol.objective) + s.tol_obj ||
                      (solver.score(inc.sol.objective) >= solver.score(best->sol.objective) - s.tol_obj &&
                       inc.sol.beta_l1() < best->sol.beta_l1() - 1e-12);
    if (take) {
      best = std::move(inc);
      tr.best_start = static_cast<int>(idx);
    }
    if (solver.reached_ideal(best->sol.objective)) break;
  }

  if (!best) {
    AlphaCutSolution out = solver.fixed(zero, true);
    tr.lp_solves = solver.lp_solves();
    return out;
  }

  // Shed device effort that does not contribute to the objective.
  std::vector<double> beta = best->sol.beta;
  if (auto lean = solver.beta_step(best->sol, /*minimize_beta=*/true, best->sol.objective)) {
    AlphaCutSolution check = solver.fixed(*lean);
    if (check.optimal() && solver.score(check.objective) >= solver.score(best->sol.objective) - s.tol_obj)
      beta = *lean;
  }
  AlphaCutSolution out = solver.fixed(beta, /*tie_break=*/true);
  if (!out.optimal()) out = solver.fixed(best->sol.beta, true);
  if (tr.starts_converged == 0) out.status = SolveStatus::IterationLimit;
  tr.lp_solves = solver.lp_solves();
  return out;
}

OracleResult brute_force_oracle(const BilinearProblem& p, int grid_points, long max_solves) {
  const std::vector<Interval> bounds = effective_beta_bounds(p.net, p.strategy);
  std::vector<int> lines;
  for (std::size_t k = 0; k < bounds.size(); ++k)
    if (bounds[k].lower < bounds[k].upper) lines.push_back(static_cast<int>(k));
  const int points = std::max(2, grid_points);

  auto axis = [&](int k) {
    std::vector<double> v;
    for (int i = 0; i < points; ++i)
      v.push_back(bounds[k].lower + (bounds[k].upper - bounds[k].lower) * i / (points - 1));
    v.push_back(0.0);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            v.end());
    return v;
  };

  OracleResult result;
  const std::vector<double> weights = p.weights.empty() ? bus_weights(p.net) : p.weights;
  const double sign = p.direction == Direction::Max ? 1.0 : -1.0;
  bool found = false;

  auto search = [&](const std::vector<std::vector<double>>& axes) {
    long total = 1;
    for (const auto& a : axes) {
      total *= static_cast<long>(a.size());
      if (total > max_solves) throw OracleCapExceeded("oracle grid exceeds LP solve cap");
    }
    if (result.lp_solves + total > max_solves) throw OracleCapExceeded("oracle grid exceeds LP solve cap");
    std::vector<std::size_t> idx(axes.size(), 0);
    std::vector<double> beta(p.net.lines.size(), 0.0);
    LpOptions o;
    o.tie_break = false;
    for (long n = 0; n < total; ++n) {
      for (std::size_t a = 0; a < axes.size(); ++a) beta[lines[a]] = axes[a][idx[a]];
      const bool within_budget = !p.budget || l1(beta) <= *p.budget + 1e-9;
      if (within_budget) {
        ++result.lp_solves;
        const AlphaCutSolution sol = solve_fixed_beta({p.net, p.alpha, p.direction, beta, weights}, o);
        if (sol.optimal() && (!found || sign * sol.objective > sign * result.objective)) {
          found = true;
          result.objective = sol.objective;
          result.beta = beta;
        }
      }
      for (std::size_t a = 0; a < axes.size(); ++a) {
        if (++idx[a] < axes[a].size()) break;
        idx[a] = 0;
      }
    }
  };

  std::vector<std::vector<double>> axes;
  for (int k : lines) axes.push_back(axis(k));
  search(axes);
  if (found && !lines.empty()) {
    // One refinement: same number of points spanning one coarse step on
    // either side of the incumbent.
    std::vector<std::vector<double>> fine;
    for (int k : lines) {
      const double step = (bounds[k].upper - bounds[k].lower) / (points - 1);
      const double center = result.beta[k];
      std::vector<double> v;
      for (int i = 0; i < points; ++i) {
        const double x = center - step + 2.0 * step * i / (points - 1);
        v.push_back(std::clamp(x, bounds[k].lower, bounds[k].upper));
      }
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              v.end());
      fine.push_back(std::move(v));
    }
    search(fine);
  }
  if (lines.empty()) {
    result.beta.assign(p.net.lines.size(), 0.0);
  }
  result.status = found ? SolveStatus::Optimal : SolveStatus::Infeasible;
  return result;
}

}  // namespace gridflex
