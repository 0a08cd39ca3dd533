#include "gridflex/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace gridflex::lp {

int Problem::add_variable(double lower, double upper, double cost) {
  if (lower > upper) throw std::invalid_argument("variable lower bound exceeds upper bound");
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return static_cast<int>(cost_.size()) - 1;
}

int Problem::add_row(Row row) {
  for (const auto& [var, coef] : row.terms) {
    if (var < 0 || var >= num_variables()) throw std::out_of_range("row references unknown variable");
    (void)coef;
  }
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

void Problem::set_bounds(int var, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("variable lower bound exceeds upper bound");
  lower_[var] = lower;
  upper_[var] = upper;
}

namespace {

enum class Where : unsigned char { Basic, AtLower, AtUpper, FreeZero, Retired };

class Tableau {
 public:
  Tableau(const Problem& p, const Options& o) : p_(p), opt_(o) {
    n_ = p.num_variables();
    m_ = p.num_rows();
    build();
  }

  Result run() {
    Result res;
    const int limit = opt_.max_iterations > 0 ? opt_.max_iterations : 50 * (m_ + cols_) + 1000;

    if (num_artificial_ > 0) {
      set_phase_costs(/*phase_one=*/true);
      const Status s = iterate(limit, res.iterations);
      if (s == Status::IterationLimit) return finish(res, s);
      double infeasibility = 0.0;
      for (int r = 0; r < m_; ++r)
        if (is_artificial(basis_[r])) infeasibility += std::abs(xb_[r]);
      if (infeasibility > opt_.primal_tol * std::max(1.0, static_cast<double>(num_artificial_)) * 10.0)
        return finish(res, Status::Infeasible);
      drive_out_artificials();
    }
    set_phase_costs(/*phase_one=*/false);
    const Status s = iterate(limit, res.iterations);
    return finish(res, s);
  }

 private:
  bool is_artificial(int col) const { return col >= n_ + m_; }
  double* row(int r) { return &t_[static_cast<std::size_t>(r) * cols_]; }
  const double* row(int r) const { return &t_[static_cast<std::size_t>(r) * cols_]; }

  void build() {
    const auto& lo = p_.lower();
    const auto& up = p_.upper();

    // Count artificials first so the tableau is allocated once.
    value_.assign(n_ + m_, 0.0);
    where_.assign(n_ + m_, Where::AtLower);
    lb_.assign(n_ + m_, 0.0);
    ub_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lo[j];
      ub_[j] = up[j];
      const bool lf = std::isfinite(lo[j]), uf = std::isfinite(up[j]);
      if (lf && uf) {
        const bool use_lower = std::abs(lo[j]) <= std::abs(up[j]);
        value_[j] = use_lower ? lo[j] : up[j];
        where_[j] = use_lower ? Where::AtLower : Where::AtUpper;
      } else if (lf) {
        value_[j] = lo[j];
        where_[j] = Where::AtLower;
      } else if (uf) {
        value_[j] = up[j];
        where_[j] = Where::AtUpper;
      } else {
        value_[j] = 0.0;
        where_[j] = Where::FreeZero;
      }
    }

    std::vector<double> activity(m_, 0.0);
    std::vector<int> art_sign(m_, 0);
    for (int r = 0; r < m_; ++r) {
      const Row& row = p_.rows()[r];
      double v = 0.0;
      for (const auto& [var, coef] : row.terms) v += coef * value_[var];
      activity[r] = v;
      lb_[n_ + r] = row.lower;
      ub_[n_ + r] = row.upper;
      if (v < row.lower - opt_.primal_tol) {
        art_sign[r] = 1;
      } else if (v > row.upper + opt_.primal_tol) {
        art_sign[r] = -1;
      }
      if (art_sign[r] != 0) ++num_artificial_;
    }

    cols_ = n_ + m_ + num_artificial_;
    lb_.resize(cols_, 0.0);
    ub_.resize(cols_, 0.0);
    value_.resize(cols_, 0.0);
    where_.resize(cols_, Where::Retired);
    t_.assign(static_cast<std::size_t>(m_) * cols_, 0.0);
    basis_.assign(m_, -1);
    xb_.assign(m_, 0.0);

    int next_art = n_ + m_;
    for (int r = 0; r < m_; ++r) {
      const Row& prow = p_.rows()[r];
      double* tr = row(r);
      const int slack = n_ + r;
      if (art_sign[r] == 0) {
        // -a x + s = 0 with s basic at the row activity.
        for (const auto& [var, coef] : prow.terms) tr[var] -= coef;
        tr[slack] = 1.0;
        basis_[r] = slack;
        where_[slack] = Where::Basic;
        xb_[r] = activity[r];
      } else {
        // a x - s + sigma t = 0, slack parked at the violated bound, t >= 0 basic.
        const double bound = art_sign[r] > 0 ? prow.lower : prow.upper;
        value_[slack] = bound;
        where_[slack] = art_sign[r] > 0 ? Where::AtLower : Where::AtUpper;
        const double residual = activity[r] - bound;
        const double sigma = residual > 0.0 ? -1.0 : 1.0;
        const int art = next_art++;
        for (const auto& [var, coef] : prow.terms) tr[var] += coef / sigma;
        tr[slack] = -1.0 / sigma;
        tr[art] = 1.0;
        lb_[art] = 0.0;
        ub_[art] = kInf;
        basis_[r] = art;
        where_[art] = Where::Basic;
        xb_[r] = std::abs(residual);
      }
    }
  }

  void set_phase_costs(bool phase_one) {
    cost_.assign(cols_, 0.0);
    if (phase_one) {
      for (int j = n_ + m_; j < cols_; ++j) cost_[j] = 1.0;
    } else {
      for (int j = 0; j < n_; ++j) cost_[j] = p_.cost()[j];
    }
    d_ = cost_;
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_[basis_[r]];
      if (cb == 0.0) continue;
      const double* tr = row(r);
      for (int j = 0; j < cols_; ++j) d_[j] -= cb * tr[j];
    }
  }

  // Returns the entering column and its direction, or -1.
  int price(bool bland, int& dir) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < cols_; ++j) {
      const Where w = where_[j];
      if (w == Where::Basic || w == Where::Retired) continue;
      if (lb_[j] == ub_[j]) continue;
      const double dj = d_[j];
      int candidate_dir = 0;
      if (w == Where::AtLower && dj < -opt_.dual_tol) candidate_dir = 1;
      else if (w == Where::AtUpper && dj > opt_.dual_tol) candidate_dir = -1;
      else if (w == Where::FreeZero && std::abs(dj) > opt_.dual_tol) candidate_dir = dj < 0.0 ? 1 : -1;
      if (candidate_dir == 0) continue;
      if (bland) {
        dir = candidate_dir;
        return j;
      }
      if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        best = j;
        dir = candidate_dir;
      }
    }
    return best;
  }

  Status iterate(int limit, int& iterations) {
    int degenerate_run = 0;
    while (true) {
      if (iterations >= limit) return Status::IterationLimit;
      const bool bland = degenerate_run >= opt_.degenerate_switch;
      int dir = 0;
      const int enter = price(bland, dir);
      if (enter < 0) return Status::Optimal;
      ++iterations;

      // Harris two-pass ratio test.
      const double tol = opt_.primal_tol;
      double relaxed = kInf;
      for (int r = 0; r < m_; ++r) {
        const double alpha = row(r)[enter];
        if (std::abs(alpha) <= opt_.pivot_tol) continue;
        const double rate = -dir * alpha;
        const int b = basis_[r];
        double step = kInf;
        if (rate < 0.0 && std::isfinite(lb_[b])) step = (xb_[r] - lb_[b] + tol) / (-rate);
        else if (rate > 0.0 && std::isfinite(ub_[b])) step = (ub_[b] - xb_[r] + tol) / rate;
        relaxed = std::min(relaxed, step);
      }
      const double flip = ub_[enter] - lb_[enter];
      int leave_row = -1;
      double theta = kInf;
      if (std::isfinite(relaxed)) {
        double best_alpha = 0.0;
        for (int r = 0; r < m_; ++r) {
          const double alpha = row(r)[enter];
          if (std::abs(alpha) <= opt_.pivot_tol) continue;
          const double rate = -dir * alpha;
          const int b = basis_[r];
          double step = kInf;
          if (rate < 0.0 && std::isfinite(lb_[b])) step = (xb_[r] - lb_[b]) / (-rate);
          else if (rate > 0.0 && std::isfinite(ub_[b])) step = (ub_[b] - xb_[r]) / rate;
          if (step > relaxed) continue;
          const bool better = bland ? (leave_row < 0 || step < theta ||
                                       (step == theta && basis_[r] < basis_[leave_row]))
                                    : std::abs(alpha) > best_alpha;
          if (better) {
            best_alpha = std::abs(alpha);
            leave_row = r;
            theta = std::max(step, 0.0);
          }
        }
      }
      if (std::isfinite(flip) && flip <= theta) {
        // Entering variable moves to its opposite bound; basis unchanged.
        move_basics(enter, dir * flip);
        if (where_[enter] == Where::AtLower) {
          where_[enter] = Where::AtUpper;
          value_[enter] = ub_[enter];
        } else {
          where_[enter] = Where::AtLower;
          value_[enter] = lb_[enter];
        }
        degenerate_run = 0;
        continue;
      }
      if (leave_row < 0) return Status::Unbounded;

      degenerate_run = theta <= tol ? degenerate_run + 1 : 0;
      move_basics(enter, dir * theta);
      const double entering_value = value_[enter] + dir * theta;
      const int leaving = basis_[leave_row];
      const double rate = -dir * row(leave_row)[enter];
      if (is_artificial(leaving)) {
        where_[leaving] = Where::Retired;
        value_[leaving] = 0.0;
        ub_[leaving] = 0.0;
      } else if (rate < 0.0) {
        where_[leaving] = Where::AtLower;
        value_[leaving] = lb_[leaving];
      } else {
        where_[leaving] = Where::AtUpper;
        value_[leaving] = ub_[leaving];
      }
      pivot(leave_row, enter);
      xb_[leave_row] = entering_value;
      where_[enter] = Where::Basic;
    }
  }

  void move_basics(int col, double delta) {
    if (delta == 0.0) return;
    for (int r = 0; r < m_; ++r) {
      const double a = row(r)[col];
      if (a != 0.0) xb_[r] -= delta * a;
    }
  }

  void pivot(int r, int col) {
    double* pr = row(r);
    const double inv = 1.0 / pr[col];
    nz_.clear();
    for (int j = 0; j < cols_; ++j) {
      if (pr[j] == 0.0) continue;
      pr[j] *= inv;
      nz_.push_back(j);
    }
    pr[col] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* ti = row(i);
      const double f = ti[col];
      if (f == 0.0) continue;
      for (int j : nz_) ti[j] -= f * pr[j];
      ti[col] = 0.0;
    }
    const double f = d_[col];
    if (f != 0.0) {
      for (int j : nz_) d_[j] -= f * pr[j];
      d_[col] = 0.0;
    }
    basis_[r] = col;
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      const int art = basis_[r];
      if (!is_artificial(art)) continue;
      const double* tr = row(r);
      int best = -1;
      double best_abs = 1e-7;
      for (int j = 0; j < n_ + m_; ++j) {
        if (where_[j] == Where::Basic) continue;
        if (std::abs(tr[j]) > best_abs) {
          best_abs = std::abs(tr[j]);
          best = j;
        }
      }
      if (best < 0) {
        // Redundant row: keep the artificial basic but pinned at zero.
        ub_[art] = 0.0;
        continue;
      }
      const double delta = xb_[r] / tr[best];
      move_basics(best, delta);
      const double entering_value = value_[best] + delta;
      where_[art] = Where::Retired;
      value_[art] = 0.0;
      ub_[art] = 0.0;
      pivot(r, best);
      xb_[r] = entering_value;
      where_[best] = Where::Basic;
    }
    for (int j = n_ + m_; j < cols_; ++j) ub_[j] = 0.0;
  }

  std::vector<double> primal() const {
    std::vector<double> x(value_.begin(), value_.begin() + n_ + m_);
    for (int r = 0; r < m_; ++r)
      if (basis_[r] < n_ + m_) x[basis_[r]] = xb_[r];
    return x;
  }

  double violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < n_; ++j)
      worst = std::max({worst, p_.lower()[j] - x[j], x[j] - p_.upper()[j]});
    for (int r = 0; r < m_; ++r) {
      const Row& row = p_.rows()[r];
      double v = 0.0;
      for (const auto& [var, coef] : row.terms) v += coef * x[var];
      worst = std::max({worst, row.lower - v, v - row.upper});
    }
    return worst;
  }

  // Recomputes basic values from the original matrix to shed drift
  // accumulated over many tableau updates.
  void refine(std::vector<double>& x) const {
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    std::vector<int> column_of(cols_, -1);
    for (int r = 0; r < m_; ++r) column_of[basis_[r]] = r;
    for (int r = 0; r < m_; ++r) {
      const Row& prow = p_.rows()[r];
      for (const auto& [var, coef] : prow.terms) {
        if (column_of[var] >= 0) basis_matrix(r, column_of[var]) += coef;
        else rhs(r) -= coef * x[var];
      }
      const int slack = n_ + r;
      if (column_of[slack] >= 0) basis_matrix(r, column_of[slack]) -= 1.0;
      else rhs(r) += x[slack];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd xb = lu.solve(rhs);
    if (!xb.allFinite()) return;
    std::vector<double> candidate = x;
    for (int r = 0; r < m_; ++r)
      if (basis_[r] < n_ + m_) candidate[basis_[r]] = xb(r);
    if (violation(candidate) < violation(x)) x = std::move(candidate);
  }

  Result& finish(Result& res, Status s) {
    res.status = s;
    std::vector<double> x = primal();
    if (s == Status::Optimal) {
      double worst = violation(x);
      bool has_basic_artificial = false;
      for (int r = 0; r < m_; ++r) has_basic_artificial |= is_artificial(basis_[r]);
      if (worst > opt_.primal_tol && !has_basic_artificial) refine(x);
      res.max_violation = violation(x);
    }
    x.resize(n_);
    res.objective = 0.0;
    for (int j = 0; j < n_; ++j) res.objective += p_.cost()[j] * x[j];
    res.x = std::move(x);
    return res;
  }

  const Problem& p_;
  Options opt_;
  int n_ = 0, m_ = 0, cols_ = 0, num_artificial_ = 0;
  std::vector<double> t_;
  std::vector<int> nz_;  // nonzero columns of the pivot row
  std::vector<double> lb_, ub_, value_, cost_, d_, xb_;
  std::vector<Where> where_;
  std::vector<int> basis_;
};

}  // namespace

Result solve(const Problem& problem, const Options& options) {
  Tableau tableau(problem, options);
  return tableau.run();
}

}  // namespace gridflex::lp
