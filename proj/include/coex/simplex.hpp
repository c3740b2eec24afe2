#pragma once

// Bounded-variable two-phase revised primal simplex over an explicit
// dense basis inverse with rank-1 (product-form) updates and periodic
// refactorization. Pricing is Dantzig with a Bland fallback once pivots
// stall, so termination is guaranteed. Geared to desk-scale models
// (thousands of rows); the MPS exporter is the escape hatch beyond that.
//
// A solver instance can be reused across solves of the same model with
// different variable bounds. Passing an LpBasis warm-starts from a prior
// optimal basis: primal feasibility is restored by a piecewise-linear
// repair phase (minimizing total bound violation) instead of the
// artificial-variable phase 1, which usually takes a handful of pivots
// when only one bound moved. Any snapshot the loader cannot validate
// falls back to the cold two-phase path, and a repair verdict of
// "infeasible" is always re-proven cold before being reported.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "coex/linear_model.hpp"

namespace coex {

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> values;  // per catalog variable
  // Per original row, in the convention objective = sum_i duals[i]*rhs[i]
  // + sum_j (reduced cost at active bound): <= rows carry duals <= 0,
  // >= rows duals >= 0, = rows unrestricted.
  std::vector<double> duals;
};

struct SimplexOptions {
  double tol = 1e-7;            // primal feasibility
  double dual_tol = 1e-9;       // reduced-cost optimality
  long max_iterations = 2'000'000;
  int refactor_every = 2000;
  int bland_after_stalls = 40;  // consecutive degenerate pivots
};

// Optimal-basis snapshot for warm starts. `stamp` lets a solver recognize
// its own most recent basis and skip refactorization entirely.
struct LpBasis {
  long stamp = -1;
  int staleness = 0;           // product-form updates since a fresh inverse
  std::vector<int> basis;      // row -> column (structural or slack)
  std::vector<int8_t> state;   // per structural+slack column
  bool empty() const { return basis.empty(); }
};

namespace detail {

template <typename Scalar>
class BoundedSimplex {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BoundedSimplex(const LinearModel& model, const SimplexOptions& opts)
      : model_(model), opts_(opts) {
    m_ = model.n_rows();
    n_struct_ = model.n_vars();

    // Canonical form: every row becomes <= via sign flip, then gains a
    // slack; equality rows get a slack fixed at zero.
    cols_.resize(n_struct_ + m_);
    b_.resize(m_);
    row_sign_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const Row& row = model.rows[i];
      const Scalar sign = row.sense == Sense::ge ? -1 : 1;
      row_sign_[i] = sign;
      b_[i] = sign * row.rhs;
      for (const auto& t : row.terms) {
        if (!std::isfinite(t.coef)) throw std::invalid_argument("simplex: non-finite coefficient");
        if (t.coef == 0.0) continue;
        cols_[t.var].rows.push_back(i);
        cols_[t.var].vals.push_back(sign * t.coef);
      }
      const int sj = n_struct_ + i;
      cols_[sj].rows.push_back(i);
      cols_[sj].vals.push_back(1);
    }
  }

  LpSolution solve(const std::vector<double>* lb_override,
                   const std::vector<double>* ub_override, LpBasis* warm) {
    ++stamp_counter_;
    set_bounds(lb_override, ub_override);

    LpSolution out;
    if (infeasible_bounds_) {
      good_stamp_ = -1;
      out.status = LpStatus::infeasible;
      return out;
    }

    LpStatus st;
    bool decided = false;
    const bool warm_loaded = warm && !warm->empty() && try_load(*warm);
    good_stamp_ = -1;  // internal state diverges from any snapshot below
    if (warm_loaded) {
      phase1_ = false;
      const RepairOutcome ro = repair();
      if (ro == RepairOutcome::feasible) {
        st = run_phase2();
        decided = true;
      } else if (ro == RepairOutcome::infeasible) {
        ++stats.repair_infeasible;
      } else {
        ++stats.repair_bails;
      }
      // Repair verdicts of infeasible (or a bailed-out repair) fall back
      // to the cold path so infeasibility is only ever proven one way.
    }
    if (!decided) {
      ++stats.cold_starts;
      initialize_basis();
      if (n_artificial_ > 0) {
        phase1_ = true;
        const LpStatus p1 = iterate();
        if (p1 != LpStatus::optimal) throw std::logic_error("simplex: phase 1 cannot be unbounded");
        const Scalar feas_tol = opts_.tol * (1 + b_.template lpNorm<Eigen::Infinity>());
        if (phase_objective() > feas_tol) {
          good_stamp_ = -1;
          out.status = LpStatus::infeasible;
          return out;
        }
        // Artificials are pinned to zero for phase 2 and never re-enter.
        for (int j = n_total_ - n_artificial_; j < n_total_; ++j) ub_[j] = 0;
        phase1_ = false;
      }
      st = run_phase2();
    }

    out.status = st;
    out.values.assign(n_struct_, 0.0);
    for (int j = 0; j < n_struct_; ++j) out.values[j] = static_cast<double>(x_[j]);
    if (st == LpStatus::optimal) {
      out.objective = model_.objective_constant;
      for (int j = 0; j < n_struct_; ++j) out.objective += model_.objective[j] * out.values[j];
      const Vec y = dual_vector();
      out.duals.assign(m_, 0.0);
      for (int i = 0; i < m_; ++i) out.duals[i] = static_cast<double>(row_sign_[i] * y[i]);
      good_stamp_ = stamp_counter_;
      if (warm) save_basis(*warm);
    } else if (st == LpStatus::unbounded) {
      good_stamp_ = -1;
      out.objective = -std::numeric_limits<double>::infinity();
    } else {
      good_stamp_ = -1;
    }
    return out;
  }

  // Cumulative instrumentation; costs nothing when ignored.
  struct SolveStats {
    long cold_starts = 0, fast_loads = 0, cache_loads = 0, lu_loads = 0;
    long load_rejects = 0, repair_bails = 0, repair_infeasible = 0;
    long repair_pivots = 0, phase_pivots = 0;
  };
  SolveStats stats;

 private:
  struct Col {
    std::vector<int> rows;
    std::vector<Scalar> vals;
  };
  struct CachedBasis {
    long stamp;
    Mat binv;
    std::vector<int> basis;
  };
  enum : int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2 };
  enum class RepairOutcome { feasible, infeasible, bailed };

  const LinearModel& model_;
  SimplexOptions opts_;
  int m_ = 0, n_struct_ = 0, n_total_ = 0, n_artificial_ = 0;
  bool infeasible_bounds_ = false;
  bool phase1_ = false;
  long stamp_counter_ = 0;
  long good_stamp_ = -1;  // stamp whose optimal basis still backs binv_
  std::vector<Col> cols_;
  Vec b_;
  std::vector<Scalar> row_sign_;
  std::vector<Scalar> lb_, ub_, x_;
  std::vector<int8_t> state_;
  std::vector<int> basis_;  // row -> column
  Mat binv_;
  std::deque<CachedBasis> cache_;  // recent optimal inverses by stamp
  long pivots_since_refactor_ = 0;
  long total_iterations_ = 0;

  Scalar cost_of(int j) const {
    if (phase1_) return j >= n_total_ - n_artificial_ ? Scalar(1) : Scalar(0);
    return j < n_struct_ ? Scalar(model_.objective[j]) : Scalar(0);
  }

  Scalar phase_objective() const {
    Scalar v = 0;
    for (int j = n_total_ - n_artificial_; j < n_total_; ++j) v += x_[j];
    return v;
  }

  void set_bounds(const std::vector<double>* lb_override,
                  const std::vector<double>* ub_override) {
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    infeasible_bounds_ = false;
    n_artificial_ = 0;
    n_total_ = n_struct_ + m_;
    cols_.resize(n_total_);  // drop artificial columns from a prior solve
    lb_.assign(n_total_, 0);
    ub_.assign(n_total_, 0);
    for (int j = 0; j < n_struct_; ++j) {
      lb_[j] = lb_override ? (*lb_override)[j] : model_.vars[j].lb;
      ub_[j] = ub_override ? (*ub_override)[j] : model_.vars[j].ub;
      if (!(lb_[j] > -inf))
        throw std::invalid_argument("simplex: variable without finite lower bound: " +
                                    model_.vars[j].name);
      if (ub_[j] < lb_[j]) infeasible_bounds_ = true;
    }
    for (int i = 0; i < m_; ++i) {
      const int sj = n_struct_ + i;
      lb_[sj] = 0;
      ub_[sj] = model_.rows[i].sense == Sense::eq ? 0 : inf;
    }
  }

  void initialize_basis() {
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    state_.assign(n_struct_ + m_, kAtLower);
    x_.assign(n_struct_ + m_, 0);
    for (int j = 0; j < n_struct_; ++j) x_[j] = lb_[j];

    // Residual load each slack would have to carry.
    Vec r = b_;
    for (int j = 0; j < n_struct_; ++j) {
      if (x_[j] == 0) continue;
      const Col& c = cols_[j];
      for (size_t k = 0; k < c.rows.size(); ++k) r[c.rows[k]] -= c.vals[k] * x_[j];
    }

    basis_.resize(m_);
    std::vector<int> needs_artificial;
    for (int i = 0; i < m_; ++i) {
      const int sj = n_struct_ + i;
      if (r[i] >= lb_[sj] && r[i] <= ub_[sj]) {
        basis_[i] = sj;
        state_[sj] = kBasic;
        x_[sj] = r[i];
      } else {
        // Slack parks at its nearest bound; an artificial absorbs the rest.
        const Scalar v = r[i] < lb_[sj] ? lb_[sj] : ub_[sj];
        x_[sj] = v;
        state_[sj] = r[i] < lb_[sj] ? kAtLower : kAtUpper;
        needs_artificial.push_back(i);
      }
    }

    n_artificial_ = static_cast<int>(needs_artificial.size());
    n_total_ = n_struct_ + m_ + n_artificial_;
    cols_.resize(n_total_);
    lb_.resize(n_total_, 0);
    ub_.resize(n_total_, inf);
    x_.resize(n_total_, 0);
    state_.resize(n_total_, kAtLower);
    int aj = n_struct_ + m_;
    for (int i : needs_artificial) {
      const Scalar resid = r[i] - x_[n_struct_ + i];
      cols_[aj].rows.push_back(i);
      cols_[aj].vals.push_back(resid >= 0 ? Scalar(1) : Scalar(-1));
      lb_[aj] = 0;
      ub_[aj] = inf;
      x_[aj] = std::abs(resid);
      state_[aj] = kBasic;
      basis_[i] = aj;
      ++aj;
    }

    binv_ = Mat::Identity(m_, m_);
    // Artificial columns are +-1, so the initial basis inverse is diagonal.
    for (int i : needs_artificial)
      if (cols_[basis_[i]].vals[0] < 0) binv_(i, i) = -1;
  }

  // Adopt a snapshot basis: rebuild states, values, and the inverse.
  // Returns false (leaving a cold start to the caller) on any mismatch
  // or a numerically singular basis matrix.
  bool try_load(const LpBasis& wb) {
    const int n = n_struct_ + m_;
    if (static_cast<int>(wb.basis.size()) != m_ ||
        static_cast<int>(wb.state.size()) != n)
      return false;
    for (int i = 0; i < m_; ++i)
      if (wb.basis[i] < 0 || wb.basis[i] >= n) return false;

    basis_ = wb.basis;
    state_.assign(wb.state.begin(), wb.state.end());
    for (int j = 0; j < n; ++j)
      if (state_[j] == kBasic) state_[j] = kAtLower;  // re-marked from basis_
    for (int i = 0; i < m_; ++i) state_[basis_[i]] = kBasic;

    x_.assign(n, 0);
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    for (int j = 0; j < n; ++j) {
      if (state_[j] == kBasic) continue;
      if (state_[j] == kAtUpper && ub_[j] >= inf) state_[j] = kAtLower;
      x_[j] = state_[j] == kAtUpper ? ub_[j] : lb_[j];
    }

    if (wb.stamp >= 0 && wb.stamp == good_stamp_) {
      // Snapshot of this solver's own last optimum: binv_ still matches.
      pivots_since_refactor_ = wb.staleness;
      ++stats.fast_loads;
      recompute_basic_values();
      return true;
    }
    if (wb.stamp >= 0) {
      for (const CachedBasis& c : cache_) {
        if (c.stamp != wb.stamp || c.basis != wb.basis) continue;
        binv_ = c.binv;  // copying beats refactorizing by ~two orders
        pivots_since_refactor_ = wb.staleness;
        ++stats.cache_loads;
        recompute_basic_values();
        return true;
      }
    }

    Mat basis_matrix = Mat::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      const Col& c = cols_[basis_[i]];
      for (size_t k = 0; k < c.rows.size(); ++k) basis_matrix(c.rows[k], i) = c.vals[k];
    }
    const Eigen::PartialPivLU<Mat> lu(basis_matrix);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    const Scalar dmax = diag.maxCoeff();
    if (!(dmax > 0) || diag.minCoeff() < Scalar(1e-11) * dmax) {
      ++stats.load_rejects;
      return false;
    }
    binv_ = lu.inverse();
    pivots_since_refactor_ = 0;
    ++stats.lu_loads;
    recompute_basic_values();
    return true;
  }

  void save_basis(LpBasis& wb) {
    wb.stamp = stamp_counter_;
    wb.staleness = static_cast<int>(pivots_since_refactor_);
    wb.basis = basis_;
    wb.state.assign(state_.begin(), state_.begin() + n_struct_ + m_);
    for (int i = 0; i < m_; ++i) {
      if (wb.basis[i] < n_struct_ + m_) continue;
      // A degenerate-at-zero artificial stayed basic: hand its slot to the
      // row's own slack. If that makes the basis singular, the load-time
      // check rejects the snapshot and the next solve starts cold.
      wb.basis[i] = n_struct_ + i;
      wb.state[n_struct_ + i] = kBasic;
      wb.stamp = -1;  // no longer this solver's literal internal state
    }
    if (wb.stamp < 0) return;
    // Remember recent inverses so reloading a recent snapshot is a copy,
    // not a refactorization. Bounded by memory, not entry count.
    const size_t entry_bytes = sizeof(Scalar) * size_t(m_) * size_t(m_);
    const size_t max_entries =
        std::max<size_t>(2, size_t(768) * 1024 * 1024 / std::max<size_t>(1, entry_bytes));
    cache_.push_back(CachedBasis{wb.stamp, binv_, wb.basis});
    while (cache_.size() > max_entries) cache_.pop_front();
  }

  Vec dual_vector() const {
    Vec cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost_of(basis_[i]);
    return binv_.transpose() * cb;
  }

  Scalar reduced_cost(int j, const Vec& y) const {
    Scalar d = cost_of(j);
    const Col& c = cols_[j];
    for (size_t k = 0; k < c.rows.size(); ++k) d -= y[c.rows[k]] * c.vals[k];
    return d;
  }

  bool has_entering_candidate() {
    const Vec y = dual_vector();
    for (int j = 0; j < n_total_; ++j) {
      if (state_[j] == kBasic || lb_[j] == ub_[j]) continue;
      const Scalar d = reduced_cost(j, y);
      if (state_[j] == kAtLower ? d < -opts_.dual_tol : d > opts_.dual_tol) return true;
    }
    return false;
  }

  void refactor_binv() {
    Mat basis_matrix = Mat::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      const Col& c = cols_[basis_[i]];
      for (size_t k = 0; k < c.rows.size(); ++k) basis_matrix(c.rows[k], i) = c.vals[k];
    }
    binv_ = Eigen::PartialPivLU<Mat>(basis_matrix).inverse();
    pivots_since_refactor_ = 0;
  }

  void recompute_basic_values() {
    Vec r = b_;
    for (int j = 0; j < n_total_; ++j) {
      if (state_[j] == kBasic || x_[j] == 0) continue;
      const Col& c = cols_[j];
      for (size_t k = 0; k < c.rows.size(); ++k) r[c.rows[k]] -= c.vals[k] * x_[j];
    }
    const Vec xb = binv_ * r;
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
  }

  void refactorize() {
    refactor_binv();
    recompute_basic_values();
  }

  Scalar primal_infeasibility() const {
    Scalar worst = 0;
    for (int j = 0; j < n_total_; ++j) {
      worst = std::max(worst, lb_[j] - x_[j]);
      if (ub_[j] < std::numeric_limits<Scalar>::infinity())
        worst = std::max(worst, x_[j] - ub_[j]);
    }
    return worst;
  }

  LpStatus run_phase2() {
    LpStatus st = iterate();
    // Optimality was proven on an updated inverse; confirm and keep
    // iterating if drift broke it. The fresh factorization is skipped
    // while the inverse carries only a handful of rank-1 updates —
    // snapshots track that count across warm starts, so a long dive of
    // short solves still refactorizes before drift can accumulate.
    for (int round = 0; round < 3 && st == LpStatus::optimal; ++round) {
      if (round > 0 || pivots_since_refactor_ >= 64) refactorize();
      if (primal_infeasibility() <= opts_.tol && !has_entering_candidate()) break;
      st = iterate();
    }
    return st;
  }

  // Restores primal feasibility from a warm basis by minimizing total
  // bound violation of the basic variables (piecewise-linear costs -1/0/+1
  // by violation side). Violated variables stop at the violated bound —
  // the cost kink — and leave the basis there, so each step's gradient is
  // exact. No artificials are involved, so the basis stays reusable.
  RepairOutcome repair() {
    const Scalar eps = opts_.tol;
    const Scalar pivot_tol = 1e-9;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    const long cap = 4000 + 4L * m_;
    bool bland = false;
    int stalled = 0;

    for (long iters = 0;; ++iters) {
      Scalar total = 0;
      Vec cb = Vec::Zero(m_);
      for (int i = 0; i < m_; ++i) {
        const int bj = basis_[i];
        if (x_[bj] < lb_[bj] - eps) {
          cb[i] = -1;
          total += lb_[bj] - x_[bj];
        } else if (x_[bj] > ub_[bj] + eps) {
          cb[i] = 1;
          total += x_[bj] - ub_[bj];
        }
      }
      if (total <= eps * (1 + b_.template lpNorm<Eigen::Infinity>()))
        return RepairOutcome::feasible;
      if (iters > cap) return RepairOutcome::bailed;

      const Vec y = binv_.transpose() * cb;
      int enter = -1;
      Scalar best = 0;
      for (int j = 0; j < n_total_; ++j) {
        if (state_[j] == kBasic || lb_[j] == ub_[j]) continue;
        Scalar d = 0;  // nonbasic repair cost is zero
        const Col& c = cols_[j];
        for (size_t k = 0; k < c.rows.size(); ++k) d -= y[c.rows[k]] * c.vals[k];
        const Scalar viol = state_[j] == kAtLower ? -d : d;
        if (viol <= opts_.dual_tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (viol > best) {
          best = viol;
          enter = j;
        }
      }
      if (enter < 0) return RepairOutcome::infeasible;  // violation minimized
      ++stats.repair_pivots;

      Vec w = Vec::Zero(m_);
      {
        const Col& c = cols_[enter];
        for (size_t k = 0; k < c.rows.size(); ++k) w += c.vals[k] * binv_.col(c.rows[k]);
      }
      const Scalar sigma = state_[enter] == kAtLower ? 1 : -1;

      Scalar t = ub_[enter] - lb_[enter];
      int leave_row = -1;
      bool leave_to_lower = false;
      for (int i = 0; i < m_; ++i) {
        const Scalar dir = sigma * w[i];  // x_basic moves at rate -dir
        const int bj = basis_[i];
        Scalar ti;
        bool to_lower;
        if (x_[bj] < lb_[bj] - eps) {
          if (dir >= -pivot_tol) continue;  // moving further below: no kink
          ti = (lb_[bj] - x_[bj]) / (-dir);
          to_lower = true;
        } else if (x_[bj] > ub_[bj] + eps) {
          if (dir <= pivot_tol) continue;
          ti = (x_[bj] - ub_[bj]) / dir;
          to_lower = false;
        } else if (dir > pivot_tol) {
          ti = (x_[bj] - lb_[bj]) / dir;
          to_lower = true;
        } else if (dir < -pivot_tol) {
          if (ub_[bj] >= inf) continue;
          ti = (ub_[bj] - x_[bj]) / (-dir);
          to_lower = false;
        } else {
          continue;
        }
        if (ti < -1e-12) ti = 0;
        const bool strictly_better = ti < t - Scalar(1e-12);
        const bool tie = !strictly_better && ti <= t + Scalar(1e-12) && leave_row >= 0;
        if (strictly_better ||
            (tie && (bland ? basis_[i] < basis_[leave_row]
                           : std::abs(w[i]) > std::abs(w[leave_row])))) {
          t = std::max<Scalar>(ti, 0);
          leave_row = i;
          leave_to_lower = to_lower;
        }
      }

      if (leave_row < 0 && !(t < inf)) return RepairOutcome::bailed;

      stalled = t <= Scalar(1e-10) ? stalled + 1 : 0;
      if (!bland && stalled > opts_.bland_after_stalls) bland = true;

      x_[enter] += sigma * t;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= sigma * t * w[i];

      if (leave_row < 0) {
        state_[enter] = state_[enter] == kAtLower ? kAtUpper : kAtLower;
        x_[enter] = state_[enter] == kAtLower ? lb_[enter] : ub_[enter];
        continue;
      }

      const int leave = basis_[leave_row];
      x_[leave] = leave_to_lower ? lb_[leave] : ub_[leave];  // pin exactly
      state_[leave] = leave_to_lower ? kAtLower : kAtUpper;
      state_[enter] = kBasic;
      basis_[leave_row] = enter;

      const Scalar pivot = w[leave_row];
      Vec u = w / pivot;
      u[leave_row] = (pivot - 1) / pivot;
      const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> pivot_row = binv_.row(leave_row);
      binv_.noalias() -= u * pivot_row;

      if (++pivots_since_refactor_ >= opts_.refactor_every) refactorize();
    }
  }

  // Runs the current phase's pricing loop to optimality/unboundedness.
  LpStatus iterate() {
    bool bland = false;
    int stalled = 0;
    const Scalar pivot_tol = 1e-9;

    while (true) {
      if (++total_iterations_ > opts_.max_iterations) {
        if (!bland) {
          bland = true;  // guaranteed-finite mode; budget restarts
          total_iterations_ = 0;
          continue;
        }
        throw std::runtime_error("simplex: iteration limit exceeded in Bland mode");
      }

      const Vec y = dual_vector();
      int enter = -1;
      Scalar best = 0;
      for (int j = 0; j < n_total_; ++j) {
        if (state_[j] == kBasic || lb_[j] == ub_[j]) continue;
        const Scalar d = reduced_cost(j, y);
        const Scalar viol = state_[j] == kAtLower ? -d : d;
        if (viol <= opts_.dual_tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (viol > best) {
          best = viol;
          enter = j;
        }
      }
      if (enter < 0) return LpStatus::optimal;
      ++stats.phase_pivots;

      // Direction of basic values as the entering variable advances.
      Vec w = Vec::Zero(m_);
      {
        const Col& c = cols_[enter];
        for (size_t k = 0; k < c.rows.size(); ++k) w += c.vals[k] * binv_.col(c.rows[k]);
      }
      const Scalar sigma = state_[enter] == kAtLower ? 1 : -1;

      Scalar t = ub_[enter] - lb_[enter];  // bound-to-bound flip distance
      int leave_row = -1;
      for (int i = 0; i < m_; ++i) {
        const Scalar dir = sigma * w[i];
        const int bj = basis_[i];
        Scalar ti;
        if (dir > pivot_tol) {
          ti = (x_[bj] - lb_[bj]) / dir;
        } else if (dir < -pivot_tol) {
          if (ub_[bj] == std::numeric_limits<Scalar>::infinity()) continue;
          ti = (ub_[bj] - x_[bj]) / (-dir);
        } else {
          continue;
        }
        if (ti < -1e-12) ti = 0;
        const bool strictly_better = ti < t - Scalar(1e-12);
        const bool tie = !strictly_better && ti <= t + Scalar(1e-12) && leave_row >= 0;
        if (strictly_better ||
            (tie && (bland ? basis_[i] < basis_[leave_row]
                           : std::abs(w[i]) > std::abs(w[leave_row])))) {
          t = std::max<Scalar>(ti, 0);
          leave_row = i;
        }
      }

      if (leave_row < 0 && !(t < std::numeric_limits<Scalar>::infinity()))
        return LpStatus::unbounded;

      stalled = t <= Scalar(1e-10) ? stalled + 1 : 0;
      if (!bland && stalled > opts_.bland_after_stalls) bland = true;

      // Move the entering variable and every basic variable.
      x_[enter] += sigma * t;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= sigma * t * w[i];

      if (leave_row < 0) {
        // Bound flip: no basis change.
        state_[enter] = state_[enter] == kAtLower ? kAtUpper : kAtLower;
        x_[enter] = state_[enter] == kAtLower ? lb_[enter] : ub_[enter];
        continue;
      }

      const int leave = basis_[leave_row];
      const bool leave_at_lower = sigma * w[leave_row] > 0;
      x_[leave] = leave_at_lower ? lb_[leave] : ub_[leave];  // pin exactly
      state_[leave] = leave_at_lower ? kAtLower : kAtUpper;
      state_[enter] = kBasic;
      basis_[leave_row] = enter;

      // Product-form update: Binv <- (I - (w - e_r) e_r^T / w_r) Binv.
      const Scalar pivot = w[leave_row];
      Vec u = w / pivot;
      u[leave_row] = (pivot - 1) / pivot;
      const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> pivot_row = binv_.row(leave_row);
      binv_.noalias() -= u * pivot_row;

      if (++pivots_since_refactor_ >= opts_.refactor_every) refactorize();
    }
  }
};

}  // namespace detail

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

inline LpSolution solve_lp(const LinearModel& m, const SimplexOptions& opts = {},
                           const std::vector<double>* lb_override = nullptr,
                           const std::vector<double>* ub_override = nullptr,
                           LpBasis* warm = nullptr) {
  return detail::BoundedSimplex<double>(m, opts).solve(lb_override, ub_override, warm);
}

}  // namespace coex
