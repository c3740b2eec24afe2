#include "coex/branch_and_bound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <queue>
#include <stdexcept>

namespace coex {

const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::optimal: return "optimal";
    case MipStatus::infeasible: return "infeasible";
    case MipStatus::gap_limit: return "gap_limit";
    case MipStatus::node_limit: return "node_limit";
  }
  return "?";
}

double MipSolution::gap() const {
  if (status == MipStatus::infeasible) return std::numeric_limits<double>::infinity();
  const double denom = std::max(1e-12, std::abs(objective));
  return std::max(0.0, objective - best_bound) / denom;
}

namespace {

struct Node {
  double bound = 0;   // lower bound on this subtree (parent or trial LP)
  double pbase = 0;   // parent LP objective: pseudocost reference point
  long id = 0;        // creation order; bound ties pop newest first
  int bvar = -1;      // branched variable and direction that created the node
  int bdir = 0;       // -1 down (ub tightened), +1 up (lb tightened)
  double bfrac = 0;   // fractional part of the parent LP value of bvar
  std::vector<double> lb, ub;
  LpBasis basis;  // parent optimal basis: warm start for this node's LP
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id < b.id;  // bound ties pop newest first: warm bases are hot
  }
};

// Average objective degradation per unit of bound movement, per variable
// and direction; drives branching toward decisions that move the bound.
struct Pseudocost {
  double sum = 0;
  long cnt = 0;
};

}  // namespace

MipSolution solve_mip(const LinearModel& m, const MipOptions& opts) {
  const int n = m.n_vars();
  MipSolution out;

  std::vector<double> lb0(n), ub0(n);
  for (int j = 0; j < n; ++j) {
    lb0[j] = m.vars[j].lb;
    ub0[j] = m.vars[j].ub;
    if (m.vars[j].integral && !(std::isfinite(lb0[j]) && std::isfinite(ub0[j])))
      throw std::invalid_argument("solve_mip: integer variable with unbounded domain: " +
                                  m.vars[j].name);
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::optional<Node> dive;  // depth-first plunge continuation
  long next_id = 0;
  {
    Node root;
    root.bound = -std::numeric_limits<double>::infinity();
    root.pbase = -std::numeric_limits<double>::infinity();
    root.id = next_id++;
    root.lb = std::move(lb0);
    root.ub = std::move(ub0);
    open.push(std::move(root));
  }

  bool have_incumbent = false;
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<double> best_values;

  std::vector<Pseudocost> pc_down(n), pc_up(n);
  Pseudocost pc_all;  // fallback rate for never-branched variables
  std::vector<char> tried_down(n, 0), tried_up(n, 0);
  long trial_budget = 1200;  // total extra LPs spent sizing candidates

  detail::BoundedSimplex<double> engine(m, opts.lp);

  const auto snap_integers = [&](std::vector<double> v) {
    for (int j = 0; j < n; ++j)
      if (m.vars[j].integral) v[j] = std::round(v[j]);
    return v;
  };

  const auto is_integral = [&](const std::vector<double>& v) {
    for (int j = 0; j < n; ++j) {
      if (!m.vars[j].integral) continue;
      const double frac = v[j] - std::floor(v[j]);
      if (frac > opts.int_tol && frac < 1.0 - opts.int_tol) return false;
    }
    return true;
  };

  const auto maybe_incumbent = [&](const LpSolution& sol) {
    if (sol.status != LpStatus::optimal || sol.objective >= incumbent) return;
    if (!is_integral(sol.values)) return;
    incumbent = sol.objective;
    have_incumbent = true;
    best_values = snap_integers(sol.values);
  };

  const auto finish = [&](MipStatus st, double bound) {
    out.status = st;
    out.objective = incumbent;
    out.best_bound = std::min(bound, incumbent);
    out.values = best_values;
    if (std::getenv("COEX_SOLVER_STATS")) {
      const auto& s = engine.stats;
      std::fprintf(stderr,
                   "solver stats: cold=%ld fast=%ld cache=%ld lu=%ld rej=%ld "
                   "bail=%ld rinf=%ld rpiv=%ld ppiv=%ld\n",
                   s.cold_starts, s.fast_loads, s.cache_loads, s.lu_loads,
                   s.load_rejects, s.repair_bails, s.repair_infeasible,
                   s.repair_pivots, s.phase_pivots);
    }
    return out;
  };

  while (dive.has_value() || !open.empty()) {
    double frontier = incumbent;
    if (dive) frontier = std::min(frontier, dive->bound);
    if (!open.empty()) frontier = std::min(frontier, open.top().bound);
    if (have_incumbent &&
        incumbent - frontier <= opts.gap_tol * std::max(1e-12, std::abs(incumbent)))
      return finish(MipStatus::gap_limit, frontier);
    if (out.nodes >= opts.node_limit) return finish(MipStatus::node_limit, frontier);

    Node node;
    if (dive) {
      node = std::move(*dive);
      dive.reset();
    } else {
      node = open.top();
      open.pop();
    }
    if (node.bound >= incumbent) continue;  // pruned by a newer incumbent

    ++out.nodes;
    const LpSolution lp = engine.solve(&node.lb, &node.ub, &node.basis);
    if (lp.status == LpStatus::unbounded)
      throw std::runtime_error("solve_mip: LP relaxation is unbounded");

    if (lp.status == LpStatus::optimal && node.bvar >= 0 &&
        std::isfinite(node.pbase)) {
      // Record how much this branch actually moved the objective.
      const double dist = node.bdir < 0 ? node.bfrac : 1.0 - node.bfrac;
      const double rate =
          std::max(0.0, lp.objective - node.pbase) / std::max(dist, 1e-6);
      auto& pc = node.bdir < 0 ? pc_down[node.bvar] : pc_up[node.bvar];
      pc.sum += rate;
      ++pc.cnt;
      pc_all.sum += rate;
      ++pc_all.cnt;
    }

    if (lp.status == LpStatus::infeasible) continue;
    if (lp.objective >= incumbent) continue;

    std::vector<int> fracs;
    for (int j = 0; j < n; ++j) {
      if (!m.vars[j].integral) continue;
      const double frac = lp.values[j] - std::floor(lp.values[j]);
      if (frac > opts.int_tol && frac < 1.0 - opts.int_tol) fracs.push_back(j);
    }

    if (fracs.empty()) {
      // Integral: new incumbent (strict improvement guaranteed above).
      incumbent = lp.objective;
      have_incumbent = true;
      best_values = snap_integers(lp.values);
      continue;
    }

    if (out.nodes == 1) {
      // Root rounding heuristic: fix every integer variable to a rounded
      // copy of the relaxation and price the rest. Any feasible result
      // seeds the incumbent so best-bound search can prune early.
      for (const double bias : {0.5, 0.0, 1.0}) {
        std::vector<double> hlb = node.lb, hub = node.ub;
        for (int j = 0; j < n; ++j) {
          if (!m.vars[j].integral) continue;
          double v = std::floor(lp.values[j] + bias);
          v = std::min(node.ub[j], std::max(node.lb[j], v));
          hlb[j] = v;
          hub[j] = v;
        }
        LpBasis scratch = node.basis;
        const LpSolution h = engine.solve(&hlb, &hub, &scratch);
        maybe_incumbent(h);
      }
    }

    const double fallback = pc_all.cnt > 0 ? pc_all.sum / pc_all.cnt : 1.0;
    const auto score_of = [&](int j, double frac) {
      const double rd =
          pc_down[j].cnt > 0 ? pc_down[j].sum / pc_down[j].cnt : fallback;
      const double ru = pc_up[j].cnt > 0 ? pc_up[j].sum / pc_up[j].cnt : fallback;
      return std::max(rd * frac, 1e-12) * std::max(ru * (1.0 - frac), 1e-12);
    };

    // Candidates without a measured pseudocost get sized by an actual
    // trial solve of each child (cheap: warm-started off this node's
    // basis). The rates seed the pseudocosts and the child objectives
    // tighten the subtree bounds below.
    std::vector<std::pair<int, std::pair<double, double>>> trials;
    if (trial_budget > 0) {
      std::vector<std::pair<double, int>> order;
      order.reserve(fracs.size());
      for (const int j : fracs) {
        const double frac = lp.values[j] - std::floor(lp.values[j]);
        order.emplace_back(-score_of(j, frac), j);
      }
      std::sort(order.begin(), order.end());
      int done = 0;
      for (const auto& [neg_score, j] : order) {
        if (done >= 8 || trial_budget <= 0) break;
        if (tried_down[j] && tried_up[j]) continue;
        tried_down[j] = tried_up[j] = 1;
        ++done;
        trial_budget -= 2;
        const double v = lp.values[j];
        const double split = std::floor(v + opts.int_tol);
        const double frac = v - split;
        double objs[2];
        for (const int side : {0, 1}) {
          std::vector<double> tlb = node.lb, tub = node.ub;
          if (side == 0)
            tub[j] = split;
          else
            tlb[j] = split + 1.0;
          LpBasis scratch = node.basis;
          const LpSolution t = engine.solve(&tlb, &tub, &scratch);
          if (t.status == LpStatus::optimal) {
            objs[side] = t.objective;
            maybe_incumbent(t);
            const double dist = side == 0 ? frac : 1.0 - frac;
            const double rate =
                std::max(0.0, t.objective - lp.objective) / std::max(dist, 1e-6);
            auto& pc = side == 0 ? pc_down[j] : pc_up[j];
            pc.sum += rate;
            ++pc.cnt;
            pc_all.sum += rate;
            ++pc_all.cnt;
          } else {
            objs[side] = std::numeric_limits<double>::infinity();
          }
        }
        trials.emplace_back(j, std::make_pair(objs[0], objs[1]));
      }
    }

    // Branch variable by pseudocost product score; catalog order on ties.
    int branch_var = -1;
    double best_score = -1.0;
    double branch_frac = 0.0;
    for (const int j : fracs) {
      const double frac = lp.values[j] - std::floor(lp.values[j]);
      const double score = score_of(j, frac);
      if (score > best_score * (1.0 + 1e-12) + 1e-300) {
        best_score = score;
        branch_var = j;
        branch_frac = frac;
      }
    }

    double bound_down = lp.objective, bound_up = lp.objective;
    for (const auto& [j, objs] : trials) {
      if (j != branch_var) continue;
      bound_down = std::max(bound_down, objs.first);
      bound_up = std::max(bound_up, objs.second);
    }

    const double split = std::floor(lp.values[branch_var] + opts.int_tol);
    Node down = node, up = std::move(node);
    down.bound = bound_down;
    down.pbase = lp.objective;
    down.id = next_id++;
    down.bvar = branch_var;
    down.bdir = -1;
    down.bfrac = branch_frac;
    down.ub[branch_var] = split;
    up.bound = bound_up;
    up.pbase = lp.objective;
    up.id = next_id++;
    up.bvar = branch_var;
    up.bdir = +1;
    up.bfrac = branch_frac;
    up.lb[branch_var] = split + 1.0;

    // Plunge into the more promising child; park (or prune) the other.
    const bool down_first =
        bound_down != bound_up ? bound_down < bound_up : branch_frac < 0.5;
    Node* first = down_first ? &down : &up;
    Node* second = down_first ? &up : &down;
    if (second->bound < incumbent) open.push(std::move(*second));
    if (first->bound < incumbent) dive = std::move(*first);
  }

  if (!have_incumbent) {
    out.status = MipStatus::infeasible;
    out.best_bound = std::numeric_limits<double>::infinity();
    out.objective = std::numeric_limits<double>::infinity();
    return out;
  }
  return finish(MipStatus::optimal, incumbent);
}

}  // namespace coex
