#pragma once

// Best-bound branch and bound over simplex LP relaxations. Branches on
// the most-fractional integer variable (catalog order breaks ties),
// exploring the down branch first; deterministic by construction.

#include <string>
#include <vector>

#include "coex/linear_model.hpp"
#include "coex/simplex.hpp"

namespace coex {

enum class MipStatus { optimal, infeasible, gap_limit, node_limit };

const char* to_string(MipStatus s);

struct MipOptions {
  double gap_tol = 1e-6;   // relative (incumbent - bound) / |incumbent|
  long node_limit = 200000;
  double int_tol = 1e-6;
  SimplexOptions lp;
};

struct MipSolution {
  MipStatus status = MipStatus::infeasible;
  double objective = 0.0;   // incumbent (minimization)
  double best_bound = 0.0;
  std::vector<double> values;
  long nodes = 0;

  double gap() const;
};

MipSolution solve_mip(const LinearModel& m, const MipOptions& opts = {});

}  // namespace coex
