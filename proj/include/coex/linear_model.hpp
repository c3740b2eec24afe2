#pragma once

// Solver-agnostic mixed-integer linear model: a variable catalog with
// bounds and integrality, a linear objective, and sparse constraint rows.

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace coex {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { gen_build, tx_build, dispatch, unserved, flow_pos, flow_neg, other };

struct Variable {
  std::string name;
  VarKind kind = VarKind::other;
  double lb = 0.0;
  double ub = kInf;
  bool integral = false;
  // Index tags back into the dataset/scenario structures; -1 when not
  // applicable to the variable family.
  int year = -1;
  int region = -1;
  int generator = -1;
  int interface = -1;
  int scenario = -1;
};

enum class Sense { le, eq, ge };

struct LinTerm {
  int var;
  double coef;
};

struct Row {
  std::string name;
  std::vector<LinTerm> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

struct LinearModel {
  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<double> objective;  // aligned with vars; zeros allowed
  double objective_constant = 0.0;

  int add_var(Variable v) {
    const int idx = static_cast<int>(vars.size());
    name_to_var_.emplace(v.name, idx);
    vars.push_back(std::move(v));
    objective.push_back(0.0);
    return idx;
  }

  void add_objective(int var, double coef) { objective[var] += coef; }

  int add_row(Row r) {
    rows.push_back(std::move(r));
    return static_cast<int>(rows.size()) - 1;
  }

  // -1 when the name is unknown.
  int var_index(const std::string& name) const {
    const auto it = name_to_var_.find(name);
    return it == name_to_var_.end() ? -1 : it->second;
  }

  int n_vars() const { return static_cast<int>(vars.size()); }
  int n_rows() const { return static_cast<int>(rows.size()); }

  double eval_objective(const std::vector<double>& x) const {
    double v = objective_constant;
    for (int j = 0; j < n_vars(); ++j) v += objective[j] * x[j];
    return v;
  }

  // Largest absolute violation of any row or bound at x.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < n_vars(); ++j) {
      worst = std::max(worst, vars[j].lb - x[j]);
      worst = std::max(worst, x[j] - vars[j].ub);
    }
    for (const auto& row : rows) {
      double lhs = 0.0;
      for (const auto& t : row.terms) lhs += t.coef * x[t.var];
      if (row.sense == Sense::le) worst = std::max(worst, lhs - row.rhs);
      else if (row.sense == Sense::ge) worst = std::max(worst, row.rhs - lhs);
      else worst = std::max(worst, std::abs(lhs - row.rhs));
    }
    return worst;
  }

 private:
  std::unordered_map<std::string, int> name_to_var_;
};

}  // namespace coex
