#pragma once

// Assembles the expansion co-optimization MIP over a SystemDataset and a
// ScenarioSet: eight-family discounted cost objective, power balance,
// build limits, availability-derated dispatch caps, regional reserve,
// interface flow caps, renewable portfolio and wind resource rows.

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "coex/dataset.hpp"
#include "coex/linear_model.hpp"
#include "coex/scenario.hpp"

namespace coex {

// Present-value factor for year y (1-based). Years before the horizon end
// discount as (1+d)^-y; the final year is treated as repeating forever,
// (1+d)^-N * (1 + 1/d). Throws std::domain_error when d == 0 in the final
// year (the perpetuity diverges).
double discount_factor(double d, int y, int n_years);

// The availability multiplier combines maintenance and forced outages.
// `corrected` uses 1 - F_MOR*mf - F_FOR (availability falls with outages);
// `as_printed` keeps the +F_FOR variant for A/B comparison.
enum class DerateForm { corrected, as_printed };

double derate(const GeneratorType& g, double mf, DerateForm form = DerateForm::corrected);

// Maintenance factor per (region, scenario) for one year's scenarios:
// (Lmax - L) / (Lmax - Lmin) over that year, so maintenance concentrates
// in low-load scenarios; 0 everywhere when the year's load is flat.
Eigen::ArrayXXd maintenance_factors(const std::vector<Scenario>& year_scenarios,
                                    int n_regions);

enum class CostTerm : int {
  gen_build = 0,
  fixed_om,
  fuel,
  variable_om,
  lost_load,
  tx_build,
  wheeling,
  emission,
};
constexpr int kNumCostTerms = 8;
const char* to_string(CostTerm t);

struct BuildOptions {
  DerateForm derate_form = DerateForm::corrected;
};

struct BuiltModel {
  LinearModel model;
  // Objective split by cost family, for accounting reports: the model's
  // objective vector equals the sum of these entries, and the constant
  // equals the sum of the per-family constants.
  std::array<std::vector<LinTerm>, kNumCostTerms> term_entries;
  std::array<double, kNumCostTerms> term_constants{};
  // Reserve rows that cannot be met even at maximum builds and full
  // import credit; the model is then infeasible by construction.
  std::vector<std::string> warnings;
};

BuiltModel build_model(const SystemDataset& ds, const ScenarioSet& scn,
                       const BuildOptions& opts = {});

// Per-family cost totals of a solution vector (constants included).
std::array<double, kNumCostTerms> cost_breakdown(const BuiltModel& bm,
                                                 const std::vector<double>& x);

}  // namespace coex
