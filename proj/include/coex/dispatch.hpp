#pragma once

// Fixes an expansion plan and prices its operation two ways: long-term
// (scenario-weighted economic dispatch) and short-term (chronological
// hourly dispatch), then reports the relative cost gap between them.

#include <Eigen/Core>
#include <string>
#include <vector>

#include "coex/branch_and_bound.hpp"
#include "coex/dataset.hpp"
#include "coex/model_builder.hpp"
#include "coex/scenario.hpp"

namespace coex {

struct ExpansionPlan {
  Eigen::ArrayXXi gen_builds;  // (year, generator)
  Eigen::ArrayXXi tx_builds;   // (year, interface)
};

// Reads build counts out of a solved model's values by variable tags.
ExpansionPlan extract_plan(const SystemDataset& ds, const LinearModel& m,
                           const std::vector<double>& values);

// Existing units plus all builds through year y (inclusive).
int cumulative_gen_units(const SystemDataset& ds, const ExpansionPlan& plan, int y, int g);
int cumulative_tx_units(const SystemDataset& ds, const ExpansionPlan& plan, int y, int l);

// Bound violations (annual, total) of a plan against the dataset.
std::vector<Violation> validate_plan(const SystemDataset& ds, const ExpansionPlan& plan);

// CSV schema: year,entity_type,entity,builds — one row per (year, entity),
// zeros included, so the file round-trips losslessly.
std::string plan_to_csv(const SystemDataset& ds, const ExpansionPlan& plan);
ExpansionPlan plan_from_csv(const SystemDataset& ds, const std::string& csv_text);

struct OperatingCost {
  // NPV by operating year; generation = fuel + variable O&M + lost load
  // + wheeling, emission priced separately.
  Eigen::ArrayXd generation_by_year;
  Eigen::ArrayXd emission_by_year;

  double generation_cost() const { return generation_by_year.sum(); }
  double emission_cost() const { return emission_by_year.sum(); }
  double total() const { return generation_cost() + emission_cost(); }
};

struct SimulateOptions {
  DerateForm derate_form = DerateForm::corrected;
  int threads = 1;
};

// Economic dispatch per (year, scenario), weighted by member hours and
// the year's discount factor.
OperatingCost lt_operate(const SystemDataset& ds, const ScenarioSet& scn,
                         const ExpansionPlan& plan, const SimulateOptions& opts = {});

// Chronological hourly dispatch over every hour of every year.
OperatingCost st_operate(const SystemDataset& ds, const ExpansionPlan& plan,
                         const SimulateOptions& opts = {});

struct GapReport {
  double lt_generation_cost = 0, lt_emission_cost = 0;
  double st_generation_cost = 0, st_emission_cost = 0;
  double gap = 0;  // (ST - LT) / ST on generation + emission totals
  Eigen::ArrayXd lt_gen_by_year, lt_emis_by_year, st_gen_by_year, st_emis_by_year, gap_by_year;
};

// Throws std::domain_error when the short-term total is zero.
GapReport gap_report(const OperatingCost& lt, const OperatingCost& st);

}  // namespace coex
