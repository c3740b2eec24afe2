#pragma once

// Case orchestration: scenario construction -> planning model -> integer
// solve -> operating simulation -> artifact bundle on disk. Bundles are
// written atomically (temp directory, then rename) and are byte-stable
// for identical inputs, so reruns can be diffed.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "coex/branch_and_bound.hpp"
#include "coex/dataset.hpp"
#include "coex/dispatch.hpp"
#include "coex/model_builder.hpp"
#include "coex/scenario.hpp"

namespace coex {

// Exit-code carriers for the command-line front end: bad inputs (1),
// solver gave no usable plan (2), filesystem trouble (3).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SyncMode { synchronized, non_synchronized };

std::string to_string(SyncMode m);

struct CaseSpec {
  std::string name = "case";
  int n_load_blocks = 8;
  int n_wind_bins = 1;
  SyncMode sync = SyncMode::synchronized;
  double peak_fraction = 0.01;
  double gap_tol = 1e-6;
  long node_limit = 200000;
  int threads = 1;
  bool export_model = false;  // also write model.mps into the bundle
  DerateForm derate_form = DerateForm::corrected;
};

struct CaseResult {
  CaseSpec spec;
  ScenarioSet scenarios;
  MipSolution mip;
  ExpansionPlan plan;
  std::array<double, kNumCostTerms> costs{};
  GapReport gap;
  double wind_built_mw = 0.0;
  double total_built_mw = 0.0;
  std::uint64_t dataset_fingerprint = 0;
};

// Scenario set for a case spec (checks the non-synchronized bin rule).
ScenarioSet case_scenarios(const SystemDataset& ds, const CaseSpec& spec);

// Flat CSV of a scenario set (one row per year/scenario) and a terse
// human-readable model size report; both appear in bundles and are also
// used by the command-line front end.
std::string scenarios_csv(const SystemDataset& ds, const ScenarioSet& scn);
std::string model_summary(const BuiltModel& bm);

// Full pipeline; writes the artifact bundle under out_dir:
//   scenarios.csv, model.txt, plan.csv, builds_by_year.csv, flows.csv,
//   gap_report.csv, summary.json (and model.mps when requested).
CaseResult run_case(const SystemDataset& ds, const CaseSpec& spec,
                    const std::string& out_dir);

// Side-by-side comparison CSV from previously written bundles; all
// bundles must carry the same dataset fingerprint.
std::string compare_cases(const std::vector<std::string>& bundle_dirs);

struct SequentialResult {
  CaseResult sequential;          // stage-2 outcome (bundle written)
  double cooptimized_objective;   // joint solve on the same scenarios
  double sequential_objective;
  double delta_npv;               // sequential - cooptimized, >= 0
  double delta_percent;           // delta relative to cooptimized
};

// Two-stage benchmark: generation expansion with transmission builds
// frozen at zero, then transmission expansion with the stage-1 builds
// fixed. The joint problem is solved on the side for the delta report.
SequentialResult not_cooptimized(const SystemDataset& ds,
                                 const CaseSpec& spec,
                                 const std::string& out_dir);

}  // namespace coex
