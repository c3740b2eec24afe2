// Batch front door for the expansion toolkit. Subcommands cover dataset
// validation, scenario construction, model inspection/export, integer
// solves, operating simulation, and full case pipelines.
//
// Exit codes: 0 ok, 1 bad inputs, 2 solver limit, 3 I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coex/csv.hpp"
#include "coex/dataset_io.hpp"
#include "coex/mps.hpp"
#include "coex/runcase.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Cli {
  std::string dataset;
  std::string out;
  unsigned seed = 7;  // reserved for dataset generators
  int threads = 1;

  // case shape; -1 / nan mean "take the dataset's defaults"
  std::string name = "case";
  int blocks = -1;
  int bins = -1;
  std::string sync = "sync";
  double peak_fraction = std::nan("");
  double gap = std::nan("");
  long node_limit = -1;
};

coex::SystemDataset load_dataset(const Cli& cli, coex::CaseDefaults* defaults) {
  if (cli.dataset.empty())
    throw coex::ValidationError("--dataset is required for this command");
  if (!fs::exists(cli.dataset))
    throw coex::IoError("dataset directory not found: " + cli.dataset);
  try {
    return coex::read_dataset(cli.dataset, defaults);
  } catch (const std::exception& ex) {
    throw coex::ValidationError(std::string("dataset: ") + ex.what());
  }
}

coex::CaseSpec make_spec(const Cli& cli, const coex::CaseDefaults& d) {
  coex::CaseSpec spec;
  spec.name = cli.name;
  spec.n_load_blocks = cli.blocks >= 0 ? cli.blocks : d.n_load_blocks;
  spec.n_wind_bins = cli.bins >= 0 ? cli.bins : d.n_wind_bins;
  spec.peak_fraction =
      std::isnan(cli.peak_fraction) ? d.peak_fraction : cli.peak_fraction;
  spec.gap_tol = std::isnan(cli.gap) ? d.gap : cli.gap;
  spec.node_limit = cli.node_limit >= 0 ? cli.node_limit : d.node_limit;
  spec.threads = cli.threads;
  if (cli.sync == "sync" || cli.sync == "synchronized") {
    spec.sync = coex::SyncMode::synchronized;
  } else if (cli.sync == "nonsync" || cli.sync == "non_synchronized") {
    spec.sync = coex::SyncMode::non_synchronized;
    if (cli.bins < 0) spec.n_wind_bins = 2;
  } else {
    throw coex::ValidationError("--sync must be sync or nonsync");
  }
  return spec;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw coex::IoError("cannot open " + path);
  out << text;
  if (!out) throw coex::IoError("short write to " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw coex::IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
}

int cmd_validate(const Cli& cli) {
  coex::CaseDefaults d;
  const coex::SystemDataset ds = load_dataset(cli, &d);
  const auto violations = coex::validate_dataset(ds);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "invalid: " << v.entity << ": " << v.detail << "\n";
    return 1;
  }
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(coex::dataset_fingerprint(cli.dataset)));
  std::cout << "ok: " << ds.regions.size() << " regions, " << ds.generators.size()
            << " generators, " << ds.interfaces.size() << " interfaces, "
            << ds.horizon.n_years << " years x " << ds.horizon.hours_per_year
            << " hours (fingerprint " << fp << ")\n";
  return 0;
}

int cmd_scenarios(const Cli& cli) {
  coex::CaseDefaults d;
  const coex::SystemDataset ds = load_dataset(cli, &d);
  const coex::CaseSpec spec = make_spec(cli, d);
  const coex::ScenarioSet scn = coex::case_scenarios(ds, spec);
  emit(cli.out, coex::scenarios_csv(ds, scn));
  return 0;
}

int cmd_build_model(const Cli& cli, const std::string& mps_path) {
  coex::CaseDefaults d;
  const coex::SystemDataset ds = load_dataset(cli, &d);
  const coex::CaseSpec spec = make_spec(cli, d);
  const coex::ScenarioSet scn = coex::case_scenarios(ds, spec);
  const coex::BuiltModel built = coex::build_model(ds, scn);
  std::cout << coex::model_summary(built);
  if (!mps_path.empty()) write_text(mps_path, coex::export_mps(built.model));
  return 0;
}

int cmd_solve(const Cli& cli, const std::string& mps_path,
              const std::string& solution_path) {
  coex::CaseDefaults d;
  const coex::SystemDataset ds = load_dataset(cli, &d);
  const coex::CaseSpec spec = make_spec(cli, d);
  const coex::ScenarioSet scn = coex::case_scenarios(ds, spec);
  const coex::BuiltModel built = coex::build_model(ds, scn);

  if (!mps_path.empty() && solution_path.empty()) {
    // Export for an external solver; nothing to solve locally.
    write_text(mps_path, coex::export_mps(built.model));
    std::cout << "wrote " << mps_path << "\n";
    return 0;
  }

  coex::MipSolution sol;
  if (!solution_path.empty()) {
    std::vector<std::string> warnings;
    sol = coex::import_solution(built.model, read_text(solution_path), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  } else {
    coex::MipOptions mo;
    mo.gap_tol = spec.gap_tol;
    mo.node_limit = spec.node_limit;
    sol = coex::solve_mip(built.model, mo);
    if (sol.status == coex::MipStatus::infeasible)
      throw coex::SolverLimit("no feasible expansion plan");
    if (sol.status == coex::MipStatus::node_limit) {
      std::ostringstream msg;
      msg << "node limit reached (nodes=" << sol.nodes;
      if (std::isfinite(sol.objective))
        msg << ", incumbent=" << sol.objective << ", bound=" << sol.best_bound
            << ", gap=" << sol.gap();
      else
        msg << ", no incumbent, bound=" << sol.best_bound;
      msg << ")";
      throw coex::SolverLimit(msg.str());
    }
  }

  const coex::ExpansionPlan plan = coex::extract_plan(ds, built.model, sol.values);
  const auto costs = coex::cost_breakdown(built, sol.values);
  json j;
  j["status"] = to_string(sol.status);
  j["objective"] = sol.objective;
  j["best_bound"] = sol.best_bound;
  j["nodes"] = sol.nodes;
  for (int t = 0; t < coex::kNumCostTerms; ++t)
    j["costs"][coex::to_string(static_cast<coex::CostTerm>(t))] = costs[t];
  std::cout << j.dump(2) << "\n";
  if (!cli.out.empty()) {
    fs::create_directories(cli.out);
    write_text((fs::path(cli.out) / "plan.csv").string(),
               coex::plan_to_csv(ds, plan));
    std::ostringstream sv;
    sv << "name,value\n";
    for (int v = 0; v < built.model.n_vars(); ++v)
      sv << built.model.vars[v].name << "," << coex::csv_number(sol.values[v])
         << "\n";
    write_text((fs::path(cli.out) / "solution.csv").string(), sv.str());
  }
  return 0;
}

int cmd_simulate(const Cli& cli, const std::string& plan_path,
                 const std::string& mode) {
  coex::CaseDefaults d;
  const coex::SystemDataset ds = load_dataset(cli, &d);
  const coex::CaseSpec spec = make_spec(cli, d);
  const coex::ExpansionPlan plan = coex::plan_from_csv(ds, read_text(plan_path));
  const auto bad = coex::validate_plan(ds, plan);
  if (!bad.empty()) {
    for (const auto& v : bad) std::cerr << "invalid plan: " << v.entity << ": " << v.detail << "\n";
    return 1;
  }
  coex::SimulateOptions sim;
  sim.threads = cli.threads;

  auto year_csv = [](const coex::OperatingCost& oc) {
    std::ostringstream out;
    out << "year,generation_cost,emission_cost\n";
    for (int y = 0; y < oc.generation_by_year.size(); ++y)
      out << y << "," << coex::csv_number(oc.generation_by_year[y]) << ","
          << coex::csv_number(oc.emission_by_year[y]) << "\n";
    return out.str();
  };
  auto cost_json = [](const coex::OperatingCost& oc) {
    return json{{"generation_cost", oc.generation_cost()},
                {"emission_cost", oc.emission_cost()},
                {"total", oc.total()}};
  };

  if (mode == "lt" || mode == "st") {
    const coex::OperatingCost oc =
        mode == "lt"
            ? coex::lt_operate(ds, coex::case_scenarios(ds, spec), plan, sim)
            : coex::st_operate(ds, plan, sim);
    json j = cost_json(oc);
    j["mode"] = mode;
    std::cout << j.dump(2) << "\n";
    if (!cli.out.empty()) write_text(cli.out, year_csv(oc));
    return 0;
  }
  if (mode != "gap") throw coex::ValidationError("--mode must be lt, st or gap");

  const coex::OperatingCost lt =
      coex::lt_operate(ds, coex::case_scenarios(ds, spec), plan, sim);
  const coex::OperatingCost st = coex::st_operate(ds, plan, sim);
  const coex::GapReport gr = coex::gap_report(lt, st);
  json j;
  j["mode"] = "gap";
  j["lt"] = {{"generation_cost", gr.lt_generation_cost},
             {"emission_cost", gr.lt_emission_cost}};
  j["st"] = {{"generation_cost", gr.st_generation_cost},
             {"emission_cost", gr.st_emission_cost}};
  j["gap"] = gr.gap;
  std::cout << j.dump(2) << "\n";
  if (!cli.out.empty()) {
    std::ostringstream out;
    out << "year,lt_generation_cost,lt_emission_cost,st_generation_cost,"
           "st_emission_cost,gap\n";
    for (int y = 0; y < gr.gap_by_year.size(); ++y)
      out << y << "," << coex::csv_number(gr.lt_gen_by_year[y]) << ","
          << coex::csv_number(gr.lt_emis_by_year[y]) << ","
          << coex::csv_number(gr.st_gen_by_year[y]) << ","
          << coex::csv_number(gr.st_emis_by_year[y]) << ","
          << coex::csv_number(gr.gap_by_year[y]) << "\n";
    write_text(cli.out, out.str());
  }
  return 0;
}

int cmd_run_case(const Cli& cli, bool export_model) {
  coex::CaseDefaults d;
  const coex::SystemDataset ds = load_dataset(cli, &d);
  coex::CaseSpec spec = make_spec(cli, d);
  spec.export_model = export_model;
  const std::string out = cli.out.empty() ? spec.name : cli.out;
  const coex::CaseResult res = coex::run_case(ds, spec, out);
  std::cout << "case " << spec.name << ": " << to_string(res.mip.status)
            << ", objective " << coex::csv_number(res.mip.objective)
            << ", wind built " << coex::csv_number(res.wind_built_mw)
            << " MW, gap " << coex::csv_number(res.gap.gap) << " -> " << out
            << "\n";
  return 0;
}

int cmd_compare(const Cli& cli, const std::vector<std::string>& bundles) {
  emit(cli.out, coex::compare_cases(bundles));
  return 0;
}

int cmd_sequential(const Cli& cli) {
  coex::CaseDefaults d;
  const coex::SystemDataset ds = load_dataset(cli, &d);
  const coex::CaseSpec spec = make_spec(cli, d);
  const std::string out = cli.out.empty() ? spec.name + "-sequential" : cli.out;
  const coex::SequentialResult sr = coex::not_cooptimized(ds, spec, out);
  json j = {{"cooptimized_objective", sr.cooptimized_objective},
            {"sequential_objective", sr.sequential_objective},
            {"delta_npv", sr.delta_npv},
            {"delta_percent", sr.delta_percent}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generation and transmission expansion toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name
  Cli cli;
  app.add_option("--dataset", cli.dataset, "dataset directory");
  app.add_option("--out", cli.out, "output file or directory");
  app.add_option("--seed", cli.seed, "seed for dataset generators");
  app.add_option("--threads", cli.threads, "simulation worker threads");

  auto add_case_flags = [&cli](CLI::App* sub) {
    sub->add_option("--name", cli.name, "case label");
    sub->add_option("--blocks", cli.blocks, "load blocks per year");
    sub->add_option("--bins", cli.bins, "wind bins per block");
    sub->add_option("--sync", cli.sync, "wind treatment: sync or nonsync");
    sub->add_option("--peak-fraction", cli.peak_fraction,
                    "share of hours preserved as the peak block");
    sub->add_option("--gap", cli.gap, "relative optimality gap");
    sub->add_option("--node-limit", cli.node_limit, "search node limit");
  };

  app.add_subcommand("validate", "check a dataset directory");
  add_case_flags(app.add_subcommand("scenarios", "write the scenario table"));

  std::string mps_path, solution_path, plan_path, mode = "gap";
  bool export_model = false;
  auto* build = app.add_subcommand("build-model", "report planning model size");
  add_case_flags(build);
  build->add_option("--export-mps", mps_path, "write the model in MPS format");

  auto* solve = app.add_subcommand("solve", "solve the planning problem");
  add_case_flags(solve);
  solve->add_option("--export-mps", mps_path,
                    "write MPS and stop (external solver escape hatch)");
  solve->add_option("--import-solution", solution_path,
                    "name,value CSV from an external solver");

  auto* sim = app.add_subcommand("simulate", "operate a fixed expansion plan");
  add_case_flags(sim);
  sim->add_option("--plan", plan_path, "plan CSV")->required();
  sim->add_option("--mode", mode, "lt, st or gap");

  auto* rc = app.add_subcommand("run-case", "full pipeline into a bundle");
  add_case_flags(rc);
  rc->add_flag("--export-mps", export_model, "include model.mps in the bundle");

  std::vector<std::string> bundles;
  auto* cmp = app.add_subcommand("compare", "side-by-side bundle comparison");
  cmp->add_option("bundles", bundles, "bundle directories")->expected(-2);

  auto* seq = app.add_subcommand("sequential",
                                 "generation-then-transmission benchmark");
  add_case_flags(seq);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("validate")) return cmd_validate(cli);
    if (app.got_subcommand("scenarios")) return cmd_scenarios(cli);
    if (app.got_subcommand("build-model")) return cmd_build_model(cli, mps_path);
    if (app.got_subcommand("solve")) return cmd_solve(cli, mps_path, solution_path);
    if (app.got_subcommand("simulate")) return cmd_simulate(cli, plan_path, mode);
    if (app.got_subcommand("run-case")) return cmd_run_case(cli, export_model);
    if (app.got_subcommand("compare")) return cmd_compare(cli, bundles);
    if (app.got_subcommand("sequential")) return cmd_sequential(cli);
  } catch (const coex::ValidationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const coex::SolverLimit& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const coex::IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
