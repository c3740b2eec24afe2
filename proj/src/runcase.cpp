#include "coex/runcase.hpp"

#include <json.hpp>
#include <stdlib.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coex/csv.hpp"
#include "coex/dataset_io.hpp"
#include "coex/mps.hpp"

namespace fs = std::filesystem;

namespace coex {
namespace {

// Re-throws any stage failure with a stage tag; untyped exceptions are
// promoted to the stage's default category E.
template <class E, class F>
decltype(auto) stage(const char* tag, F&& f) {
  auto tagged = [&](const char* what) { return std::string(tag) + ": " + what; };
  try {
    return f();
  } catch (const ValidationError& ex) {
    throw ValidationError(tagged(ex.what()));
  } catch (const SolverLimit& ex) {
    throw SolverLimit(tagged(ex.what()));
  } catch (const IoError& ex) {
    throw IoError(tagged(ex.what()));
  } catch (const std::exception& ex) {
    throw E(tagged(ex.what()));
  }
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

// Fingerprint of the in-memory dataset: canonical on-disk serialization
// hashed from a scratch directory, so it matches a fingerprint taken on
// a directory written by write_dataset.
std::uint64_t fingerprint_of(const SystemDataset& ds) {
  std::string tmpl = (fs::temp_directory_path() / "coex-fp-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (mkdtemp(buf.data()) == nullptr) throw IoError("cannot create scratch directory");
  const std::string dir(buf.data());
  std::uint64_t fp = 0;
  try {
    write_dataset(dir, ds);
    fp = dataset_fingerprint(dir);
  } catch (...) {
    fs::remove_all(dir);
    throw;
  }
  fs::remove_all(dir);
  return fp;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open " + p.string());
  out << text;
  if (!out) throw IoError("short write to " + p.string());
}

}  // namespace

std::string scenarios_csv(const SystemDataset& ds, const ScenarioSet& scn) {
  std::ostringstream out;
  out << "year,scenario,probability,duration_hours,system_load";
  for (const auto& r : ds.regions) out << ",load_" << r.id;
  for (int g : ds.cf_generators()) out << ",cf_" << ds.generators[g].id;
  out << "\n";
  for (int y = 0; y < static_cast<int>(scn.years.size()); ++y) {
    for (int s = 0; s < static_cast<int>(scn.years[y].size()); ++s) {
      const Scenario& sc = scn.years[y][s];
      out << y << "," << s << "," << csv_number(sc.probability) << ","
          << sc.duration_hours << "," << csv_number(sc.system_load);
      for (int r = 0; r < static_cast<int>(ds.regions.size()); ++r)
        out << "," << csv_number(sc.load_by_region[r]);
      for (int g : ds.cf_generators()) out << "," << csv_number(sc.cf_by_generator[g]);
      out << "\n";
    }
  }
  return out.str();
}

std::string model_summary(const BuiltModel& bm) {
  const LinearModel& m = bm.model;
  int integer = 0;
  std::array<int, 7> by_kind{};
  for (const auto& v : m.vars) {
    if (v.integral) ++integer;
    ++by_kind[static_cast<int>(v.kind)];
  }
  std::array<int, 3> by_sense{};
  for (const auto& r : m.rows) ++by_sense[static_cast<int>(r.sense)];
  std::ostringstream out;
  out << "variables " << m.n_vars() << " (integer " << integer << ")\n"
      << "  generator builds " << by_kind[static_cast<int>(VarKind::gen_build)]
      << "\n  interface builds " << by_kind[static_cast<int>(VarKind::tx_build)]
      << "\n  dispatch " << by_kind[static_cast<int>(VarKind::dispatch)]
      << "\n  unserved " << by_kind[static_cast<int>(VarKind::unserved)]
      << "\n  flows "
      << by_kind[static_cast<int>(VarKind::flow_pos)] +
             by_kind[static_cast<int>(VarKind::flow_neg)]
      << "\n"
      << "rows " << m.n_rows() << " (le " << by_sense[static_cast<int>(Sense::le)]
      << ", eq " << by_sense[static_cast<int>(Sense::eq)] << ", ge "
      << by_sense[static_cast<int>(Sense::ge)] << ")\n";
  if (!bm.warnings.empty()) {
    out << "warnings:\n";
    for (const auto& w : bm.warnings) out << "  - " << w << "\n";
  }
  return out.str();
}

namespace {

std::string builds_by_year_csv(const SystemDataset& ds, const ExpansionPlan& plan) {
  std::ostringstream out;
  out << "year,entity_type,entity,builds,cumulative_units,installed_mw\n";
  const int ny = ds.horizon.n_years;
  for (int y = 0; y < ny; ++y) {
    for (int g = 0; g < static_cast<int>(ds.generators.size()); ++g) {
      const int cum = cumulative_gen_units(ds, plan, y, g);
      out << y << ",generator," << ds.generators[g].id << "," << plan.gen_builds(y, g)
          << "," << cum << "," << csv_number(cum * ds.generators[g].unit_capacity)
          << "\n";
    }
    for (int l = 0; l < static_cast<int>(ds.interfaces.size()); ++l) {
      const int cum = cumulative_tx_units(ds, plan, y, l);
      out << y << ",interface," << ds.interfaces[l].id << "," << plan.tx_builds(y, l)
          << "," << cum << "," << csv_number(cum * ds.interfaces[l].unit_capacity)
          << "\n";
    }
  }
  return out.str();
}

// Annual interface energy from the planning solution's flow variables,
// weighted by scenario hours.
struct FlowEnergy {
  Eigen::ArrayXXd forward;  // (year, interface) MWh
  Eigen::ArrayXXd backward;
};

FlowEnergy flow_energy(const SystemDataset& ds, const ScenarioSet& scn,
                       const LinearModel& m, const std::vector<double>& x) {
  const int ny = ds.horizon.n_years;
  const int nl = static_cast<int>(ds.interfaces.size());
  const double t = ds.horizon.hours_per_year;
  FlowEnergy fe;
  fe.forward = Eigen::ArrayXXd::Zero(ny, nl);
  fe.backward = Eigen::ArrayXXd::Zero(ny, nl);
  for (int j = 0; j < m.n_vars(); ++j) {
    const Variable& v = m.vars[j];
    if (v.kind != VarKind::flow_pos && v.kind != VarKind::flow_neg) continue;
    const double pr = scn.years[v.year][v.scenario].probability;
    const double mwh = t * pr * x[j];
    if (v.kind == VarKind::flow_pos)
      fe.forward(v.year, v.interface) += mwh;
    else
      fe.backward(v.year, v.interface) += mwh;
  }
  return fe;
}

std::string flows_csv(const SystemDataset& ds, const FlowEnergy& fe) {
  std::ostringstream out;
  out << "year,interface,forward_mwh,backward_mwh,net_mwh\n";
  for (int y = 0; y < fe.forward.rows(); ++y)
    for (int l = 0; l < fe.forward.cols(); ++l)
      out << y << "," << ds.interfaces[l].id << "," << csv_number(fe.forward(y, l))
          << "," << csv_number(fe.backward(y, l)) << ","
          << csv_number(fe.forward(y, l) - fe.backward(y, l)) << "\n";
  return out.str();
}

std::string gap_csv(const GapReport& gr) {
  std::ostringstream out;
  out << "year,lt_generation_cost,lt_emission_cost,st_generation_cost,"
         "st_emission_cost,gap\n";
  for (int y = 0; y < gr.lt_gen_by_year.size(); ++y)
    out << y << "," << csv_number(gr.lt_gen_by_year[y]) << ","
        << csv_number(gr.lt_emis_by_year[y]) << "," << csv_number(gr.st_gen_by_year[y])
        << "," << csv_number(gr.st_emis_by_year[y]) << ","
        << csv_number(gr.gap_by_year[y]) << "\n";
  return out.str();
}

void check_solved(const MipSolution& mip) {
  if (mip.status == MipStatus::infeasible)
    throw SolverLimit("no feasible expansion plan");
  if (mip.status == MipStatus::node_limit) {
    std::ostringstream msg;
    msg << "node limit reached (nodes " << mip.nodes << ", remaining gap "
        << mip.gap() << ")";
    throw SolverLimit(msg.str());
  }
}

CaseResult assemble(const SystemDataset& ds, const CaseSpec& spec,
                    ScenarioSet scn, const BuiltModel& built, MipSolution mip) {
  CaseResult res;
  res.spec = spec;
  res.plan = extract_plan(ds, built.model, mip.values);
  res.costs = cost_breakdown(built, mip.values);
  for (int g = 0; g < static_cast<int>(ds.generators.size()); ++g) {
    const double built_mw =
        res.plan.gen_builds.col(g).sum() * ds.generators[g].unit_capacity;
    res.total_built_mw += built_mw;
    if (ds.generators[g].kind == GeneratorKind::wind) res.wind_built_mw += built_mw;
  }
  const SimulateOptions sim{spec.derate_form, spec.threads};
  const OperatingCost lt = stage<SolverLimit>(
      "simulate-lt", [&] { return lt_operate(ds, scn, res.plan, sim); });
  const OperatingCost st = stage<SolverLimit>(
      "simulate-st", [&] { return st_operate(ds, res.plan, sim); });
  res.gap = gap_report(lt, st);
  res.scenarios = std::move(scn);
  res.mip = std::move(mip);
  res.dataset_fingerprint = fingerprint_of(ds);
  return res;
}

nlohmann::json summary_json(const SystemDataset& ds, const CaseResult& res,
                            const BuiltModel& built,
                            const nlohmann::json* extra) {
  nlohmann::json j;
  j["case"] = {
      {"name", res.spec.name},
      {"n_load_blocks", res.spec.n_load_blocks},
      {"n_wind_bins", res.spec.n_wind_bins},
      {"sync", to_string(res.spec.sync)},
      {"peak_fraction", res.spec.peak_fraction},
      {"gap_tol", res.spec.gap_tol},
      {"node_limit", res.spec.node_limit},
  };
  j["dataset_fingerprint"] = hex64(res.dataset_fingerprint);
  j["solver"] = {
      {"status", to_string(res.mip.status)},
      {"objective", res.mip.objective},
      {"best_bound", res.mip.best_bound},
      {"gap", res.mip.gap()},
      {"nodes", res.mip.nodes},
  };
  nlohmann::json costs;
  double total = 0.0;
  for (int t = 0; t < kNumCostTerms; ++t) {
    costs[to_string(static_cast<CostTerm>(t))] = res.costs[t];
    total += res.costs[t];
  }
  costs["total"] = total;
  j["costs"] = costs;
  j["builds"] = {
      {"wind_built_mw", res.wind_built_mw},
      {"total_built_mw", res.total_built_mw},
  };
  const FlowEnergy fe =
      flow_energy(ds, res.scenarios, built.model, res.mip.values);
  nlohmann::json net;
  for (const auto& r : ds.regions) {
    double imported = 0.0;
    for (const auto& inc : interface_incidence(ds, r.id))
      imported += inc.sign * (fe.forward.col(inc.interface).sum() -
                              fe.backward.col(inc.interface).sum());
    net[r.id] = imported;
  }
  j["net_import_mwh"] = net;
  j["gap_report"] = {
      {"lt_generation_cost", res.gap.lt_generation_cost},
      {"lt_emission_cost", res.gap.lt_emission_cost},
      {"st_generation_cost", res.gap.st_generation_cost},
      {"st_emission_cost", res.gap.st_emission_cost},
      {"gap", res.gap.gap},
  };
  j["model"] = {
      {"n_vars", built.model.n_vars()},
      {"n_rows", built.model.n_rows()},
  };
  j["warnings"] = built.warnings;
  if (extra != nullptr) j["sequential"] = *extra;
  return j;
}

void write_bundle(const SystemDataset& ds, const CaseResult& res,
                  const BuiltModel& built, const std::string& out_dir,
                  const nlohmann::json* extra) {
  stage<IoError>("write", [&] {
    const fs::path out(out_dir);
    const fs::path tmp(out_dir + ".tmp");
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    write_file(tmp / "scenarios.csv", scenarios_csv(ds, res.scenarios));
    write_file(tmp / "model.txt", model_summary(built));
    write_file(tmp / "plan.csv", plan_to_csv(ds, res.plan));
    write_file(tmp / "builds_by_year.csv", builds_by_year_csv(ds, res.plan));
    write_file(tmp / "flows.csv",
               flows_csv(ds, flow_energy(ds, res.scenarios, built.model,
                                         res.mip.values)));
    write_file(tmp / "gap_report.csv", gap_csv(res.gap));
    write_file(tmp / "summary.json",
               summary_json(ds, res, built, extra).dump(2) + "\n");
    if (res.spec.export_model) write_file(tmp / "model.mps", export_mps(built.model));
    fs::remove_all(out);
    fs::rename(tmp, out);
  });
}

MipOptions mip_options(const CaseSpec& spec) {
  MipOptions mo;
  mo.gap_tol = spec.gap_tol;
  mo.node_limit = spec.node_limit;
  return mo;
}

void check_dataset(const SystemDataset& ds) {
  const auto viol = validate_dataset(ds);
  if (viol.empty()) return;
  std::ostringstream msg;
  msg << viol.size() << " dataset problem(s):";
  for (const auto& v : viol) msg << "\n  - " << v.entity + ": " + v.detail;
  throw ValidationError(msg.str());
}

}  // namespace

std::string to_string(SyncMode m) {
  return m == SyncMode::synchronized ? "synchronized" : "non_synchronized";
}

ScenarioSet case_scenarios(const SystemDataset& ds, const CaseSpec& spec) {
  if (spec.sync == SyncMode::non_synchronized && spec.n_wind_bins != 2)
    throw ValidationError("non_synchronized cases require exactly 2 wind bins");
  if (spec.n_wind_bins < 1) throw ValidationError("n_wind_bins must be >= 1");
  if (spec.sync == SyncMode::non_synchronized)
    return build_nonsync_scenarios(ds, spec.n_load_blocks, spec.peak_fraction);
  return build_scenarios(ds, spec.n_load_blocks, spec.n_wind_bins,
                         spec.peak_fraction);
}

CaseResult run_case(const SystemDataset& ds, const CaseSpec& spec,
                    const std::string& out_dir) {
  stage<ValidationError>("validate", [&] { check_dataset(ds); });
  ScenarioSet scn = stage<ValidationError>(
      "scenarios", [&] { return case_scenarios(ds, spec); });
  const BuiltModel built =
      stage<ValidationError>("model", [&] { return build_model(ds, scn, {spec.derate_form}); });
  MipSolution mip = stage<SolverLimit>("solve", [&] {
    MipSolution s = solve_mip(built.model, mip_options(spec));
    check_solved(s);
    return s;
  });
  CaseResult res = assemble(ds, spec, std::move(scn), built, std::move(mip));
  write_bundle(ds, res, built, out_dir, nullptr);
  return res;
}

std::string compare_cases(const std::vector<std::string>& bundle_dirs) {
  if (bundle_dirs.size() < 2)
    throw ValidationError("compare needs at least two bundles");
  std::vector<nlohmann::json> sums;
  for (const auto& dir : bundle_dirs) {
    const fs::path p = fs::path(dir) / "summary.json";
    std::ifstream in(p);
    if (!in) throw IoError("cannot open " + p.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& ex) {
      throw IoError(p.string() + ": " + ex.what());
    }
    sums.push_back(std::move(j));
  }
  const std::string fp = sums.front().at("dataset_fingerprint");
  for (const auto& j : sums)
    if (std::string(j.at("dataset_fingerprint")) != fp)
      throw ValidationError("mismatched datasets across bundles");

  std::vector<std::string> region_ids;
  for (auto it = sums.front().at("net_import_mwh").begin();
       it != sums.front().at("net_import_mwh").end(); ++it)
    region_ids.push_back(it.key());

  std::ostringstream out;
  out << "case,n_load_blocks,n_wind_bins,sync,objective,wind_built_mw,"
         "total_built_mw,gen_build_cost,tx_build_cost,emission_cost,gap";
  for (const auto& r : region_ids) out << ",net_import_mwh_" << r;
  out << "\n";
  for (const auto& j : sums) {
    const auto& c = j.at("case");
    const auto& costs = j.at("costs");
    out << std::string(c.at("name")) << "," << int(c.at("n_load_blocks")) << ","
        << int(c.at("n_wind_bins")) << "," << std::string(c.at("sync")) << ","
        << csv_number(double(j.at("solver").at("objective"))) << ","
        << csv_number(double(j.at("builds").at("wind_built_mw"))) << ","
        << csv_number(double(j.at("builds").at("total_built_mw"))) << ","
        << csv_number(double(costs.at(to_string(CostTerm::gen_build)))) << ","
        << csv_number(double(costs.at(to_string(CostTerm::tx_build)))) << ","
        << csv_number(double(costs.at(to_string(CostTerm::emission)))) << ","
        << csv_number(double(j.at("gap_report").at("gap")));
    for (const auto& r : region_ids)
      out << "," << csv_number(double(j.at("net_import_mwh").at(r)));
    out << "\n";
  }
  return out.str();
}

SequentialResult not_cooptimized(const SystemDataset& ds, const CaseSpec& spec,
                                 const std::string& out_dir) {
  stage<ValidationError>("validate", [&] { check_dataset(ds); });
  ScenarioSet scn = stage<ValidationError>(
      "scenarios", [&] { return case_scenarios(ds, spec); });
  const BuiltModel built =
      stage<ValidationError>("model", [&] { return build_model(ds, scn, {spec.derate_form}); });
  const MipOptions mo = mip_options(spec);

  const MipSolution joint = stage<SolverLimit>("solve-joint", [&] {
    MipSolution s = solve_mip(built.model, mo);
    check_solved(s);
    return s;
  });

  // Stage 1: no new transmission; flows stay capped at existing units.
  LinearModel stage1 = built.model;
  for (auto& v : stage1.vars)
    if (v.kind == VarKind::tx_build) v.ub = 0.0;
  const MipSolution sol1 = stage<SolverLimit>("solve-generation", [&] {
    MipSolution s = solve_mip(stage1, mo);
    check_solved(s);
    return s;
  });
  const ExpansionPlan plan1 = extract_plan(ds, stage1, sol1.values);

  // Stage 2: generation plan frozen, transmission free.
  LinearModel stage2 = built.model;
  for (auto& v : stage2.vars)
    if (v.kind == VarKind::gen_build) {
      const double fixed = plan1.gen_builds(v.year, v.generator);
      v.lb = fixed;
      v.ub = fixed;
    }
  MipSolution sol2 = stage<SolverLimit>("solve-transmission", [&] {
    MipSolution s = solve_mip(stage2, mo);
    check_solved(s);
    return s;
  });

  SequentialResult sr;
  sr.cooptimized_objective = joint.objective;
  sr.sequential_objective = sol2.objective;
  sr.delta_npv = sol2.objective - joint.objective;
  sr.delta_percent = 100.0 * sr.delta_npv /
                     std::max(1e-12, std::abs(joint.objective));
  sr.sequential = assemble(ds, spec, std::move(scn), built, std::move(sol2));
  const nlohmann::json extra = {
      {"cooptimized_objective", sr.cooptimized_objective},
      {"sequential_objective", sr.sequential_objective},
      {"delta_npv", sr.delta_npv},
      {"delta_percent", sr.delta_percent},
  };
  write_bundle(ds, sr.sequential, built, out_dir, &extra);
  return sr;
}

}  // namespace coex
