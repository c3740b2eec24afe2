#include "coex/dispatch.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "coex/csv.hpp"
#include "coex/simplex.hpp"

namespace coex {

ExpansionPlan extract_plan(const SystemDataset& ds, const LinearModel& m,
                           const std::vector<double>& values) {
  ExpansionPlan plan;
  plan.gen_builds = Eigen::ArrayXXi::Zero(ds.horizon.n_years, ds.generators.size());
  plan.tx_builds = Eigen::ArrayXXi::Zero(ds.horizon.n_years, ds.interfaces.size());
  for (int j = 0; j < m.n_vars(); ++j) {
    const Variable& v = m.vars[j];
    if (v.kind == VarKind::gen_build)
      plan.gen_builds(v.year, v.generator) = static_cast<int>(std::lround(values[j]));
    else if (v.kind == VarKind::tx_build)
      plan.tx_builds(v.year, v.interface) = static_cast<int>(std::lround(values[j]));
  }
  return plan;
}

int cumulative_gen_units(const SystemDataset& ds, const ExpansionPlan& plan, int y, int g) {
  int units = ds.generators[g].existing_units;
  for (int yp = 0; yp <= y; ++yp) units += plan.gen_builds(yp, g);
  return units;
}

int cumulative_tx_units(const SystemDataset& ds, const ExpansionPlan& plan, int y, int l) {
  int units = ds.interfaces[l].existing_units;
  for (int yp = 0; yp <= y; ++yp) units += plan.tx_builds(yp, l);
  return units;
}

std::vector<Violation> validate_plan(const SystemDataset& ds, const ExpansionPlan& plan) {
  std::vector<Violation> v;
  const int ny = ds.horizon.n_years;
  if (plan.gen_builds.rows() != ny ||
      plan.gen_builds.cols() != static_cast<int>(ds.generators.size()) ||
      plan.tx_builds.rows() != ny ||
      plan.tx_builds.cols() != static_cast<int>(ds.interfaces.size())) {
    v.push_back({"plan", "shape does not match dataset"});
    return v;
  }
  for (size_t g = 0; g < ds.generators.size(); ++g) {
    const auto& gen = ds.generators[g];
    int total = 0;
    for (int y = 0; y < ny; ++y) {
      const int n = plan.gen_builds(y, g);
      if (n < 0) v.push_back({gen.id, "negative builds in year " + std::to_string(y)});
      if (n > gen.max_annual_builds[y])
        v.push_back({gen.id, "annual build limit exceeded in year " + std::to_string(y)});
      total += n;
    }
    if (total > gen.max_total_builds) v.push_back({gen.id, "total build limit exceeded"});
  }
  for (size_t l = 0; l < ds.interfaces.size(); ++l) {
    const auto& ifc = ds.interfaces[l];
    int total = 0;
    for (int y = 0; y < ny; ++y) {
      const int n = plan.tx_builds(y, l);
      if (n < 0) v.push_back({ifc.id, "negative builds in year " + std::to_string(y)});
      if (n > ifc.max_annual_builds[y])
        v.push_back({ifc.id, "annual build limit exceeded in year " + std::to_string(y)});
      total += n;
    }
    if (total > ifc.max_total_builds) v.push_back({ifc.id, "total build limit exceeded"});
  }
  return v;
}

std::string plan_to_csv(const SystemDataset& ds, const ExpansionPlan& plan) {
  std::ostringstream out;
  std::vector<std::vector<std::string>> rows;
  for (int y = 0; y < ds.horizon.n_years; ++y)
    for (size_t g = 0; g < ds.generators.size(); ++g)
      rows.push_back({std::to_string(y), "generator", ds.generators[g].id,
                      std::to_string(plan.gen_builds(y, g))});
  for (int y = 0; y < ds.horizon.n_years; ++y)
    for (size_t l = 0; l < ds.interfaces.size(); ++l)
      rows.push_back({std::to_string(y), "interface", ds.interfaces[l].id,
                      std::to_string(plan.tx_builds(y, l))});
  write_csv(out, {"year", "entity_type", "entity", "builds"}, rows);
  return out.str();
}

ExpansionPlan plan_from_csv(const SystemDataset& ds, const std::string& csv_text) {
  ExpansionPlan plan;
  plan.gen_builds = Eigen::ArrayXXi::Zero(ds.horizon.n_years, ds.generators.size());
  plan.tx_builds = Eigen::ArrayXXi::Zero(ds.horizon.n_years, ds.interfaces.size());

  std::istringstream in(csv_text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto cells = split_csv_line(line);
    if (header) {
      if (cells != std::vector<std::string>{"year", "entity_type", "entity", "builds"})
        throw std::runtime_error("plan: unexpected header");
      header = false;
      continue;
    }
    if (cells.size() != 4) throw std::runtime_error("plan: malformed row '" + line + "'");
    const int y = std::stoi(cells[0]);
    if (y < 0 || y >= ds.horizon.n_years)
      throw std::runtime_error("plan: year out of range in '" + line + "'");
    const int n = std::stoi(cells[3]);
    if (cells[1] == "generator") {
      const int g = ds.generator_index(cells[2]);
      if (g < 0) throw std::runtime_error("plan: unknown generator '" + cells[2] + "'");
      plan.gen_builds(y, g) = n;
    } else if (cells[1] == "interface") {
      const int l = ds.interface_index(cells[2]);
      if (l < 0) throw std::runtime_error("plan: unknown interface '" + cells[2] + "'");
      plan.tx_builds(y, l) = n;
    } else {
      throw std::runtime_error("plan: unknown entity type '" + cells[1] + "'");
    }
  }
  if (header) throw std::runtime_error("plan: empty file");
  return plan;
}

namespace {

struct PeriodCost {
  double generation = 0;
  double emission = 0;
};

// One period's economic dispatch: fleet capacities become variable
// bounds, regions balance through unserved energy and interface flows,
// and both flow directions share the built interface capacity.
PeriodCost dispatch_period(const SystemDataset& ds, int year,
                           const Eigen::ArrayXd& load_by_region,
                           const Eigen::ArrayXd& cf_by_generator,
                           const Eigen::ArrayXd& mf_by_region,
                           const std::vector<int>& gen_units, const std::vector<int>& tx_units,
                           DerateForm form) {
  const int nr = static_cast<int>(ds.regions.size());
  const int ng = static_cast<int>(ds.generators.size());
  const int nl = static_cast<int>(ds.interfaces.size());

  LinearModel lp;
  std::vector<int> pv(ng), usev(nr), fp(nl), fn(nl);
  std::vector<double> gen_rate(ng), emis_rate(ng);

  for (int g = 0; g < ng; ++g) {
    const auto& gen = ds.generators[g];
    const int r = ds.region_index(gen.region);
    const double avail = derate(gen, mf_by_region[r], form);
    const double cap = cf_by_generator[g] * avail * gen.unit_capacity * gen_units[g];
    Variable v;
    v.name = "p_" + gen.id;
    v.kind = VarKind::dispatch;
    v.ub = cap;
    v.year = year;
    v.generator = g;
    v.region = r;
    pv[g] = lp.add_var(std::move(v));
    gen_rate[g] = gen.heat_rate * gen.fuel_price_by_year[year] + gen.variable_om;
    emis_rate[g] = gen.emission_price_by_year[year] * gen.emission_rate;
    lp.add_objective(pv[g], gen_rate[g] + emis_rate[g]);
  }
  for (int r = 0; r < nr; ++r) {
    Variable v;
    v.name = "use_" + ds.regions[r].id;
    v.kind = VarKind::unserved;
    v.region = r;
    usev[r] = lp.add_var(std::move(v));
    lp.add_objective(usev[r], ds.regions[r].voll);
  }
  for (int l = 0; l < nl; ++l) {
    const auto& ifc = ds.interfaces[l];
    Variable vp, vn;
    vp.name = "fp_" + ifc.id;
    vp.kind = VarKind::flow_pos;
    vp.interface = l;
    vn.name = "fn_" + ifc.id;
    vn.kind = VarKind::flow_neg;
    vn.interface = l;
    fp[l] = lp.add_var(std::move(vp));
    fn[l] = lp.add_var(std::move(vn));
    lp.add_objective(fp[l], ifc.wheeling_cost);
    lp.add_objective(fn[l], ifc.wheeling_cost);

    Row cap_row;
    cap_row.name = "fcap_" + ifc.id;
    cap_row.sense = Sense::le;
    cap_row.rhs = ifc.unit_capacity * tx_units[l];
    cap_row.terms = {{fp[l], 1.0}, {fn[l], 1.0}};
    lp.add_row(std::move(cap_row));
  }
  for (int r = 0; r < nr; ++r) {
    Row row;
    row.name = "bal_" + ds.regions[r].id;
    row.sense = Sense::eq;
    row.rhs = load_by_region[r];
    for (int g : ds.generators_in(r)) row.terms.push_back({pv[g], 1.0});
    row.terms.push_back({usev[r], 1.0});
    for (const auto& e : interface_incidence(ds, ds.regions[r].id)) {
      row.terms.push_back({fp[e.interface], static_cast<double>(e.sign)});
      row.terms.push_back({fn[e.interface], -static_cast<double>(e.sign)});
    }
    lp.add_row(std::move(row));
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw std::runtime_error("dispatch: period LP not optimal (" +
                             std::string(to_string(sol.status)) + ")");

  PeriodCost cost;
  for (int g = 0; g < ng; ++g) {
    cost.generation += gen_rate[g] * sol.values[pv[g]];
    cost.emission += emis_rate[g] * sol.values[pv[g]];
  }
  for (int r = 0; r < nr; ++r) cost.generation += ds.regions[r].voll * sol.values[usev[r]];
  for (int l = 0; l < nl; ++l)
    cost.generation += ds.interfaces[l].wheeling_cost * (sol.values[fp[l]] + sol.values[fn[l]]);
  return cost;
}

// Static stride partition with a post-hoc ordered reduction, so results
// do not depend on the thread count.
void run_periods(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int k = 0; k < threads; ++k)
    pool.emplace_back([&, k] {
      for (int i = k; i < n; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

Eigen::ArrayXd hourly_maintenance_factors(const Region& region, int year) {
  const auto loads = region.load_series.year(year);
  const double lo = loads.minCoeff(), hi = loads.maxCoeff();
  if (hi <= lo) return Eigen::ArrayXd::Zero(loads.size());
  return (hi - loads) / (hi - lo);
}

}  // namespace

OperatingCost lt_operate(const SystemDataset& ds, const ScenarioSet& scn,
                         const ExpansionPlan& plan, const SimulateOptions& opts) {
  const int ny = ds.horizon.n_years;
  const int t = ds.horizon.hours_per_year;
  const int nr = static_cast<int>(ds.regions.size());

  struct Period {
    int year, scenario;
    double weight;  // DF * member hours
  };
  std::vector<Period> periods;
  for (int y = 0; y < ny; ++y) {
    const double df = discount_factor(ds.horizon.discount_rate, y + 1, ny);
    for (size_t s = 0; s < scn.years[y].size(); ++s)
      periods.push_back({y, static_cast<int>(s), df * t * scn.years[y][s].probability});
  }

  std::vector<std::vector<int>> gen_units(ny), tx_units(ny);
  std::vector<Eigen::ArrayXXd> mf(ny);
  for (int y = 0; y < ny; ++y) {
    for (size_t g = 0; g < ds.generators.size(); ++g)
      gen_units[y].push_back(cumulative_gen_units(ds, plan, y, static_cast<int>(g)));
    for (size_t l = 0; l < ds.interfaces.size(); ++l)
      tx_units[y].push_back(cumulative_tx_units(ds, plan, y, static_cast<int>(l)));
    mf[y] = maintenance_factors(scn.years[y], nr);
  }

  std::vector<PeriodCost> results(periods.size());
  run_periods(static_cast<int>(periods.size()), opts.threads, [&](int i) {
    const Period& p = periods[i];
    const Scenario& sc = scn.years[p.year][p.scenario];
    results[i] = dispatch_period(ds, p.year, sc.load_by_region, sc.cf_by_generator,
                                 mf[p.year].col(p.scenario), gen_units[p.year],
                                 tx_units[p.year], opts.derate_form);
  });

  OperatingCost cost;
  cost.generation_by_year = Eigen::ArrayXd::Zero(ny);
  cost.emission_by_year = Eigen::ArrayXd::Zero(ny);
  for (size_t i = 0; i < periods.size(); ++i) {
    cost.generation_by_year[periods[i].year] += periods[i].weight * results[i].generation;
    cost.emission_by_year[periods[i].year] += periods[i].weight * results[i].emission;
  }
  return cost;
}

OperatingCost st_operate(const SystemDataset& ds, const ExpansionPlan& plan,
                         const SimulateOptions& opts) {
  const int ny = ds.horizon.n_years;
  const int t = ds.horizon.hours_per_year;
  const int nr = static_cast<int>(ds.regions.size());
  const int ng = static_cast<int>(ds.generators.size());

  std::vector<std::vector<int>> gen_units(ny), tx_units(ny);
  std::vector<Eigen::ArrayXXd> mf(ny);  // (region, hour)
  std::vector<double> df(ny);
  for (int y = 0; y < ny; ++y) {
    for (int g = 0; g < ng; ++g) gen_units[y].push_back(cumulative_gen_units(ds, plan, y, g));
    for (size_t l = 0; l < ds.interfaces.size(); ++l)
      tx_units[y].push_back(cumulative_tx_units(ds, plan, y, static_cast<int>(l)));
    mf[y].resize(nr, t);
    for (int r = 0; r < nr; ++r) mf[y].row(r) = hourly_maintenance_factors(ds.regions[r], y);
    df[y] = discount_factor(ds.horizon.discount_rate, y + 1, ny);
  }

  const int n_periods = ny * t;
  std::vector<PeriodCost> results(n_periods);
  run_periods(n_periods, opts.threads, [&](int i) {
    const int y = i / t, h = i % t;
    Eigen::ArrayXd loads(nr), cf = Eigen::ArrayXd::Ones(ng);
    for (int r = 0; r < nr; ++r) loads[r] = ds.regions[r].load_series.at(y, h);
    for (int g = 0; g < ng; ++g)
      if (ds.generators[g].has_cf()) cf[g] = ds.generators[g].cf_series.at(y, h);
    results[i] = dispatch_period(ds, y, loads, cf, mf[y].col(h), gen_units[y], tx_units[y],
                                 opts.derate_form);
  });

  OperatingCost cost;
  cost.generation_by_year = Eigen::ArrayXd::Zero(ny);
  cost.emission_by_year = Eigen::ArrayXd::Zero(ny);
  for (int i = 0; i < n_periods; ++i) {
    const int y = i / t;
    cost.generation_by_year[y] += df[y] * results[i].generation;
    cost.emission_by_year[y] += df[y] * results[i].emission;
  }
  return cost;
}

GapReport gap_report(const OperatingCost& lt, const OperatingCost& st) {
  GapReport rep;
  rep.lt_generation_cost = lt.generation_cost();
  rep.lt_emission_cost = lt.emission_cost();
  rep.st_generation_cost = st.generation_cost();
  rep.st_emission_cost = st.emission_cost();
  const double st_total = rep.st_generation_cost + rep.st_emission_cost;
  if (st_total == 0.0) throw std::domain_error("gap_report: short-term total cost is zero");
  rep.gap = (st_total - (rep.lt_generation_cost + rep.lt_emission_cost)) / st_total;

  const auto ny = lt.generation_by_year.size();
  rep.lt_gen_by_year = lt.generation_by_year;
  rep.lt_emis_by_year = lt.emission_by_year;
  rep.st_gen_by_year = st.generation_by_year;
  rep.st_emis_by_year = st.emission_by_year;
  rep.gap_by_year = Eigen::ArrayXd::Zero(ny);
  for (Eigen::Index y = 0; y < ny; ++y) {
    const double sty = st.generation_by_year[y] + st.emission_by_year[y];
    const double lty = lt.generation_by_year[y] + lt.emission_by_year[y];
    rep.gap_by_year[y] = sty == 0.0 ? 0.0 : (sty - lty) / sty;
  }
  return rep;
}

}  // namespace coex
