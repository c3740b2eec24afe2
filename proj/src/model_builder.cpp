#include "coex/model_builder.hpp"

#include <cmath>
#include <stdexcept>

namespace coex {

double discount_factor(double d, int y, int n_years) {
  if (y < 1 || y > n_years) throw std::invalid_argument("discount_factor: year out of range");
  if (d < 0.0) throw std::invalid_argument("discount_factor: negative rate");
  if (y < n_years) return std::pow(1.0 + d, -y);
  if (d == 0.0) throw std::domain_error("discount_factor: final-year perpetuity diverges at d = 0");
  return std::pow(1.0 + d, -n_years) * (1.0 + 1.0 / d);
}

double derate(const GeneratorType& g, double mf, DerateForm form) {
  const double for_sign = form == DerateForm::corrected ? -1.0 : +1.0;
  return std::max(0.0, 1.0 - g.maintenance_outage_rate * mf + for_sign * g.forced_outage_rate);
}

Eigen::ArrayXXd maintenance_factors(const std::vector<Scenario>& year_scenarios, int n_regions) {
  const int ns = static_cast<int>(year_scenarios.size());
  Eigen::ArrayXXd mf = Eigen::ArrayXXd::Zero(n_regions, ns);
  for (int r = 0; r < n_regions; ++r) {
    double lo = year_scenarios[0].load_by_region[r], hi = lo;
    for (const auto& sc : year_scenarios) {
      lo = std::min(lo, sc.load_by_region[r]);
      hi = std::max(hi, sc.load_by_region[r]);
    }
    if (hi <= lo) continue;  // flat load: no off-peak window, mf stays 0
    for (int s = 0; s < ns; ++s)
      mf(r, s) = (hi - year_scenarios[s].load_by_region[r]) / (hi - lo);
  }
  return mf;
}

const char* to_string(CostTerm t) {
  switch (t) {
    case CostTerm::gen_build: return "gen_build";
    case CostTerm::fixed_om: return "fixed_om";
    case CostTerm::fuel: return "fuel";
    case CostTerm::variable_om: return "variable_om";
    case CostTerm::lost_load: return "lost_load";
    case CostTerm::tx_build: return "tx_build";
    case CostTerm::wheeling: return "wheeling";
    case CostTerm::emission: return "emission";
  }
  return "?";
}

namespace {

std::string vname(const char* prefix, int y, const std::string& id) {
  return std::string(prefix) + "_y" + std::to_string(y) + "_" + id;
}
std::string vname(const char* prefix, int y, const std::string& id, int s) {
  return vname(prefix, y, id) + "_s" + std::to_string(s);
}

}  // namespace

BuiltModel build_model(const SystemDataset& ds, const ScenarioSet& scn,
                       const BuildOptions& opts) {
  const int ny = ds.horizon.n_years;
  const int t = ds.horizon.hours_per_year;
  const int nr = static_cast<int>(ds.regions.size());
  const int ng = static_cast<int>(ds.generators.size());
  const int nl = static_cast<int>(ds.interfaces.size());

  if (static_cast<int>(scn.years.size()) != ny)
    throw std::invalid_argument("build_model: scenario set covers " +
                                std::to_string(scn.years.size()) + " years, dataset has " +
                                std::to_string(ny));

  BuiltModel bm;
  LinearModel& m = bm.model;

  auto add_cost = [&](CostTerm term, int var, double coef) {
    m.add_objective(var, coef);
    bm.term_entries[static_cast<int>(term)].push_back({var, coef});
  };
  auto add_const = [&](CostTerm term, double value) {
    m.objective_constant += value;
    bm.term_constants[static_cast<int>(term)] += value;
  };

  // --- variable catalog: builds, then dispatch, unserved, flow splits ---
  std::vector<std::vector<int>> gb(ny, std::vector<int>(ng));  // [y][g]
  std::vector<std::vector<int>> xb(ny, std::vector<int>(nl));  // [y][l]
  for (int y = 0; y < ny; ++y)
    for (int g = 0; g < ng; ++g) {
      const auto& gen = ds.generators[g];
      gb[y][g] = m.add_var({vname("gb", y, gen.id), VarKind::gen_build, 0.0,
                            static_cast<double>(gen.max_annual_builds[y]), true,
                            y, ds.region_index(gen.region), g, -1, -1});
    }
  for (int y = 0; y < ny; ++y)
    for (int l = 0; l < nl; ++l)
      xb[y][l] = m.add_var({vname("xb", y, ds.interfaces[l].id), VarKind::tx_build, 0.0,
                            static_cast<double>(ds.interfaces[l].max_annual_builds[y]), true,
                            y, -1, -1, l, -1});

  auto n_scen = [&](int y) { return static_cast<int>(scn.years[y].size()); };

  std::vector<std::vector<std::vector<int>>> pv(ny), usev(ny), fpos(ny), fneg(ny);
  for (int y = 0; y < ny; ++y) {
    const int ns = n_scen(y);
    pv[y].assign(ng, std::vector<int>(ns));
    for (int g = 0; g < ng; ++g)
      for (int s = 0; s < ns; ++s)
        pv[y][g][s] = m.add_var({vname("p", y, ds.generators[g].id, s), VarKind::dispatch,
                                 0.0, kInf, false, y,
                                 ds.region_index(ds.generators[g].region), g, -1, s});
  }
  for (int y = 0; y < ny; ++y) {
    const int ns = n_scen(y);
    usev[y].assign(nr, std::vector<int>(ns));
    for (int r = 0; r < nr; ++r)
      for (int s = 0; s < ns; ++s)
        usev[y][r][s] = m.add_var({vname("use", y, ds.regions[r].id, s), VarKind::unserved,
                                   0.0, kInf, false, y, r, -1, -1, s});
  }
  for (int y = 0; y < ny; ++y) {
    const int ns = n_scen(y);
    fpos[y].assign(nl, std::vector<int>(ns));
    fneg[y].assign(nl, std::vector<int>(ns));
    for (int l = 0; l < nl; ++l)
      for (int s = 0; s < ns; ++s) {
        fpos[y][l][s] = m.add_var({vname("fp", y, ds.interfaces[l].id, s), VarKind::flow_pos,
                                   0.0, kInf, false, y, -1, -1, l, s});
        fneg[y][l][s] = m.add_var({vname("fn", y, ds.interfaces[l].id, s), VarKind::flow_neg,
                                   0.0, kInf, false, y, -1, -1, l, s});
      }
  }

  // --- per-year discounting, scenario weights, availability derates ---
  std::vector<double> df(ny);
  for (int y = 0; y < ny; ++y)
    df[y] = discount_factor(ds.horizon.discount_rate, y + 1, ny);

  // delta[y](g, s): per-unit available fraction of generator g in scenario s
  std::vector<Eigen::ArrayXXd> delta(ny);
  for (int y = 0; y < ny; ++y) {
    const int ns = n_scen(y);
    const Eigen::ArrayXXd mf = maintenance_factors(scn.years[y], nr);
    delta[y].resize(ng, ns);
    for (int g = 0; g < ng; ++g) {
      const int r = ds.region_index(ds.generators[g].region);
      for (int s = 0; s < ns; ++s)
        delta[y](g, s) = derate(ds.generators[g], mf(r, s), opts.derate_form);
    }
  }

  // --- objective ---
  for (int y = 0; y < ny; ++y) {
    const int ns = n_scen(y);
    for (int g = 0; g < ng; ++g) {
      const auto& gen = ds.generators[g];
      if (!std::isfinite(gen.build_cost_by_year[y]))
        throw std::invalid_argument("build_model: non-finite build cost on " + gen.id);
      add_cost(CostTerm::gen_build, gb[y][g], df[y] * gen.build_cost_by_year[y]);

      // fixed O&M accrues on cumulative units: every build in y' <= y pays in y
      add_const(CostTerm::fixed_om, df[y] * gen.fixed_om * gen.unit_capacity * gen.existing_units);
      for (int yp = 0; yp <= y; ++yp)
        add_cost(CostTerm::fixed_om, gb[yp][g], df[y] * gen.fixed_om * gen.unit_capacity);

      const double fuel_rate = gen.heat_rate * gen.fuel_price_by_year[y];
      const double emis_rate = gen.emission_price_by_year[y] * gen.emission_rate;
      for (int s = 0; s < ns; ++s) {
        const double w = df[y] * t * scn.years[y][s].probability;
        if (fuel_rate != 0.0) add_cost(CostTerm::fuel, pv[y][g][s], w * fuel_rate);
        if (gen.variable_om != 0.0) add_cost(CostTerm::variable_om, pv[y][g][s], w * gen.variable_om);
        if (emis_rate != 0.0) add_cost(CostTerm::emission, pv[y][g][s], w * emis_rate);
      }
    }
    for (int r = 0; r < nr; ++r)
      for (int s = 0; s < ns; ++s)
        add_cost(CostTerm::lost_load, usev[y][r][s],
                 df[y] * t * scn.years[y][s].probability * ds.regions[r].voll);
    for (int l = 0; l < nl; ++l) {
      const auto& ifc = ds.interfaces[l];
      add_cost(CostTerm::tx_build, xb[y][l], df[y] * ifc.build_cost_by_year[y]);
      if (ifc.wheeling_cost != 0.0)
        for (int s = 0; s < ns; ++s) {
          const double w = df[y] * t * scn.years[y][s].probability * ifc.wheeling_cost;
          add_cost(CostTerm::wheeling, fpos[y][l][s], w);
          add_cost(CostTerm::wheeling, fneg[y][l][s], w);
        }
    }
  }

  // --- constraints ---
  // incidence per region: +1 on interfaces delivering into the region
  std::vector<std::vector<IncidenceEntry>> inc(nr);
  for (int r = 0; r < nr; ++r) inc[r] = interface_incidence(ds, ds.regions[r].id);

  // power balance: generation + unserved + net imports = load
  for (int y = 0; y < ny; ++y)
    for (int r = 0; r < nr; ++r)
      for (int s = 0; s < n_scen(y); ++s) {
        Row row;
        row.name = vname("bal", y, ds.regions[r].id, s);
        row.sense = Sense::eq;
        row.rhs = scn.years[y][s].load_by_region[r];
        for (int g : ds.generators_in(r)) row.terms.push_back({pv[y][g][s], 1.0});
        row.terms.push_back({usev[y][r][s], 1.0});
        for (const auto& e : inc[r]) {
          row.terms.push_back({fpos[y][e.interface][s], static_cast<double>(e.sign)});
          row.terms.push_back({fneg[y][e.interface][s], -static_cast<double>(e.sign)});
        }
        m.add_row(std::move(row));
      }

  // cumulative build ceilings over the whole horizon
  for (int g = 0; g < ng; ++g) {
    Row row;
    row.name = "gtot_" + ds.generators[g].id;
    row.sense = Sense::le;
    row.rhs = ds.generators[g].max_total_builds;
    for (int y = 0; y < ny; ++y) row.terms.push_back({gb[y][g], 1.0});
    m.add_row(std::move(row));
  }
  for (int l = 0; l < nl; ++l) {
    Row row;
    row.name = "xtot_" + ds.interfaces[l].id;
    row.sense = Sense::le;
    row.rhs = ds.interfaces[l].max_total_builds;
    for (int y = 0; y < ny; ++y) row.terms.push_back({xb[y][l], 1.0});
    m.add_row(std::move(row));
  }

  // dispatch cannot exceed available (derated) fleet capacity
  for (int y = 0; y < ny; ++y)
    for (int g = 0; g < ng; ++g) {
      const auto& gen = ds.generators[g];
      for (int s = 0; s < n_scen(y); ++s) {
        const double cap = delta[y](g, s) * gen.unit_capacity;
        Row row;
        row.name = vname("pcap", y, gen.id, s);
        row.sense = Sense::le;
        row.rhs = cap * gen.existing_units;
        row.terms.push_back({pv[y][g][s], 1.0});
        for (int yp = 0; yp <= y; ++yp) row.terms.push_back({gb[yp][g], -cap});
        m.add_row(std::move(row));
      }
    }

  // regional reserve: derated fleet + credited net imports cover load + margin
  const double p_credit = ds.reserve_import_credit;
  for (int y = 0; y < ny; ++y)
    for (int r = 0; r < nr; ++r)
      for (int s = 0; s < n_scen(y); ++s) {
        Row row;
        row.name = vname("rsv", y, ds.regions[r].id, s);
        row.sense = Sense::ge;
        double rhs = scn.years[y][s].load_by_region[r] + ds.regions[r].reserve_margin_by_year[y];
        double max_lhs = 0.0;
        for (int g : ds.generators_in(r)) {
          const auto& gen = ds.generators[g];
          const double cap = delta[y](g, s) * gen.unit_capacity;
          rhs -= cap * gen.existing_units;
          int cum_max = 0;
          for (int yp = 0; yp <= y; ++yp) {
            row.terms.push_back({gb[yp][g], cap});
            cum_max += gen.max_annual_builds[yp];
          }
          max_lhs += cap * std::min(cum_max, gen.max_total_builds);
        }
        for (const auto& e : inc[r]) {
          row.terms.push_back({fpos[y][e.interface][s], p_credit * e.sign});
          row.terms.push_back({fneg[y][e.interface][s], -p_credit * e.sign});
          const auto& ifc = ds.interfaces[e.interface];
          int cum_max = 0;
          for (int yp = 0; yp <= y; ++yp) cum_max += ifc.max_annual_builds[yp];
          max_lhs += p_credit * ifc.unit_capacity *
                     (ifc.existing_units + std::min(cum_max, ifc.max_total_builds));
        }
        if (max_lhs < rhs - 1e-9)
          bm.warnings.push_back(row.name + ": reserve unreachable even at maximum builds (short " +
                                std::to_string(rhs - max_lhs) + " MW)");
        row.rhs = rhs;
        m.add_row(std::move(row));
      }

  // interface throughput limited by built capacity (both directions share it)
  for (int y = 0; y < ny; ++y)
    for (int l = 0; l < nl; ++l) {
      const auto& ifc = ds.interfaces[l];
      for (int s = 0; s < n_scen(y); ++s) {
        Row row;
        row.name = vname("fcap", y, ifc.id, s);
        row.sense = Sense::le;
        row.rhs = ifc.unit_capacity * ifc.existing_units;
        row.terms.push_back({fpos[y][l][s], 1.0});
        row.terms.push_back({fneg[y][l][s], 1.0});
        for (int yp = 0; yp <= y; ++yp) row.terms.push_back({xb[yp][l], -ifc.unit_capacity});
        m.add_row(std::move(row));
      }
    }

  // renewable share of installed capacity, only where a target is set
  for (int y = 0; y < ny; ++y)
    for (int r = 0; r < nr; ++r) {
      const double rps = ds.regions[r].rps_by_year[y];
      if (rps <= 0.0) continue;
      Row row;
      row.name = vname("rps", y, ds.regions[r].id);
      row.sense = Sense::ge;
      double rhs = 0.0;
      for (int g : ds.generators_in(r)) {
        const auto& gen = ds.generators[g];
        const double share = (gen.is_renewable ? 1.0 : 0.0) - rps;
        rhs -= share * gen.unit_capacity * gen.existing_units;
        for (int yp = 0; yp <= y; ++yp)
          row.terms.push_back({gb[yp][g], share * gen.unit_capacity});
      }
      row.rhs = rhs;
      m.add_row(std::move(row));
    }

  // profiled resources (wind/solar) further limited by the scenario cf
  for (int y = 0; y < ny; ++y)
    for (int g : ds.cf_generators()) {
      const auto& gen = ds.generators[g];
      for (int s = 0; s < n_scen(y); ++s) {
        const double cap = scn.years[y][s].cf_by_generator[g] * delta[y](g, s) * gen.unit_capacity;
        Row row;
        row.name = vname("wcap", y, gen.id, s);
        row.sense = Sense::le;
        row.rhs = cap * gen.existing_units;
        row.terms.push_back({pv[y][g][s], 1.0});
        for (int yp = 0; yp <= y; ++yp) row.terms.push_back({gb[yp][g], -cap});
        m.add_row(std::move(row));
      }
    }

  return bm;
}

std::array<double, kNumCostTerms> cost_breakdown(const BuiltModel& bm,
                                                 const std::vector<double>& x) {
  std::array<double, kNumCostTerms> out{};
  for (int t = 0; t < kNumCostTerms; ++t) {
    out[t] = bm.term_constants[t];
    for (const auto& e : bm.term_entries[t]) out[t] += e.coef * x[e.var];
  }
  return out;
}

}  // namespace coex
