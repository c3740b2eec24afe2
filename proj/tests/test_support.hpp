#pragma once

// Shared fixtures for the test suites: hand-sized datasets whose optimal
// plans and costs can be verified by enumeration or by hand.

#include <vector>

#include "coex/dataset.hpp"

namespace coex::test {

inline ChronoSeries series_of(int years, int hours, std::vector<double> v) {
  ChronoSeries s = ChronoSeries::zeros(years, hours);
  for (int i = 0; i < static_cast<int>(v.size()); ++i) s.values(i) = v[i];
  return s;
}

// Two regions (A load center, B windy exporter), one interface B->A,
// two years, six hours per year. Load and wind move against each other
// within A's day; numbers are small enough for hand dispatch.
inline SystemDataset two_region_toy() {
  SystemDataset ds;
  ds.horizon.n_years = 2;
  ds.horizon.hours_per_year = 6;
  ds.horizon.discount_rate = 0.05;
  ds.horizon.base_year = 2030;

  Region a;
  a.id = "A";
  a.voll = 5000.0;
  a.reserve_margin_by_year = {30.0, 30.0};
  a.rps_by_year = {0.0, 0.0};
  a.load_series =
      series_of(2, 6, {100, 120, 140, 160, 130, 110,  // year 0
                       110, 130, 150, 170, 140, 120});
  Region b;
  b.id = "B";
  b.voll = 5000.0;
  b.reserve_margin_by_year = {5.0, 5.0};
  b.rps_by_year = {0.0, 0.0};
  b.load_series = series_of(2, 6, {20, 22, 24, 26, 23, 21,  //
                                   21, 23, 25, 27, 24, 22});
  ds.regions = {a, b};

  GeneratorType gas;
  gas.id = "gasA";
  gas.region = "A";
  gas.kind = GeneratorKind::thermal;
  gas.is_renewable = false;
  gas.unit_capacity = 80.0;
  gas.existing_units = 2;
  gas.build_cost_by_year = {1.0e4, 1.0e4};
  gas.fixed_om = 10.0;
  gas.variable_om = 2.0;
  gas.heat_rate = 1.0;
  gas.fuel_price_by_year = {30.0, 30.0};
  gas.emission_rate = 0.4;
  gas.emission_price_by_year = {10.0, 10.0};
  gas.forced_outage_rate = 0.0;
  gas.maintenance_outage_rate = 0.0;
  gas.max_total_builds = 4;
  gas.max_annual_builds = {2, 2};

  GeneratorType wind;
  wind.id = "windB";
  wind.region = "B";
  wind.kind = GeneratorKind::wind;
  wind.is_renewable = true;
  wind.unit_capacity = 50.0;
  wind.existing_units = 1;
  wind.build_cost_by_year = {8.0e3, 8.0e3};
  wind.fixed_om = 5.0;
  wind.variable_om = 0.0;
  wind.heat_rate = 0.0;
  wind.fuel_price_by_year = {0.0, 0.0};
  wind.emission_rate = 0.0;
  wind.emission_price_by_year = {0.0, 0.0};
  wind.forced_outage_rate = 0.0;
  wind.maintenance_outage_rate = 0.0;
  wind.max_total_builds = 4;
  wind.max_annual_builds = {2, 2};
  wind.cf_series = series_of(2, 6, {0.9, 0.7, 0.5, 0.3, 0.6, 0.8,  //
                                    0.8, 0.6, 0.4, 0.2, 0.5, 0.7});

  ds.generators = {gas, wind};

  TransmissionInterface ba;
  ba.id = "BA";
  ba.from_region = "B";
  ba.to_region = "A";
  ba.unit_capacity = 40.0;
  ba.existing_units = 1;
  ba.build_cost_by_year = {2.0e3, 2.0e3};
  ba.wheeling_cost = 1.0;
  ba.max_total_builds = 3;
  ba.max_annual_builds = {1, 1};
  ds.interfaces = {ba};

  ds.reserve_import_credit = 1.0;
  ds.target_wind_caps = {{"B", 100.0}};
  return ds;
}

// One region, one thermal generator, one year; the smallest system that
// still exercises balance, capacity and reserve rows.
inline SystemDataset one_bus_toy() {
  SystemDataset ds;
  ds.horizon.n_years = 1;
  ds.horizon.hours_per_year = 4;
  // sole year carries the end-of-horizon continuation factor:
  // (1.1)^-1 * (1 + 1/0.1) = 10 exactly, handy for hand arithmetic
  ds.horizon.discount_rate = 0.1;
  ds.horizon.base_year = 2030;

  Region r;
  r.id = "R";
  r.voll = 1000.0;
  r.reserve_margin_by_year = {0.0};
  r.rps_by_year = {0.0};
  r.load_series = series_of(1, 4, {50, 60, 70, 80});
  ds.regions = {r};

  GeneratorType g;
  g.id = "unit";
  g.region = "R";
  g.kind = GeneratorKind::thermal;
  g.is_renewable = false;
  g.unit_capacity = 100.0;
  g.existing_units = 1;
  g.build_cost_by_year = {500.0};
  g.fixed_om = 0.0;
  g.variable_om = 0.0;
  g.heat_rate = 1.0;
  g.fuel_price_by_year = {10.0};
  g.emission_rate = 0.0;
  g.emission_price_by_year = {0.0};
  g.forced_outage_rate = 0.0;
  g.maintenance_outage_rate = 0.0;
  g.max_total_builds = 2;
  g.max_annual_builds = {1};
  ds.generators = {g};
  return ds;
}

}  // namespace coex::test
