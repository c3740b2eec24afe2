#pragma once

#include <map>
#include <string>
#include <vector>

#include "coex/series.hpp"

namespace coex {

struct PlanningHorizon {
  int n_years = 0;
  int hours_per_year = 0;
  double discount_rate = 0.0;
  int base_year = 0;
};

enum class GeneratorKind { thermal, wind, solar, hydro, other };

const char* to_string(GeneratorKind k);
GeneratorKind generator_kind_from_string(const std::string& s);

struct Region {
  std::string id;
  double voll = 0.0;                            // currency/MWh
  std::vector<double> reserve_margin_by_year;   // MW
  std::vector<double> rps_by_year;              // fraction of installed capacity
  ChronoSeries load_series;                     // MW
};

struct GeneratorType {
  std::string id;
  std::string region;
  GeneratorKind kind = GeneratorKind::thermal;
  bool is_renewable = false;
  double unit_capacity = 0.0;                   // MW per unit
  int existing_units = 0;
  std::vector<double> build_cost_by_year;       // currency per unit
  double fixed_om = 0.0;                        // currency/MW/yr
  double variable_om = 0.0;                     // currency/MWh
  std::vector<double> fuel_price_by_year;       // currency/GBTU
  double heat_rate = 0.0;                       // GBTU/MWh
  double emission_rate = 0.0;                   // ton/MWh
  std::vector<double> emission_price_by_year;   // currency/ton
  double forced_outage_rate = 0.0;
  double maintenance_outage_rate = 0.0;
  int max_total_builds = 0;
  std::vector<int> max_annual_builds;
  ChronoSeries cf_series;                       // in [0,1]; wind/solar only

  bool has_cf() const { return !cf_series.empty(); }
};

struct TransmissionInterface {
  std::string id;
  std::string from_region;
  std::string to_region;
  double unit_capacity = 0.0;                   // MW per line
  int existing_units = 0;
  std::vector<double> build_cost_by_year;       // currency per line
  double wheeling_cost = 0.0;                   // currency/MWh
  int max_total_builds = 0;
  std::vector<int> max_annual_builds;
};

struct SystemDataset {
  PlanningHorizon horizon;
  std::vector<Region> regions;
  std::vector<GeneratorType> generators;
  std::vector<TransmissionInterface> interfaces;
  double reserve_import_credit = 1.0;           // the reserve-row interchange coefficient
  std::map<std::string, double> target_wind_caps;  // MW per region

  int region_index(const std::string& id) const;      // -1 if unknown
  int generator_index(const std::string& id) const;
  int interface_index(const std::string& id) const;

  /// Indices of generators located in region r, in dataset order.
  std::vector<int> generators_in(int region) const;

  /// Dataset-order indices of generators carrying a cf series.
  std::vector<int> cf_generators() const;
};

struct Violation {
  std::string entity;
  std::string detail;
};

/// Empty iff every type invariant holds. Violations are data, not failures.
std::vector<Violation> validate_dataset(const SystemDataset& ds);

struct IncidenceEntry {
  int interface = -1;  // index into ds.interfaces
  int sign = 0;        // +1 if the region imports positive flow (it is to_region)
};

/// All interfaces touching region r with their balance-row orientation.
/// Positive flow means from_region -> to_region.
std::vector<IncidenceEntry> interface_incidence(const SystemDataset& ds, const std::string& region_id);

/// reserve_margin_by_year from a fraction-of-annual-peak specification.
std::vector<double> reserve_margin_from_fraction(const Region& r, const std::vector<double>& frac_by_year);

}  // namespace coex
