#include "coex/desk_ei.hpp"

#include <array>
#include <random>

namespace coex {
namespace {

// Uniform in [0,1) from the top 53 bits; avoids distribution objects so
// the stream is identical on every platform.
double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double noise(std::mt19937_64& rng, double scale) {
  return (uniform(rng) - 0.5) * 2.0 * scale;
}

constexpr int kHoursPerDay = 24;
constexpr int kDays = 7;
constexpr int kHours = kHoursPerDay * kDays;
constexpr int kYears = 5;

// Hand-picked diurnal shapes; evening load peak at hour 18, wind at W
// blows at night, wind at E follows the daytime load.
constexpr std::array<double, kHoursPerDay> kLoadShape = {
    0.74, 0.71, 0.69, 0.68, 0.69, 0.72, 0.78, 0.86, 0.93, 0.97, 1.00, 1.02,
    1.03, 1.02, 1.01, 1.02, 1.06, 1.15, 1.22, 1.18, 1.08, 0.98, 0.88, 0.80};

constexpr std::array<double, kHoursPerDay> kWindNight = {
    0.54, 0.56, 0.57, 0.57, 0.56, 0.54, 0.48, 0.40, 0.32, 0.24, 0.17, 0.13,
    0.11, 0.10, 0.11, 0.13, 0.17, 0.22, 0.28, 0.35, 0.42, 0.47, 0.51, 0.53};

constexpr std::array<double, kHoursPerDay> kWindDay = {
    0.16, 0.15, 0.14, 0.14, 0.15, 0.17, 0.22, 0.28, 0.35, 0.42, 0.47, 0.50,
    0.52, 0.52, 0.51, 0.48, 0.44, 0.38, 0.32, 0.27, 0.23, 0.20, 0.18, 0.17};

constexpr std::array<double, kHoursPerDay> kSunShape = {
    0.00, 0.00, 0.00, 0.00, 0.00, 0.02, 0.10, 0.25, 0.42, 0.55, 0.63, 0.66,
    0.65, 0.60, 0.50, 0.37, 0.22, 0.09, 0.02, 0.00, 0.00, 0.00, 0.00, 0.00};

ChronoSeries make_load(std::mt19937_64& rng, double base, double growth) {
  ChronoSeries s = ChronoSeries::zeros(kYears, kHours);
  double level = base;
  for (int y = 0; y < kYears; ++y) {
    for (int h = 0; h < kHours; ++h) {
      const int day = h / kHoursPerDay;
      const int hod = h % kHoursPerDay;
      const double weekend = (day >= 5) ? 0.88 : 1.0;
      const double v =
          level * kLoadShape[hod] * weekend * (1.0 + noise(rng, 0.03));
      s.values(y * kHours + h) = v;
    }
    level *= growth;
  }
  return s;
}

ChronoSeries make_cf(std::mt19937_64& rng,
                     const std::array<double, kHoursPerDay>& shape,
                     double jitter) {
  ChronoSeries s = ChronoSeries::zeros(kYears, kHours);
  for (int y = 0; y < kYears; ++y) {
    for (int h = 0; h < kHours; ++h) {
      const int hod = h % kHoursPerDay;
      double v = shape[hod] + noise(rng, jitter);
      v = std::min(0.98, std::max(0.01, v));
      s.values(y * kHours + h) = v;
    }
  }
  return s;
}

// Gusty regime: each hour is either calm or gusting at +-45% of the
// diurnal base, a coin flip per hour. The two modes keep the hourly mean
// at the base value while giving wind sub-scenarios two well-separated
// levels to resolve.
ChronoSeries make_gusty_cf(std::mt19937_64& rng,
                           const std::array<double, kHoursPerDay>& shape) {
  ChronoSeries s = ChronoSeries::zeros(kYears, kHours);
  for (int y = 0; y < kYears; ++y) {
    for (int h = 0; h < kHours; ++h) {
      const int hod = h % kHoursPerDay;
      const double mode = uniform(rng) < 0.5 ? 0.55 : 1.45;
      double v = shape[hod] * mode * (1.0 + noise(rng, 0.05));
      v = std::min(0.98, std::max(0.01, v));
      s.values(y * kHours + h) = v;
    }
  }
  return s;
}

ChronoSeries make_sun(std::mt19937_64& rng) {
  ChronoSeries s = ChronoSeries::zeros(kYears, kHours);
  for (int y = 0; y < kYears; ++y) {
    for (int h = 0; h < kHours; ++h) {
      const int hod = h % kHoursPerDay;
      const double base = kSunShape[hod];
      double v = base * (1.0 + noise(rng, 0.10));
      v = std::min(1.0, std::max(0.0, v));
      s.values(y * kHours + h) = v;
    }
  }
  return s;
}

GeneratorType thermal(std::string id, std::string region, double unit_mw,
                      int existing, double build_cost, double fom, double vom,
                      double fuel, double emis_rate, double emis_price,
                      double forced, double maint, int max_total,
                      int max_annual) {
  GeneratorType g;
  g.id = std::move(id);
  g.region = std::move(region);
  g.kind = GeneratorKind::thermal;
  g.is_renewable = false;
  g.unit_capacity = unit_mw;
  g.existing_units = existing;
  g.build_cost_by_year.assign(kYears, build_cost);
  g.fixed_om = fom;
  g.variable_om = vom;
  g.heat_rate = 1.0;
  g.fuel_price_by_year.assign(kYears, fuel);
  g.emission_rate = emis_rate;
  g.emission_price_by_year.assign(kYears, emis_price);
  g.forced_outage_rate = forced;
  g.maintenance_outage_rate = maint;
  g.max_total_builds = max_total;
  g.max_annual_builds.assign(kYears, max_annual);
  return g;
}

GeneratorType profiled(std::string id, std::string region, GeneratorKind kind,
                       double unit_mw, int existing, double build_cost,
                       double fom, double vom, double forced, double maint,
                       int max_total, int max_annual, ChronoSeries cf) {
  GeneratorType g;
  g.id = std::move(id);
  g.region = std::move(region);
  g.kind = kind;
  g.is_renewable = true;
  g.unit_capacity = unit_mw;
  g.existing_units = existing;
  g.build_cost_by_year.assign(kYears, build_cost);
  g.fixed_om = fom;
  g.variable_om = vom;
  g.heat_rate = 0.0;
  g.fuel_price_by_year.assign(kYears, 0.0);
  g.emission_rate = 0.0;
  g.emission_price_by_year.assign(kYears, 0.0);
  g.forced_outage_rate = forced;
  g.maintenance_outage_rate = maint;
  g.max_total_builds = max_total;
  g.max_annual_builds.assign(kYears, max_annual);
  g.cf_series = std::move(cf);
  return g;
}

}  // namespace

SystemDataset make_desk_ei(unsigned seed) {
  std::mt19937_64 rng(seed);
  SystemDataset ds;
  ds.horizon.n_years = kYears;
  ds.horizon.hours_per_year = kHours;
  ds.horizon.discount_rate = 0.07;
  ds.horizon.base_year = 2030;

  const double growth = 1.05;

  Region n;
  n.id = "N";
  n.voll = 9000.0;
  n.rps_by_year.assign(kYears, 0.0);
  n.load_series = make_load(rng, 4200.0, growth);
  Region w;
  w.id = "W";
  w.voll = 9000.0;
  w.rps_by_year.assign(kYears, 0.0);
  w.load_series = make_load(rng, 400.0, growth);
  Region e;
  e.id = "E";
  e.voll = 9000.0;
  e.rps_by_year.assign(kYears, 0.0);
  e.load_series = make_load(rng, 1900.0, growth);

  const ChronoSeries cf_w = make_gusty_cf(rng, kWindNight);
  const ChronoSeries cf_e = make_cf(rng, kWindDay, 0.15);
  const ChronoSeries cf_sun = make_sun(rng);

  // Reserve requirement: a fixed fraction of each region's annual peak.
  const std::vector<double> frac(kYears, 0.12);
  n.reserve_margin_by_year = reserve_margin_from_fraction(n, frac);
  w.reserve_margin_by_year = reserve_margin_from_fraction(w, frac);
  e.reserve_margin_by_year = reserve_margin_from_fraction(e, frac);

  ds.regions = {n, w, e};

  ds.generators.push_back(thermal("N_coal", "N", 600.0, 7, 1.0e9, 700.0, 2.0,
                                  21.0, 0.95, 12.0, 0.06, 0.08, 0, 0));
  ds.generators.push_back(thermal("N_gas", "N", 400.0, 3, 6.0e6, 500.0, 2.5,
                                  33.0, 0.37, 12.0, 0.04, 0.06, 10, 3));
  ds.generators.push_back(thermal("N_pk", "N", 150.0, 4, 1.2e6, 250.0, 4.0,
                                  85.0, 0.55, 12.0, 0.05, 0.04, 6, 2));
  ds.generators.push_back(profiled("N_sol", "N", GeneratorKind::solar, 200.0,
                                   2, 1.0e9, 300.0, 0.0, 0.02, 0.02, 0, 0,
                                   cf_sun));
  ds.generators.push_back(thermal("W_base", "W", 500.0, 2, 1.0e9, 500.0, 3.0,
                                  46.0, 0.60, 12.0, 0.05, 0.06, 0, 0));
  ds.generators.push_back(profiled("W_wind", "W", GeneratorKind::wind, 600.0,
                                   0, 1.35e7, 600.0, 0.5, 0.03, 0.03, 4, 2,
                                   cf_w));
  ds.generators.push_back(thermal("E_base", "E", 500.0, 6, 1.0e9, 500.0, 3.0,
                                  38.0, 0.70, 12.0, 0.05, 0.06, 0, 0));
  ds.generators.push_back(profiled("E_wind", "E", GeneratorKind::wind, 600.0,
                                   0, 1.45e7, 600.0, 0.5, 0.03, 0.03, 3, 2,
                                   cf_e));

  TransmissionInterface wn;
  wn.id = "WN";
  wn.from_region = "W";
  wn.to_region = "N";
  wn.unit_capacity = 325.0;
  wn.existing_units = 2;
  wn.build_cost_by_year.assign(kYears, 5.0e6);
  wn.wheeling_cost = 2.5;
  // Not expandable: the western corridor is the binding wall that caps
  // night-time wind exports for the whole horizon.
  wn.max_total_builds = 0;
  wn.max_annual_builds.assign(kYears, 0);
  TransmissionInterface en = wn;
  en.id = "EN";
  en.from_region = "E";
  en.to_region = "N";
  en.unit_capacity = 400.0;
  en.existing_units = 1;
  en.max_total_builds = 6;
  en.max_annual_builds.assign(kYears, 2);
  ds.interfaces = {wn, en};

  ds.reserve_import_credit = 1.0;
  ds.target_wind_caps = {{"W", 2400.0}, {"E", 1800.0}};
  return ds;
}

}  // namespace coex
