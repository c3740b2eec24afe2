#include "coex/dataset.hpp"

#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>

namespace coex {

const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::thermal: return "thermal";
    case GeneratorKind::wind: return "wind";
    case GeneratorKind::solar: return "solar";
    case GeneratorKind::hydro: return "hydro";
    case GeneratorKind::other: return "other";
  }
  return "other";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "thermal") return GeneratorKind::thermal;
  if (s == "wind") return GeneratorKind::wind;
  if (s == "solar") return GeneratorKind::solar;
  if (s == "hydro") return GeneratorKind::hydro;
  if (s == "other") return GeneratorKind::other;
  throw std::invalid_argument("unknown generator kind: " + s);
}

int SystemDataset::region_index(const std::string& id) const {
  for (size_t i = 0; i < regions.size(); ++i)
    if (regions[i].id == id) return static_cast<int>(i);
  return -1;
}

int SystemDataset::generator_index(const std::string& id) const {
  for (size_t i = 0; i < generators.size(); ++i)
    if (generators[i].id == id) return static_cast<int>(i);
  return -1;
}

int SystemDataset::interface_index(const std::string& id) const {
  for (size_t i = 0; i < interfaces.size(); ++i)
    if (interfaces[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<int> SystemDataset::generators_in(int region) const {
  std::vector<int> out;
  for (size_t g = 0; g < generators.size(); ++g)
    if (region_index(generators[g].region) == region) out.push_back(static_cast<int>(g));
  return out;
}

std::vector<int> SystemDataset::cf_generators() const {
  std::vector<int> out;
  for (size_t g = 0; g < generators.size(); ++g)
    if (generators[g].has_cf()) out.push_back(static_cast<int>(g));
  return out;
}

namespace {

bool token_safe(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id)
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';') return false;
  return true;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_year_list(std::vector<Violation>& out, const std::string& entity,
                     const char* field, size_t len, int n_years) {
  if (len != static_cast<size_t>(n_years))
    out.push_back({entity, std::string(field) + " list length " + std::to_string(len) +
                               " != n_years " + std::to_string(n_years)});
}

}  // namespace

std::vector<Violation> validate_dataset(const SystemDataset& ds) {
  std::vector<Violation> v;
  const auto& h = ds.horizon;
  const int ny = h.n_years;
  const int t = h.hours_per_year;

  if (ny < 1) v.push_back({"horizon", "n_years < 1"});
  if (t < 1) v.push_back({"horizon", "hours_per_year < 1"});
  if (!(h.discount_rate >= 0.0)) v.push_back({"horizon", "discount_rate < 0"});

  std::set<std::string> ids;
  auto check_unique = [&](const std::string& id, const char* what) {
    if (!token_safe(id)) {
      v.push_back({id.empty() ? std::string(what) : id, "identifier empty or contains whitespace/',';';'"});
      return;
    }
    if (!ids.insert(id).second) v.push_back({id, std::string("duplicate identifier (") + what + ")"});
  };

  for (const auto& r : ds.regions) {
    check_unique(r.id, "region");
    if (!(r.voll >= 0.0) || !std::isfinite(r.voll)) v.push_back({r.id, "voll negative or non-finite"});
    check_year_list(v, r.id, "reserve_margin", r.reserve_margin_by_year.size(), ny);
    check_year_list(v, r.id, "rps", r.rps_by_year.size(), ny);
    for (double m : r.reserve_margin_by_year)
      if (!(m >= 0.0) || !std::isfinite(m)) { v.push_back({r.id, "reserve margin negative or non-finite"}); break; }
    for (double p : r.rps_by_year)
      if (!(p >= 0.0 && p <= 1.0)) { v.push_back({r.id, "rps out of [0,1]"}); break; }
    if (r.load_series.years != ny || r.load_series.hours != t || !r.load_series.shape_ok())
      v.push_back({r.id, "load series length != n_years x hours_per_year"});
    else if ((r.load_series.values < 0.0).any() || !r.load_series.values.isFinite().all())
      v.push_back({r.id, "load series has negative or non-finite values"});
  }

  for (const auto& g : ds.generators) {
    check_unique(g.id, "generator");
    if (ds.region_index(g.region) < 0) v.push_back({g.id, "region '" + g.region + "' does not exist"});
    if (!(g.unit_capacity > 0.0)) v.push_back({g.id, "unit_capacity <= 0"});
    if (!(g.forced_outage_rate >= 0.0 && g.forced_outage_rate < 1.0))
      v.push_back({g.id, "forced_outage_rate out of [0,1)"});
    if (!(g.maintenance_outage_rate >= 0.0 && g.maintenance_outage_rate < 1.0))
      v.push_back({g.id, "maintenance_outage_rate out of [0,1)"});
    if (g.existing_units < 0) v.push_back({g.id, "existing_units < 0"});
    if (g.max_total_builds < 0) v.push_back({g.id, "max_total_builds < 0"});
    check_year_list(v, g.id, "build_cost", g.build_cost_by_year.size(), ny);
    check_year_list(v, g.id, "fuel_price", g.fuel_price_by_year.size(), ny);
    check_year_list(v, g.id, "emission_price", g.emission_price_by_year.size(), ny);
    check_year_list(v, g.id, "max_annual_builds", g.max_annual_builds.size(), ny);
    for (int b : g.max_annual_builds) {
      if (b < 0) { v.push_back({g.id, "max_annual_builds < 0"}); break; }
      if (b > g.max_total_builds) { v.push_back({g.id, "max_annual_builds > max_total_builds"}); break; }
    }
    if (!all_finite(g.build_cost_by_year) || !all_finite(g.fuel_price_by_year) ||
        !all_finite(g.emission_price_by_year) || !std::isfinite(g.fixed_om) ||
        !std::isfinite(g.variable_om) || !std::isfinite(g.heat_rate) || !std::isfinite(g.emission_rate))
      v.push_back({g.id, "non-finite economic parameter"});
    const bool wants_cf = g.kind == GeneratorKind::wind || g.kind == GeneratorKind::solar;
    if (wants_cf != g.has_cf())
      v.push_back({g.id, wants_cf ? "wind/solar generator missing cf series"
                                  : "cf series present on non-wind/solar generator"});
    if (g.has_cf()) {
      if (g.cf_series.years != ny || g.cf_series.hours != t || !g.cf_series.shape_ok())
        v.push_back({g.id, "cf series length != n_years x hours_per_year"});
      else if ((g.cf_series.values < 0.0).any() || (g.cf_series.values > 1.0).any())
        v.push_back({g.id, "cf out of [0,1]"});
    }
  }

  for (const auto& l : ds.interfaces) {
    check_unique(l.id, "interface");
    if (l.from_region == l.to_region) v.push_back({l.id, "from_region == to_region"});
    if (ds.region_index(l.from_region) < 0) v.push_back({l.id, "from_region '" + l.from_region + "' does not exist"});
    if (ds.region_index(l.to_region) < 0) v.push_back({l.id, "to_region '" + l.to_region + "' does not exist"});
    if (!(l.unit_capacity > 0.0)) v.push_back({l.id, "unit_capacity <= 0"});
    if (l.existing_units < 0) v.push_back({l.id, "existing_units < 0"});
    if (l.max_total_builds < 0) v.push_back({l.id, "max_total_builds < 0"});
    check_year_list(v, l.id, "build_cost", l.build_cost_by_year.size(), ny);
    check_year_list(v, l.id, "max_annual_builds", l.max_annual_builds.size(), ny);
    for (int b : l.max_annual_builds) {
      if (b < 0) { v.push_back({l.id, "max_annual_builds < 0"}); break; }
      if (b > l.max_total_builds) { v.push_back({l.id, "max_annual_builds > max_total_builds"}); break; }
    }
    if (!all_finite(l.build_cost_by_year) || !std::isfinite(l.wheeling_cost))
      v.push_back({l.id, "non-finite economic parameter"});
  }

  if (!(ds.reserve_import_credit >= 0.0 && ds.reserve_import_credit <= 1.0))
    v.push_back({"dataset", "reserve_import_credit out of [0,1]"});
  for (const auto& [rid, cap] : ds.target_wind_caps) {
    if (ds.region_index(rid) < 0) v.push_back({rid, "target_wind_caps names unknown region"});
    if (!(cap >= 0.0) || !std::isfinite(cap)) v.push_back({rid, "target wind capacity negative or non-finite"});
  }

  return v;
}

std::vector<IncidenceEntry> interface_incidence(const SystemDataset& ds, const std::string& region_id) {
  if (ds.region_index(region_id) < 0)
    throw std::invalid_argument("interface_incidence: unknown region '" + region_id + "'");
  std::vector<IncidenceEntry> out;
  for (size_t l = 0; l < ds.interfaces.size(); ++l) {
    if (ds.interfaces[l].to_region == region_id)
      out.push_back({static_cast<int>(l), +1});
    else if (ds.interfaces[l].from_region == region_id)
      out.push_back({static_cast<int>(l), -1});
  }
  return out;
}

std::vector<double> reserve_margin_from_fraction(const Region& r, const std::vector<double>& frac_by_year) {
  std::vector<double> out(frac_by_year.size());
  for (size_t y = 0; y < frac_by_year.size(); ++y) {
    const double peak = r.load_series.year(static_cast<int>(y)).maxCoeff();
    out[y] = frac_by_year[y] * peak;
  }
  return out;
}

}  // namespace coex
