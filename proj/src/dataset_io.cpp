#include "coex/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "coex/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace coex {

namespace {

double to_number(const std::string& cell, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    throw std::runtime_error(context + ": bad number '" + cell + "'");
  return v;
}

int to_count(const std::string& cell, const std::string& context) {
  const double v = to_number(cell, context);
  const int n = static_cast<int>(v);
  if (v != n) throw std::runtime_error(context + ": expected integer, got '" + cell + "'");
  return n;
}

// ';'-separated per-year list; a single value broadcasts.
std::vector<double> year_list(const std::string& cell, int n_years, const std::string& context) {
  const auto parts = split_csv_line(cell, ';');
  std::vector<double> out;
  out.reserve(n_years);
  for (const auto& p : parts) out.push_back(to_number(p, context));
  if (out.size() == 1) out.assign(n_years, out[0]);
  if (out.size() != static_cast<size_t>(n_years))
    throw std::runtime_error(context + ": list has " + std::to_string(out.size()) +
                             " entries, horizon has " + std::to_string(n_years) + " years");
  return out;
}

std::vector<int> year_counts(const std::string& cell, int n_years, const std::string& context) {
  const auto vals = year_list(cell, n_years, context);
  std::vector<int> out;
  for (double v : vals) {
    const int n = static_cast<int>(v);
    if (v != n) throw std::runtime_error(context + ": expected integers in '" + cell + "'");
    out.push_back(n);
  }
  return out;
}

std::string year_list_cell(const std::vector<double>& vals) {
  const bool uniform = std::all_of(vals.begin(), vals.end(), [&](double v) { return v == vals[0]; });
  if (uniform) return csv_number(vals[0]);
  std::string out;
  for (size_t i = 0; i < vals.size(); ++i) out += (i ? ";" : "") + csv_number(vals[i]);
  return out;
}

std::string year_list_cell(const std::vector<int>& vals) {
  return year_list_cell(std::vector<double>(vals.begin(), vals.end()));
}

void require_columns(const CsvTable& t, const std::vector<std::string>& expected,
                     const std::string& file) {
  if (t.header != expected) {
    std::string want;
    for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
    std::string got;
    for (const auto& c : t.header) got += (got.empty() ? "" : ",") + c;
    throw std::runtime_error(file + ": header must be exactly '" + want + "', got '" + got + "'");
  }
}

ChronoSeries read_series(const std::string& path, int n_years, int hours) {
  const CsvTable t = read_csv(path);
  require_columns(t, {"year", "hour", "value"}, path);
  ChronoSeries s = ChronoSeries::zeros(n_years, hours);
  std::vector<bool> filled(static_cast<size_t>(n_years) * hours, false);
  for (const auto& row : t.rows) {
    const int y = to_count(row[0], path);
    const int h = to_count(row[1], path);
    if (y < 0 || y >= n_years || h < 0 || h >= hours)
      throw std::runtime_error(path + ": (year,hour) out of range: " + row[0] + "," + row[1]);
    const size_t idx = static_cast<size_t>(y) * hours + h;
    if (filled[idx]) throw std::runtime_error(path + ": duplicate (year,hour) " + row[0] + "," + row[1]);
    filled[idx] = true;
    s.at(y, h) = to_number(row[2], path);
  }
  if (static_cast<int>(t.rows.size()) != n_years * hours)
    throw std::runtime_error(path + ": expected " + std::to_string(n_years * hours) + " rows, got " +
                             std::to_string(t.rows.size()));
  return s;
}

void write_series(const std::string& path, const ChronoSeries& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<size_t>(s.years) * s.hours);
  for (int y = 0; y < s.years; ++y)
    for (int h = 0; h < s.hours; ++h)
      rows.push_back({std::to_string(y), std::to_string(h), csv_number(s.at(y, h))});
  write_csv(out, {"year", "hour", "value"}, rows);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw std::runtime_error("config.json: unknown key '" + key + "' in " + where);
}

}  // namespace

SystemDataset read_dataset(const std::string& dir, CaseDefaults* defaults) {
  SystemDataset ds;

  json cfg;
  {
    std::ifstream in(dir + "/config.json");
    if (!in) throw std::runtime_error("cannot open " + dir + "/config.json");
    in >> cfg;
  }
  check_keys(cfg, {"horizon", "reserve_import_credit", "target_wind_caps", "defaults"}, "root");
  const json& hz = cfg.at("horizon");
  check_keys(hz, {"n_years", "hours_per_year", "discount_rate", "base_year"}, "horizon");
  ds.horizon.n_years = hz.at("n_years").get<int>();
  ds.horizon.hours_per_year = hz.at("hours_per_year").get<int>();
  ds.horizon.discount_rate = hz.at("discount_rate").get<double>();
  ds.horizon.base_year = hz.value("base_year", 0);
  ds.reserve_import_credit = cfg.value("reserve_import_credit", 1.0);
  if (cfg.contains("target_wind_caps"))
    for (const auto& [region, cap] : cfg.at("target_wind_caps").items())
      ds.target_wind_caps[region] = cap.get<double>();
  if (cfg.contains("defaults") && defaults) {
    const json& d = cfg.at("defaults");
    check_keys(d, {"n_load_blocks", "n_wind_bins", "peak_fraction", "gap", "node_limit"},
               "defaults");
    defaults->n_load_blocks = d.value("n_load_blocks", defaults->n_load_blocks);
    defaults->n_wind_bins = d.value("n_wind_bins", defaults->n_wind_bins);
    defaults->peak_fraction = d.value("peak_fraction", defaults->peak_fraction);
    defaults->gap = d.value("gap", defaults->gap);
    defaults->node_limit = d.value("node_limit", defaults->node_limit);
  }

  const int ny = ds.horizon.n_years;
  const int t = ds.horizon.hours_per_year;

  {
    const std::string path = dir + "/regions.csv";
    const CsvTable tab = read_csv(path);
    require_columns(tab, {"id", "voll", "reserve_margin", "rps", "load_series"}, path);
    for (const auto& row : tab.rows) {
      Region r;
      r.id = row[0];
      r.voll = to_number(row[1], r.id + ".voll");
      r.rps_by_year = year_list(row[3], ny, r.id + ".rps");
      r.load_series = read_series(dir + "/series/" + row[4] + ".csv", ny, t);
      if (row[2].rfind("frac:", 0) == 0) {
        const auto frac = year_list(row[2].substr(5), ny, r.id + ".reserve_margin");
        r.reserve_margin_by_year = reserve_margin_from_fraction(r, frac);
      } else {
        r.reserve_margin_by_year = year_list(row[2], ny, r.id + ".reserve_margin");
      }
      ds.regions.push_back(std::move(r));
    }
  }

  {
    const std::string path = dir + "/generators.csv";
    const CsvTable tab = read_csv(path);
    require_columns(tab,
                    {"id", "region", "kind", "renewable", "unit_capacity", "existing_units",
                     "build_cost", "fixed_om", "variable_om", "fuel_price", "heat_rate",
                     "emission_rate", "emission_price", "forced_outage_rate",
                     "maintenance_outage_rate", "max_total_builds", "max_annual_builds",
                     "cf_series"},
                    path);
    for (const auto& row : tab.rows) {
      GeneratorType g;
      g.id = row[0];
      g.region = row[1];
      g.kind = generator_kind_from_string(row[2]);
      g.is_renewable = to_count(row[3], g.id + ".renewable") != 0;
      g.unit_capacity = to_number(row[4], g.id + ".unit_capacity");
      g.existing_units = to_count(row[5], g.id + ".existing_units");
      g.build_cost_by_year = year_list(row[6], ny, g.id + ".build_cost");
      g.fixed_om = to_number(row[7], g.id + ".fixed_om");
      g.variable_om = to_number(row[8], g.id + ".variable_om");
      g.fuel_price_by_year = year_list(row[9], ny, g.id + ".fuel_price");
      g.heat_rate = to_number(row[10], g.id + ".heat_rate");
      g.emission_rate = to_number(row[11], g.id + ".emission_rate");
      g.emission_price_by_year = year_list(row[12], ny, g.id + ".emission_price");
      g.forced_outage_rate = to_number(row[13], g.id + ".forced_outage_rate");
      g.maintenance_outage_rate = to_number(row[14], g.id + ".maintenance_outage_rate");
      g.max_total_builds = to_count(row[15], g.id + ".max_total_builds");
      g.max_annual_builds = year_counts(row[16], ny, g.id + ".max_annual_builds");
      if (!row[17].empty()) g.cf_series = read_series(dir + "/series/" + row[17] + ".csv", ny, t);
      ds.generators.push_back(std::move(g));
    }
  }

  {
    const std::string path = dir + "/interfaces.csv";
    const CsvTable tab = read_csv(path);
    require_columns(tab,
                    {"id", "from_region", "to_region", "unit_capacity", "existing_units",
                     "build_cost", "wheeling_cost", "max_total_builds", "max_annual_builds"},
                    path);
    for (const auto& row : tab.rows) {
      TransmissionInterface l;
      l.id = row[0];
      l.from_region = row[1];
      l.to_region = row[2];
      l.unit_capacity = to_number(row[3], l.id + ".unit_capacity");
      l.existing_units = to_count(row[4], l.id + ".existing_units");
      l.build_cost_by_year = year_list(row[5], ny, l.id + ".build_cost");
      l.wheeling_cost = to_number(row[6], l.id + ".wheeling_cost");
      l.max_total_builds = to_count(row[7], l.id + ".max_total_builds");
      l.max_annual_builds = year_counts(row[8], ny, l.id + ".max_annual_builds");
      ds.interfaces.push_back(std::move(l));
    }
  }

  return ds;
}

void write_dataset(const std::string& dir, const SystemDataset& ds, const CaseDefaults* defaults) {
  fs::create_directories(dir + "/series");

  json cfg;
  cfg["horizon"] = {{"n_years", ds.horizon.n_years},
                    {"hours_per_year", ds.horizon.hours_per_year},
                    {"discount_rate", ds.horizon.discount_rate},
                    {"base_year", ds.horizon.base_year}};
  cfg["reserve_import_credit"] = ds.reserve_import_credit;
  cfg["target_wind_caps"] = json::object();
  for (const auto& [region, cap] : ds.target_wind_caps) cfg["target_wind_caps"][region] = cap;
  if (defaults)
    cfg["defaults"] = {{"n_load_blocks", defaults->n_load_blocks},
                       {"n_wind_bins", defaults->n_wind_bins},
                       {"peak_fraction", defaults->peak_fraction},
                       {"gap", defaults->gap},
                       {"node_limit", defaults->node_limit}};
  std::ofstream(dir + "/config.json") << cfg.dump(2) << "\n";

  {
    std::ofstream out(dir + "/regions.csv");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : ds.regions) {
      write_series(dir + "/series/load_" + r.id + ".csv", r.load_series);
      rows.push_back({r.id, csv_number(r.voll), year_list_cell(r.reserve_margin_by_year),
                      year_list_cell(r.rps_by_year), "load_" + r.id});
    }
    write_csv(out, {"id", "voll", "reserve_margin", "rps", "load_series"}, rows);
  }
  {
    std::ofstream out(dir + "/generators.csv");
    std::vector<std::vector<std::string>> rows;
    for (const auto& g : ds.generators) {
      std::string cf_name;
      if (g.has_cf()) {
        cf_name = "cf_" + g.id;
        write_series(dir + "/series/" + cf_name + ".csv", g.cf_series);
      }
      rows.push_back({g.id, g.region, to_string(g.kind), g.is_renewable ? "1" : "0",
                      csv_number(g.unit_capacity), std::to_string(g.existing_units),
                      year_list_cell(g.build_cost_by_year), csv_number(g.fixed_om),
                      csv_number(g.variable_om), year_list_cell(g.fuel_price_by_year),
                      csv_number(g.heat_rate), csv_number(g.emission_rate),
                      year_list_cell(g.emission_price_by_year), csv_number(g.forced_outage_rate),
                      csv_number(g.maintenance_outage_rate), std::to_string(g.max_total_builds),
                      year_list_cell(g.max_annual_builds), cf_name});
    }
    write_csv(out,
              {"id", "region", "kind", "renewable", "unit_capacity", "existing_units",
               "build_cost", "fixed_om", "variable_om", "fuel_price", "heat_rate",
               "emission_rate", "emission_price", "forced_outage_rate", "maintenance_outage_rate",
               "max_total_builds", "max_annual_builds", "cf_series"},
              rows);
  }
  {
    std::ofstream out(dir + "/interfaces.csv");
    std::vector<std::vector<std::string>> rows;
    for (const auto& l : ds.interfaces)
      rows.push_back({l.id, l.from_region, l.to_region, csv_number(l.unit_capacity),
                      std::to_string(l.existing_units), year_list_cell(l.build_cost_by_year),
                      csv_number(l.wheeling_cost), std::to_string(l.max_total_builds),
                      year_list_cell(l.max_annual_builds)});
    write_csv(out,
              {"id", "from_region", "to_region", "unit_capacity", "existing_units", "build_cost",
               "wheeling_cost", "max_total_builds", "max_annual_builds"},
              rows);
  }
}

std::uint64_t dataset_fingerprint(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), dir).string());
  std::sort(files.begin(), files.end());

  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  const auto mix = [&h](const char* data, size_t n) {
    for (size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(data[i]);
      h *= 1099511628211ull;
    }
  };
  for (const auto& name : files) {
    mix(name.data(), name.size());
    std::ifstream in(dir + "/" + name, std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    const std::string bytes = body.str();
    mix(bytes.data(), bytes.size());
  }
  return h;
}

}  // namespace coex
