#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "coex/dataset.hpp"
#include "coex/dataset_io.hpp"
#include "coex/desk_ei.hpp"
#include "test_support.hpp"

using namespace coex;

TEST_CASE("valid toy datasets pass validation") {
  CHECK(validate_dataset(test::two_region_toy()).empty());
  CHECK(validate_dataset(test::one_bus_toy()).empty());
  CHECK(validate_dataset(make_desk_ei()).empty());
}

TEST_CASE("validation catches structural problems") {
  auto count = [](const SystemDataset& ds) {
    return validate_dataset(ds).size();
  };

  SUBCASE("duplicate region id") {
    auto ds = test::two_region_toy();
    ds.regions[1].id = "A";
    CHECK(count(ds) > 0);
  }
  SUBCASE("generator in unknown region") {
    auto ds = test::two_region_toy();
    ds.generators[0].region = "Z";
    CHECK(count(ds) > 0);
  }
  SUBCASE("interface endpoints must differ") {
    auto ds = test::two_region_toy();
    ds.interfaces[0].to_region = "B";
    CHECK(count(ds) > 0);
  }
  SUBCASE("negative load") {
    auto ds = test::two_region_toy();
    ds.regions[0].load_series.values(3) = -1.0;
    CHECK(count(ds) > 0);
  }
  SUBCASE("outage rates must stay below one") {
    auto ds = test::two_region_toy();
    ds.generators[0].forced_outage_rate = 1.0;
    CHECK(count(ds) > 0);
  }
  SUBCASE("cf required exactly for wind and solar") {
    auto ds = test::two_region_toy();
    ds.generators[1].cf_series = ChronoSeries{};
    CHECK(count(ds) > 0);
    auto ds2 = test::two_region_toy();
    ds2.generators[0].cf_series = ds2.generators[1].cf_series;
    CHECK(count(ds2) > 0);
  }
  SUBCASE("cf outside [0,1]") {
    auto ds = test::two_region_toy();
    ds.generators[1].cf_series.values(0) = 1.5;
    CHECK(count(ds) > 0);
  }
  SUBCASE("per-year lists must match the horizon") {
    auto ds = test::two_region_toy();
    ds.generators[0].fuel_price_by_year.pop_back();
    CHECK(count(ds) > 0);
  }
  SUBCASE("annual build limit cannot exceed the total limit") {
    auto ds = test::two_region_toy();
    ds.generators[0].max_annual_builds = {9, 9};
    CHECK(count(ds) > 0);
  }
  SUBCASE("rps outside [0,1]") {
    auto ds = test::two_region_toy();
    ds.regions[0].rps_by_year[0] = 1.5;
    CHECK(count(ds) > 0);
  }
  SUBCASE("ids must be token-safe") {
    auto ds = test::two_region_toy();
    ds.regions[0].id = "A B";
    CHECK(count(ds) > 0);
  }
  SUBCASE("import credit range") {
    auto ds = test::two_region_toy();
    ds.reserve_import_credit = 1.5;
    CHECK(count(ds) > 0);
  }
  SUBCASE("wind weight for unknown region") {
    auto ds = test::two_region_toy();
    ds.target_wind_caps["Q"] = 10.0;
    CHECK(count(ds) > 0);
  }
}

TEST_CASE("incidence is signed toward the importing region") {
  const auto ds = test::two_region_toy();
  const auto at_a = interface_incidence(ds, "A");
  REQUIRE(at_a.size() == 1);
  CHECK(at_a[0].interface == 0);
  CHECK(at_a[0].sign == 1);  // A is the to-region: forward flow imports
  const auto at_b = interface_incidence(ds, "B");
  REQUIRE(at_b.size() == 1);
  CHECK(at_b[0].sign == -1);
  CHECK_THROWS(interface_incidence(ds, "nope"));
}

TEST_CASE("reserve margin from a peak fraction") {
  const auto ds = test::two_region_toy();
  const auto mw =
      reserve_margin_from_fraction(ds.regions[0], {0.10, 0.20});
  REQUIRE(mw.size() == 2);
  CHECK(mw[0] == doctest::Approx(16.0));  // 10% of 160
  CHECK(mw[1] == doctest::Approx(34.0));  // 20% of 170
}

TEST_CASE("index helpers") {
  const auto ds = test::two_region_toy();
  CHECK(ds.region_index("B") == 1);
  CHECK(ds.region_index("nope") == -1);
  CHECK(ds.generator_index("windB") == 1);
  CHECK(ds.interface_index("BA") == 0);
  CHECK(ds.generators_in(1) == std::vector<int>{1});
  CHECK(ds.cf_generators() == std::vector<int>{1});
}

TEST_CASE("dataset directory round trip preserves everything") {
  namespace fs = std::filesystem;
  const auto ds = make_desk_ei();
  const fs::path dir = fs::temp_directory_path() / "coex-roundtrip-test";
  fs::remove_all(dir);
  CaseDefaults defaults;
  defaults.n_load_blocks = 12;
  defaults.n_wind_bins = 4;
  write_dataset(dir.string(), ds, &defaults);

  CaseDefaults got;
  const SystemDataset back = read_dataset(dir.string(), &got);
  CHECK(got.n_load_blocks == 12);
  CHECK(got.n_wind_bins == 4);

  REQUIRE(back.regions.size() == ds.regions.size());
  REQUIRE(back.generators.size() == ds.generators.size());
  REQUIRE(back.interfaces.size() == ds.interfaces.size());
  CHECK(back.horizon.n_years == ds.horizon.n_years);
  CHECK(back.horizon.discount_rate == ds.horizon.discount_rate);
  for (size_t r = 0; r < ds.regions.size(); ++r) {
    CHECK(back.regions[r].id == ds.regions[r].id);
    CHECK(back.regions[r].voll == ds.regions[r].voll);
    CHECK(back.regions[r].reserve_margin_by_year ==
          ds.regions[r].reserve_margin_by_year);
    CHECK((back.regions[r].load_series.values == ds.regions[r].load_series.values)
              .all());
  }
  for (size_t g = 0; g < ds.generators.size(); ++g) {
    const auto& a = ds.generators[g];
    const auto& b = back.generators[g];
    CHECK(b.id == a.id);
    CHECK(b.kind == a.kind);
    CHECK(b.is_renewable == a.is_renewable);
    CHECK(b.unit_capacity == a.unit_capacity);
    CHECK(b.existing_units == a.existing_units);
    CHECK(b.build_cost_by_year == a.build_cost_by_year);
    CHECK(b.fixed_om == a.fixed_om);
    CHECK(b.variable_om == a.variable_om);
    CHECK(b.heat_rate == a.heat_rate);
    CHECK(b.fuel_price_by_year == a.fuel_price_by_year);
    CHECK(b.emission_rate == a.emission_rate);
    CHECK(b.max_total_builds == a.max_total_builds);
    CHECK(b.max_annual_builds == a.max_annual_builds);
    if (a.has_cf()) CHECK((b.cf_series.values == a.cf_series.values).all());
  }
  for (size_t l = 0; l < ds.interfaces.size(); ++l) {
    CHECK(back.interfaces[l].id == ds.interfaces[l].id);
    CHECK(back.interfaces[l].wheeling_cost == ds.interfaces[l].wheeling_cost);
  }
  CHECK(back.target_wind_caps == ds.target_wind_caps);

  // byte-stable: writing the re-read dataset reproduces the fingerprint
  const auto fp1 = dataset_fingerprint(dir.string());
  const fs::path dir2 = fs::temp_directory_path() / "coex-roundtrip-test2";
  fs::remove_all(dir2);
  write_dataset(dir2.string(), back, &got);
  CHECK(dataset_fingerprint(dir2.string()) == fp1);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("strict ingestion rejects malformed inputs") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "coex-badset-test";
  fs::remove_all(dir);
  write_dataset(dir.string(), test::two_region_toy());

  SUBCASE("unknown config key") {
    auto cfg = dir / "config.json";
    std::string text;
    {
      std::ifstream in(cfg);
      text.assign(std::istreambuf_iterator<char>(in), {});
    }
    text.insert(text.rfind('}'), ",\"mystery\": 1\n");
    std::ofstream(cfg) << text;
    CHECK_THROWS(read_dataset(dir.string()));
  }
  SUBCASE("missing series file") {
    fs::remove(dir / "series" / "cf_windB.csv");
    CHECK_THROWS(read_dataset(dir.string()));
  }
  SUBCASE("wrong header") {
    std::ofstream(dir / "interfaces.csv") << "id,oops\nBA,1\n";
    CHECK_THROWS(read_dataset(dir.string()));
  }
  fs::remove_all(dir);
}

TEST_CASE("generator kind names round trip") {
  for (auto k : {GeneratorKind::thermal, GeneratorKind::wind,
                 GeneratorKind::solar, GeneratorKind::hydro,
                 GeneratorKind::other}) {
    CHECK(generator_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(generator_kind_from_string("plasma"), std::invalid_argument);
}
