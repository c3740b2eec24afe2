#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "coex/desk_ei.hpp"
#include "coex/scenario.hpp"
#include "test_support.hpp"

using namespace coex;

namespace {

Eigen::ArrayXd arr(std::vector<double> v) {
  return Eigen::Map<Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double sse_of_blocks(const Eigen::ArrayXd& series, const std::vector<int>& hour_to_block,
                     int n_blocks) {
  std::vector<double> sum(n_blocks, 0.0);
  std::vector<int> cnt(n_blocks, 0);
  for (int h = 0; h < series.size(); ++h) {
    sum[hour_to_block[h]] += series[h];
    cnt[hour_to_block[h]] += 1;
  }
  double sse = 0.0;
  for (int h = 0; h < series.size(); ++h) {
    const int b = hour_to_block[h];
    const double dev = series[h] - sum[b] / cnt[b];
    sse += dev * dev;
  }
  return sse;
}

// Minimal SSE over all contiguous partitions of v[first..last] into k
// segments, by direct recursion. Small inputs only.
double best_segmentation_sse(const Eigen::ArrayXd& v, int first, int last, int k) {
  const int n = last - first + 1;
  if (k == 1) {
    double mean = 0.0;
    for (int i = first; i <= last; ++i) mean += v[i];
    mean /= n;
    double sse = 0.0;
    for (int i = first; i <= last; ++i) sse += (v[i] - mean) * (v[i] - mean);
    return sse;
  }
  double best = std::numeric_limits<double>::infinity();
  // first segment is v[first..cut], recurse on the rest
  for (int cut = first; cut <= last - (k - 1); ++cut) {
    const double head = best_segmentation_sse(v, first, cut, 1);
    const double tail = best_segmentation_sse(v, cut + 1, last, k - 1);
    best = std::min(best, head + tail);
  }
  return best;
}

}  // namespace

TEST_CASE("load duration curve sorts descending and keeps tied hours in order") {
  const auto ldc = load_duration_curve(arr({5, 7, 5, 3, 7}));
  CHECK(ldc.hours == std::vector<int>{1, 4, 0, 2, 3});
  for (int i = 0; i + 1 < ldc.values.size(); ++i) CHECK(ldc.values[i] >= ldc.values[i + 1]);

  // hours is a permutation and values trace the source series through it
  const auto series = arr({2, 9, 4, 9, 1, 9});
  const auto curve = load_duration_curve(series);
  std::vector<int> seen(series.size(), 0);
  for (int i = 0; i < static_cast<int>(curve.hours.size()); ++i) {
    seen[curve.hours[i]] += 1;
    CHECK(curve.values[i] == series[curve.hours[i]]);
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  // the three tied 9s appear as hours 1, 3, 5 in that order
  CHECK(curve.hours[0] == 1);
  CHECK(curve.hours[1] == 3);
  CHECK(curve.hours[2] == 5);
}

TEST_CASE("block fit matches exhaustive segmentation on random series") {
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> load(10.0, 100.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int t = 6 + static_cast<int>(rng() % 7);  // 6..12 hours
    Eigen::ArrayXd series(t);
    for (int h = 0; h < t; ++h) series[h] = load(rng);
    const int n_blocks = 2 + static_cast<int>(rng() % 3);  // 2..4
    const double pf = 1.0 / (n_blocks + 2);

    const BlockFit fit = fit_load_blocks(series, n_blocks, pf);

    // oracle: peak block is fixed, tail segmentation enumerated directly
    const LoadDurationCurve ldc = load_duration_curve(series);
    const int peak_hours = static_cast<int>(std::ceil(pf * t));
    const double peak_sse = best_segmentation_sse(ldc.values, 0, peak_hours - 1, 1);
    const double tail_sse =
        best_segmentation_sse(ldc.values, peak_hours, t - 1, n_blocks - 1);

    CHECK(sse_of_blocks(series, fit.hour_to_block, n_blocks) ==
          doctest::Approx(peak_sse + tail_sse).epsilon(1e-9));
  }
}

TEST_CASE("block fit structural invariants") {
  const auto series = arr({40, 90, 55, 30, 80, 70, 20, 60, 50, 35});
  const BlockFit fit = fit_load_blocks(series, 3, 0.1);

  SUBCASE("peak block holds exactly the top hours") {
    // ceil(0.1*10) = 1 peak hour: the max, hour 1
    CHECK(fit.hour_to_block[1] == 0);
    CHECK(std::count(fit.hour_to_block.begin(), fit.hour_to_block.end(), 0) == 1);
  }
  SUBCASE("probabilities are member shares and sum to one") {
    CHECK(fit.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int b = 0; b < 3; ++b) {
      const auto members =
          std::count(fit.hour_to_block.begin(), fit.hour_to_block.end(), b);
      CHECK(fit.probabilities[b] == doctest::Approx(members / 10.0));
    }
  }
  SUBCASE("values are member means and decrease with block index") {
    for (int b = 0; b < 3; ++b) {
      double sum = 0.0;
      int cnt = 0;
      for (int h = 0; h < series.size(); ++h)
        if (fit.hour_to_block[h] == b) {
          sum += series[h];
          ++cnt;
        }
      CHECK(fit.values[b] == doctest::Approx(sum / cnt).epsilon(1e-12));
    }
    CHECK(fit.values[0] > fit.values[1]);
    CHECK(fit.values[1] > fit.values[2]);
  }
  SUBCASE("probability-weighted mean equals the chronological mean") {
    CHECK((fit.values * fit.probabilities).sum() ==
          doctest::Approx(series.mean()).epsilon(1e-12));
  }
}

TEST_CASE("single block collapses to the plain mean") {
  const auto series = arr({3, 9, 6});
  const BlockFit fit = fit_load_blocks(series, 1, 0.3);
  CHECK(fit.values.size() == 1);
  CHECK(fit.values[0] == doctest::Approx(6.0));
  CHECK(fit.probabilities[0] == doctest::Approx(1.0));
  CHECK(fit.hour_to_block == std::vector<int>{0, 0, 0});
}

TEST_CASE("block fit rejects out-of-range arguments") {
  const auto series = arr({1, 2, 3, 4});
  CHECK_THROWS_AS(fit_load_blocks(series, 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(fit_load_blocks(series, 5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(fit_load_blocks(series, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_load_blocks(series, 2, 0.6), std::invalid_argument);
  CHECK_NOTHROW(fit_load_blocks(series, 2, 0.5));  // boundary 1/n_blocks is legal
}

TEST_CASE("system wind cf weights regions by target capacity") {
  auto ds = test::two_region_toy();

  SUBCASE("single wind region reproduces its profile") {
    const auto cf = system_wind_cf(ds, 0);
    const auto expect = ds.generators[1].cf_series.year(0);
    for (int h = 0; h < 6; ++h) CHECK(cf[h] == doctest::Approx(expect[h]));
  }
  SUBCASE("two regions blend by target weight, fleets by unit capacity") {
    GeneratorType w2 = ds.generators[1];
    w2.id = "windA1";
    w2.region = "A";
    w2.unit_capacity = 30.0;
    w2.cf_series = test::series_of(2, 6, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1,  //
                                          0.2, 0.2, 0.2, 0.2, 0.2, 0.2});
    GeneratorType w3 = w2;
    w3.id = "windA2";
    w3.unit_capacity = 10.0;
    w3.cf_series = test::series_of(2, 6, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5,  //
                                          0.6, 0.6, 0.6, 0.6, 0.6, 0.6});
    ds.generators.push_back(w2);
    ds.generators.push_back(w3);
    ds.target_wind_caps = {{"A", 300.0}, {"B", 100.0}};

    // A's fleet cf = (30*0.1 + 10*0.5)/40 = 0.2; blend = 0.75*0.2 + 0.25*cfB
    const auto cf = system_wind_cf(ds, 0);
    const auto cf_b = ds.generators[1].cf_series.year(0);
    for (int h = 0; h < 6; ++h)
      CHECK(cf[h] == doctest::Approx(0.75 * 0.2 + 0.25 * cf_b[h]).epsilon(1e-12));
  }
  SUBCASE("throws when no weighted region has a wind profile") {
    ds.target_wind_caps = {{"A", 100.0}};  // A has no wind fleet
    CHECK_THROWS_AS(system_wind_cf(ds, 0), std::invalid_argument);
    ds.target_wind_caps = {};
    CHECK_THROWS_AS(system_wind_cf(ds, 0), std::invalid_argument);
  }
}

TEST_CASE("sub-scenario split orders by cf and balances group sizes") {
  SUBCASE("five hours into two bins: first group takes the extra hour") {
    const std::vector<int> blocks{0, 0, 0, 0, 0};
    const auto cf = arr({0.5, 0.1, 0.9, 0.3, 0.7});
    const auto s = split_sub_scenarios(blocks, cf, 2);
    // ascending cf: h1 h3 h0 | h4 h2
    CHECK(s == std::vector<int>{0, 0, 1, 0, 1});
  }
  SUBCASE("indices run block-major and stay contiguous past short blocks") {
    const std::vector<int> blocks{0, 1, 1, 1, 1};
    const auto cf = arr({0.5, 0.4, 0.3, 0.2, 0.1});
    const auto s = split_sub_scenarios(blocks, cf, 3);
    // block 0 has one hour -> one group (scenario 0); block 1 groups of 2,1,1
    CHECK(s[0] == 0);
    CHECK(s[4] == 1);  // lowest cf
    CHECK(s[3] == 1);
    CHECK(s[2] == 2);
    CHECK(s[1] == 3);
  }
  SUBCASE("tied cf falls back to ascending hour") {
    const std::vector<int> blocks{0, 0, 0, 0};
    const auto cf = arr({0.4, 0.4, 0.4, 0.4});
    const auto s = split_sub_scenarios(blocks, cf, 2);
    CHECK(s == std::vector<int>{0, 0, 1, 1});
  }
  SUBCASE("one bin is the identity on blocks") {
    const std::vector<int> blocks{0, 1, 0, 2};
    const auto s = split_sub_scenarios(blocks, arr({0.1, 0.2, 0.3, 0.4}), 1);
    CHECK(s == blocks);
  }
  SUBCASE("rejects a non-positive bin count") {
    CHECK_THROWS_AS(split_sub_scenarios({0}, arr({0.5}), 0), std::invalid_argument);
  }
}

TEST_CASE("synchronize averages member hours for every series") {
  const auto ds = test::two_region_toy();
  ChronologyMap map;
  map.hour_to_scenario = {{0, 0, 1, 1, 2, 2}, {0, 1, 1, 1, 0, 0}};
  const ScenarioSet set = synchronize(ds, map);

  REQUIRE(set.years.size() == 2);
  REQUIRE(set.years[0].size() == 3);
  REQUIRE(set.years[1].size() == 2);

  const Scenario& y0s0 = set.years[0][0];
  CHECK(y0s0.duration_hours == 2);
  CHECK(y0s0.probability == doctest::Approx(2.0 / 6.0));
  CHECK(y0s0.load_by_region[0] == doctest::Approx(110.0));  // (100+120)/2
  CHECK(y0s0.load_by_region[1] == doctest::Approx(21.0));   // (20+22)/2
  CHECK(y0s0.system_load == doctest::Approx(131.0));
  CHECK(y0s0.cf_by_generator[0] == doctest::Approx(1.0));  // no profile
  CHECK(y0s0.cf_by_generator[1] == doctest::Approx(0.8));  // (0.9+0.7)/2

  const Scenario& y1s0 = set.years[1][0];
  CHECK(y1s0.duration_hours == 3);
  CHECK(y1s0.load_by_region[0] == doctest::Approx((110 + 140 + 120) / 3.0));
  CHECK(y1s0.cf_by_generator[1] == doctest::Approx((0.8 + 0.5 + 0.7) / 3.0));
}

namespace {

void check_partition_invariants(const SystemDataset& ds, const ScenarioSet& set) {
  const int t = ds.horizon.hours_per_year;
  for (int y = 0; y < ds.horizon.n_years; ++y) {
    const auto& assign = set.map.hour_to_scenario[y];
    const auto& scens = set.years[y];
    const int ns = static_cast<int>(scens.size());
    REQUIRE(static_cast<int>(assign.size()) == t);

    // every hour maps to a real scenario; durations tally the partition
    std::vector<int> counts(ns, 0);
    for (int h = 0; h < t; ++h) {
      REQUIRE(assign[h] >= 0);
      REQUIRE(assign[h] < ns);
      counts[assign[h]] += 1;
    }
    double prob_sum = 0.0;
    int hour_sum = 0;
    for (int s = 0; s < ns; ++s) {
      CHECK(scens[s].duration_hours == counts[s]);
      prob_sum += scens[s].probability;
      hour_sum += scens[s].duration_hours;
    }
    CHECK(hour_sum == t);
    CHECK(prob_sum == doctest::Approx(1.0).epsilon(1e-12));

    // probability-weighted load reproduces each region's chronological mean
    for (size_t r = 0; r < ds.regions.size(); ++r) {
      double expected = 0.0;
      for (int s = 0; s < ns; ++s)
        expected += scens[s].probability * scens[s].load_by_region[r];
      const double chrono = ds.regions[r].load_series.year(y).mean();
      CHECK(expected == doctest::Approx(chrono).epsilon(1e-9));
    }

    // the peak hour lands in the scenario with the highest system load
    int peak_hour = 0;
    double peak_load = -1.0;
    for (int h = 0; h < t; ++h) {
      double total = 0.0;
      for (const auto& reg : ds.regions) total += reg.load_series.at(y, h);
      if (total > peak_load) {
        peak_load = total;
        peak_hour = h;
      }
    }
    int argmax = 0;
    for (int s = 1; s < ns; ++s)
      if (scens[s].system_load > scens[argmax].system_load) argmax = s;
    CHECK(assign[peak_hour] == argmax);
  }
}

}  // namespace

TEST_CASE("scenario pipeline invariants hold on the bundled system") {
  const auto ds = make_desk_ei();
  for (const int bins : {1, 2, 4}) {
    CAPTURE(bins);
    const ScenarioSet set = build_scenarios(ds, 8, bins);
    CHECK(set.n_load_blocks == 8);
    CHECK(set.n_wind_bins == bins);
    check_partition_invariants(ds, set);
  }
  check_partition_invariants(ds, build_nonsync_scenarios(ds, 8));
}

TEST_CASE("scenario construction is deterministic") {
  const auto ds = make_desk_ei();
  const ScenarioSet a = build_scenarios(ds, 8, 2);
  const ScenarioSet b = build_scenarios(ds, 8, 2);
  REQUIRE(a.map.hour_to_scenario == b.map.hour_to_scenario);
  for (size_t y = 0; y < a.years.size(); ++y)
    for (size_t s = 0; s < a.years[y].size(); ++s) {
      CHECK(a.years[y][s].probability == b.years[y][s].probability);
      CHECK((a.years[y][s].load_by_region == b.years[y][s].load_by_region).all());
      CHECK((a.years[y][s].cf_by_generator == b.years[y][s].cf_by_generator).all());
    }
}

TEST_CASE("more wind bins refine the same load partition") {
  const auto ds = make_desk_ei();
  const ScenarioSet coarse = build_scenarios(ds, 8, 1);
  const ScenarioSet fine = build_scenarios(ds, 8, 4);
  for (int y = 0; y < ds.horizon.n_years; ++y) {
    const auto& c = coarse.map.hour_to_scenario[y];
    const auto& f = fine.map.hour_to_scenario[y];
    // hours sharing a fine scenario always share the coarse block
    for (size_t h1 = 0; h1 < f.size(); ++h1)
      for (size_t h2 = h1 + 1; h2 < f.size(); ++h2)
        if (f[h1] == f[h2]) CHECK(c[h1] == c[h2]);
  }
}

TEST_CASE("non-synchronized bins bracket the synchronized wind means") {
  const auto ds = make_desk_ei();
  const ScenarioSet sync = build_scenarios(ds, 8, 2);
  const ScenarioSet nonsync = build_nonsync_scenarios(ds, 8);

  // identical hour partitions, loads and probabilities
  REQUIRE(nonsync.map.hour_to_scenario == sync.map.hour_to_scenario);
  for (size_t y = 0; y < sync.years.size(); ++y) {
    REQUIRE(nonsync.years[y].size() == sync.years[y].size());
    for (size_t s = 0; s < sync.years[y].size(); ++s) {
      CHECK(nonsync.years[y][s].probability == sync.years[y][s].probability);
      CHECK((nonsync.years[y][s].load_by_region == sync.years[y][s].load_by_region)
                .all());
    }
  }

  // per-generator sorting pushes the low bin lower and the high bin higher
  // than the system-synchronized split, and preserves the block energy
  const int t = ds.horizon.hours_per_year;
  for (int y = 0; y < ds.horizon.n_years; ++y) {
    Eigen::ArrayXd system_load = Eigen::ArrayXd::Zero(t);
    for (const auto& reg : ds.regions) system_load += reg.load_series.year(y);
    const BlockFit fit = fit_load_blocks(system_load, 8, 0.01);
    const auto& assign = sync.map.hour_to_scenario[y];

    std::vector<std::vector<int>> block_hours(8);
    for (int h = 0; h < t; ++h) block_hours[fit.hour_to_block[h]].push_back(h);

    for (const auto& hours : block_hours) {
      int s_low = assign[hours[0]], s_high = assign[hours[0]];
      std::vector<int> lo_hours, hi_hours;
      for (int h : hours) {
        s_low = std::min(s_low, assign[h]);
        s_high = std::max(s_high, assign[h]);
      }
      if (s_low == s_high) continue;  // singleton block: no split to compare
      for (int h : hours) (assign[h] == s_low ? lo_hours : hi_hours).push_back(h);

      for (int g : ds.cf_generators()) {
        if (ds.generators[g].kind != GeneratorKind::wind) continue;
        const double lo_n = nonsync.years[y][s_low].cf_by_generator[g];
        const double hi_n = nonsync.years[y][s_high].cf_by_generator[g];
        const double lo_s = sync.years[y][s_low].cf_by_generator[g];
        const double hi_s = sync.years[y][s_high].cf_by_generator[g];
        CHECK(lo_n <= lo_s + 1e-12);
        CHECK(hi_n >= hi_s - 1e-12);
        const double wn = lo_hours.size() * lo_n + hi_hours.size() * hi_n;
        const double ws = lo_hours.size() * lo_s + hi_hours.size() * hi_s;
        CHECK(wn == doctest::Approx(ws).epsilon(1e-9));
      }
    }
  }
}
