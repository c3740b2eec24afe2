#include "coex/scenario.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coex {

LoadDurationCurve load_duration_curve(const Eigen::ArrayXd& series) {
  const int t = static_cast<int>(series.size());
  LoadDurationCurve ldc;
  ldc.hours.resize(t);
  std::iota(ldc.hours.begin(), ldc.hours.end(), 0);
  // stable sort keeps ascending hour order among equal values
  std::stable_sort(ldc.hours.begin(), ldc.hours.end(),
                   [&](int a, int b) { return series[a] > series[b]; });
  ldc.values.resize(t);
  for (int i = 0; i < t; ++i) ldc.values[i] = series[ldc.hours[i]];
  return ldc;
}

BlockFit fit_load_blocks(const Eigen::ArrayXd& system_load, int n_blocks,
                         double peak_fraction) {
  const int t = static_cast<int>(system_load.size());
  if (n_blocks < 1) throw std::invalid_argument("fit_load_blocks: n_blocks < 1");
  if (n_blocks > t) throw std::invalid_argument("fit_load_blocks: n_blocks > hours");
  if (!(peak_fraction > 0.0 && peak_fraction <= 1.0 / n_blocks))
    throw std::invalid_argument("fit_load_blocks: peak_fraction outside (0, 1/n_blocks]");

  BlockFit fit;
  fit.hour_to_block.assign(t, 0);

  if (n_blocks == 1) {
    fit.values = Eigen::ArrayXd::Constant(1, system_load.mean());
    fit.probabilities = Eigen::ArrayXd::Constant(1, 1.0);
    return fit;
  }

  const LoadDurationCurve ldc = load_duration_curve(system_load);
  const int peak_hours = static_cast<int>(std::ceil(peak_fraction * t));
  for (int i = 0; i < peak_hours; ++i) fit.hour_to_block[ldc.hours[i]] = 0;

  // Partition the rest of the duration curve into n_blocks-1 contiguous
  // segments minimizing total squared deviation from segment means.
  // Since segment probability is count/T, minimizing sum pr_s * MSE_s is
  // the same as minimizing total SSE, a textbook 1-D segmentation DP.
  const int n = t - peak_hours;
  const int m = n_blocks - 1;
  const double* d = ldc.values.data() + peak_hours;

  std::vector<double> p1(n + 1, 0.0), p2(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    p1[i + 1] = p1[i] + d[i];
    p2[i + 1] = p2[i] + d[i] * d[i];
  }
  auto seg_sse = [&](int i, int j) {  // inclusive index range into d
    const double s1 = p1[j + 1] - p1[i];
    const int c = j - i + 1;
    return (p2[j + 1] - p2[i]) - s1 * s1 / c;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(m + 1, inf));
  std::vector<std::vector<int>> parent(n + 1, std::vector<int>(m + 1, -1));
  dp[0][0] = 0.0;
  for (int b = 1; b <= m; ++b) {
    for (int j = b; j <= n - (m - b); ++j) {
      for (int i = b - 1; i < j; ++i) {
        if (dp[i][b - 1] == inf) continue;
        const double cand = dp[i][b - 1] + seg_sse(i, j - 1);
        if (cand < dp[j][b]) {
          dp[j][b] = cand;
          parent[j][b] = i;
        }
      }
    }
  }

  std::vector<int> bounds(m + 1);  // bounds[b] = first index of segment b+1
  bounds[m] = n;
  for (int b = m; b >= 1; --b) bounds[b - 1] = parent[bounds[b]][b];
  for (int b = 0; b < m; ++b)
    for (int i = bounds[b]; i < bounds[b + 1]; ++i)
      fit.hour_to_block[ldc.hours[peak_hours + i]] = b + 1;

  fit.values = Eigen::ArrayXd::Zero(n_blocks);
  fit.probabilities = Eigen::ArrayXd::Zero(n_blocks);
  Eigen::ArrayXi counts = Eigen::ArrayXi::Zero(n_blocks);
  for (int h = 0; h < t; ++h) {
    fit.values[fit.hour_to_block[h]] += system_load[h];
    counts[fit.hour_to_block[h]] += 1;
  }
  for (int b = 0; b < n_blocks; ++b) {
    fit.values[b] /= counts[b];
    fit.probabilities[b] = static_cast<double>(counts[b]) / t;
  }
  return fit;
}

Eigen::ArrayXd system_wind_cf(const SystemDataset& ds, int year) {
  const int t = ds.horizon.hours_per_year;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(t);
  double weight_sum = 0.0;
  for (const auto& r : ds.regions) {
    const auto cap_it = ds.target_wind_caps.find(r.id);
    if (cap_it == ds.target_wind_caps.end() || cap_it->second <= 0.0) continue;

    // Capacity-weighted mean cf over this region's wind fleet.
    Eigen::ArrayXd region_cf = Eigen::ArrayXd::Zero(t);
    double fleet_cap = 0.0;
    for (const auto& g : ds.generators) {
      if (g.region != r.id || g.kind != GeneratorKind::wind || !g.has_cf()) continue;
      region_cf += g.unit_capacity * g.cf_series.year(year);
      fleet_cap += g.unit_capacity;
    }
    if (fleet_cap <= 0.0) continue;  // no wind profile here: drop the weight

    out += cap_it->second * (region_cf / fleet_cap);
    weight_sum += cap_it->second;
  }
  if (weight_sum <= 0.0)
    throw std::invalid_argument("system_wind_cf: no region with positive target wind capacity and a wind profile");
  return out / weight_sum;
}

std::vector<int> split_sub_scenarios(const std::vector<int>& hour_to_block,
                                     const Eigen::ArrayXd& system_cf, int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("split_sub_scenarios: n_bins < 1");
  const int t = static_cast<int>(hour_to_block.size());
  const int n_blocks = *std::max_element(hour_to_block.begin(), hour_to_block.end()) + 1;

  std::vector<std::vector<int>> block_hours(n_blocks);
  for (int h = 0; h < t; ++h) block_hours[hour_to_block[h]].push_back(h);

  std::vector<int> out(t, -1);
  int next_scenario = 0;  // keeps indices contiguous even for short blocks
  for (int b = 0; b < n_blocks; ++b) {
    auto& hours = block_hours[b];
    std::sort(hours.begin(), hours.end(), [&](int a, int c) {
      if (system_cf[a] != system_cf[c]) return system_cf[a] < system_cf[c];
      return a < c;
    });
    const int count = static_cast<int>(hours.size());
    const int groups = std::min(n_bins, count);
    const int base = count / groups;
    const int extra = count % groups;  // first `extra` groups get one more hour
    int pos = 0;
    for (int g = 0; g < groups; ++g) {
      const int size = base + (g < extra ? 1 : 0);
      for (int i = 0; i < size; ++i) out[hours[pos++]] = next_scenario;
      ++next_scenario;
    }
  }
  return out;
}

ScenarioSet synchronize(const SystemDataset& ds, const ChronologyMap& map) {
  const int ny = ds.horizon.n_years;
  const int t = ds.horizon.hours_per_year;
  const int nr = static_cast<int>(ds.regions.size());
  const int ng = static_cast<int>(ds.generators.size());

  ScenarioSet set;
  set.map = map;
  set.years.resize(ny);
  for (int y = 0; y < ny; ++y) {
    const auto& assign = map.hour_to_scenario[y];
    const int ns = set.map.n_scenarios(y);
    std::vector<std::vector<int>> members(ns);
    for (int h = 0; h < t; ++h) members[assign[h]].push_back(h);

    auto& scens = set.years[y];
    scens.resize(ns);
    for (int s = 0; s < ns; ++s) {
      assert(!members[s].empty());
      Scenario& sc = scens[s];
      sc.duration_hours = static_cast<int>(members[s].size());
      sc.probability = static_cast<double>(sc.duration_hours) / t;
      sc.load_by_region = Eigen::ArrayXd::Zero(nr);
      sc.cf_by_generator = Eigen::ArrayXd::Ones(ng);
      for (int r = 0; r < nr; ++r) {
        double sum = 0.0;
        for (int h : members[s]) sum += ds.regions[r].load_series.at(y, h);
        sc.load_by_region[r] = sum / sc.duration_hours;
      }
      for (int g = 0; g < ng; ++g) {
        if (!ds.generators[g].has_cf()) continue;
        double sum = 0.0;
        for (int h : members[s]) sum += ds.generators[g].cf_series.at(y, h);
        sc.cf_by_generator[g] = sum / sc.duration_hours;
      }
      sc.system_load = sc.load_by_region.sum();
    }
  }
  return set;
}

namespace {

Eigen::ArrayXd system_total_load(const SystemDataset& ds, int year) {
  Eigen::ArrayXd total = Eigen::ArrayXd::Zero(ds.horizon.hours_per_year);
  for (const auto& r : ds.regions) total += r.load_series.year(year);
  return total;
}

ChronologyMap build_map(const SystemDataset& ds, int n_load_blocks, int n_wind_bins,
                        double peak_fraction) {
  ChronologyMap map;
  map.hour_to_scenario.resize(ds.horizon.n_years);
  for (int y = 0; y < ds.horizon.n_years; ++y) {
    const BlockFit fit = fit_load_blocks(system_total_load(ds, y), n_load_blocks, peak_fraction);
    if (n_wind_bins == 1) {
      map.hour_to_scenario[y] = fit.hour_to_block;
    } else {
      map.hour_to_scenario[y] =
          split_sub_scenarios(fit.hour_to_block, system_wind_cf(ds, y), n_wind_bins);
    }
  }
  return map;
}

}  // namespace

ScenarioSet build_scenarios(const SystemDataset& ds, int n_load_blocks,
                            int n_wind_bins, double peak_fraction) {
  ScenarioSet set = synchronize(ds, build_map(ds, n_load_blocks, n_wind_bins, peak_fraction));
  set.n_load_blocks = n_load_blocks;
  set.n_wind_bins = n_wind_bins;
  return set;
}

ScenarioSet build_nonsync_scenarios(const SystemDataset& ds, int n_load_blocks,
                                    double peak_fraction) {
  ScenarioSet set = build_scenarios(ds, n_load_blocks, 2, peak_fraction);

  // Replace each wind generator's cf with the mean of its own low/high
  // half inside every load block, sorted per generator independently.
  // Loads, probabilities and the hour partition stay as synchronized.
  for (int y = 0; y < ds.horizon.n_years; ++y) {
    const BlockFit fit =
        fit_load_blocks(system_total_load(ds, y), n_load_blocks, peak_fraction);
    const auto& assign = set.map.hour_to_scenario[y];
    const int n_blocks = static_cast<int>(fit.values.size());

    std::vector<std::vector<int>> block_hours(n_blocks);
    for (size_t h = 0; h < assign.size(); ++h)
      block_hours[fit.hour_to_block[h]].push_back(static_cast<int>(h));

    for (int b = 0; b < n_blocks; ++b) {
      const auto& hours = block_hours[b];
      int s_low = assign[hours[0]], s_high = assign[hours[0]];
      for (int h : hours) {
        s_low = std::min(s_low, assign[h]);
        s_high = std::max(s_high, assign[h]);
      }
      int low_count = 0;
      for (int h : hours)
        if (assign[h] == s_low) ++low_count;

      for (size_t g = 0; g < ds.generators.size(); ++g) {
        const auto& gen = ds.generators[g];
        if (gen.kind != GeneratorKind::wind || !gen.has_cf()) continue;
        std::vector<int> sorted = hours;
        std::sort(sorted.begin(), sorted.end(), [&](int a, int c) {
          const double va = gen.cf_series.at(y, a), vc = gen.cf_series.at(y, c);
          if (va != vc) return va < vc;
          return a < c;
        });
        double low_sum = 0.0, high_sum = 0.0;
        for (int i = 0; i < static_cast<int>(sorted.size()); ++i)
          (i < low_count ? low_sum : high_sum) += gen.cf_series.at(y, sorted[i]);
        set.years[y][s_low].cf_by_generator[g] = low_sum / low_count;
        if (s_high != s_low)
          set.years[y][s_high].cf_by_generator[g] =
              high_sum / (static_cast<int>(sorted.size()) - low_count);
      }
    }
  }
  return set;
}

}  // namespace coex
