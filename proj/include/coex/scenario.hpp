#pragma once

// Reduces chronological load/wind/solar series to a small set of
// per-year operating scenarios: least-squares load-duration blocking,
// system-wide wind capacity factor, quantile sub-scenario splitting,
// and chronology-preserving synchronization of all regional series.

#include <Eigen/Core>
#include <vector>

#include "coex/dataset.hpp"

namespace coex {

// Per year, hour index -> scenario index. Every hour is assigned to
// exactly one scenario; indices are contiguous from 0 within each year.
struct ChronologyMap {
  std::vector<std::vector<int>> hour_to_scenario;  // [year][hour]

  int n_scenarios(int year) const {
    int mx = -1;
    for (int s : hour_to_scenario[year]) mx = std::max(mx, s);
    return mx + 1;
  }
};

struct Scenario {
  double probability = 0.0;  // member hours / T
  int duration_hours = 0;
  Eigen::ArrayXd load_by_region;    // MW, mean over member hours
  Eigen::ArrayXd cf_by_generator;   // mean cf over member hours; 1.0 where no profile
  double system_load = 0.0;         // sum of regional loads
};

struct ScenarioSet {
  std::vector<std::vector<Scenario>> years;  // [year][scenario]
  ChronologyMap map;
  int n_load_blocks = 0;
  int n_wind_bins = 0;
};

struct LoadDurationCurve {
  Eigen::ArrayXd values;   // non-increasing
  std::vector<int> hours;  // source hour of each sorted value
};

struct BlockFit {
  Eigen::ArrayXd values;         // per-block mean load
  Eigen::ArrayXd probabilities;  // member count / T
  std::vector<int> hour_to_block;
};

// Stable descending sort; equal values keep ascending hour order.
LoadDurationCurve load_duration_curve(const Eigen::ArrayXd& series);

// Block 0 is the preserved peak: the top ceil(peak_fraction*T) hours of
// the duration curve. Remaining hours are split into n_blocks-1
// contiguous duration-curve segments minimizing total squared deviation
// from segment means (exact dynamic program). n_blocks == 1 collapses to
// a single all-hours block. Throws std::invalid_argument when
// n_blocks > T or peak_fraction is outside (0, 1/n_blocks].
BlockFit fit_load_blocks(const Eigen::ArrayXd& system_load, int n_blocks,
                         double peak_fraction);

// Capacity-weighted mean wind cf per region, combined across regions with
// weights proportional to target_wind_caps. Regions without a wind
// profile are dropped from the weighting. Throws when every effective
// weight is zero.
Eigen::ArrayXd system_wind_cf(const SystemDataset& ds, int year);

// Splits each block's hours into n_bins contiguous groups after sorting
// ascending by (cf value, hour index); group sizes as equal as possible,
// larger groups first. Scenario indices run block-major and stay
// contiguous even when a short block yields fewer than n_bins groups.
std::vector<int> split_sub_scenarios(const std::vector<int>& hour_to_block,
                                     const Eigen::ArrayXd& system_cf, int n_bins);

// Averages every region's load and every profiled generator's cf over
// each scenario's member hours. Probability = member count / T.
ScenarioSet synchronize(const SystemDataset& ds, const ChronologyMap& map);

// Full pipeline: per-year block fit on system-total load, sub-scenario
// split on the system wind cf, then synchronize.
ScenarioSet build_scenarios(const SystemDataset& ds, int n_load_blocks,
                            int n_wind_bins, double peak_fraction = 0.01);

// Two wind states per load block sharing the synchronized hour partition,
// but each wind generator's cf is averaged over its own independently
// sorted low/high half -- deliberately discarding cross-region wind
// correlation. Loads and probabilities match the synchronized case.
ScenarioSet build_nonsync_scenarios(const SystemDataset& ds, int n_load_blocks,
                                    double peak_fraction = 0.01);

}  // namespace coex
