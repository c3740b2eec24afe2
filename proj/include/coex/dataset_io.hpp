#pragma once

// Dataset directory layout:
//   config.json       horizon, reserve import credit, target wind caps,
//                     optional scenario/solver defaults
//   regions.csv       id,voll,reserve_margin,rps,load_series
//   generators.csv    id,region,kind,renewable,unit_capacity,... ,cf_series
//   interfaces.csv    id,from_region,to_region,unit_capacity,...
//   series/<id>.csv   year,hour,value (0-based indices, full coverage)
//
// Per-year cells are ';'-separated lists; a scalar cell broadcasts to
// every year. reserve_margin also accepts "frac:<list>" to specify a
// fraction of that region's annual peak instead of MW. Schemas are
// strict: unknown or missing columns and config keys are errors.

#include <cstdint>
#include <string>

#include "coex/dataset.hpp"

namespace coex {

struct CaseDefaults {
  int n_load_blocks = 8;
  int n_wind_bins = 1;
  double peak_fraction = 0.01;
  double gap = 1e-6;
  long node_limit = 200000;
};

SystemDataset read_dataset(const std::string& dir, CaseDefaults* defaults = nullptr);

void write_dataset(const std::string& dir, const SystemDataset& ds,
                   const CaseDefaults* defaults = nullptr);

// FNV-1a over every dataset file's name and bytes, in sorted-name order;
// lets bundles detect cross-dataset comparisons.
std::uint64_t dataset_fingerprint(const std::string& dir);

}  // namespace coex
