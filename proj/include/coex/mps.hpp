#pragma once

// Free-format MPS export/import and a CSV solution importer. The
// exporter writes catalog order deterministically (shortest round-trip
// number formatting), so identical models produce byte-identical text.

#include <string>
#include <vector>

#include "coex/branch_and_bound.hpp"
#include "coex/linear_model.hpp"

namespace coex {

std::string export_mps(const LinearModel& m, const std::string& name = "COEX");

// Accepts ROWS/COLUMNS/RHS/RANGES/BOUNDS with INTORG/INTEND markers.
// Ranged rows split into a base row plus a "<name>__rng" companion.
LinearModel parse_mps(const std::string& text);

// CSV of (variable name, value); a header line is recognized and
// skipped. Unknown names are errors; variables absent from the file
// default to 0 and are reported through `warnings`. The objective is
// recomputed from the model, never read from the file.
MipSolution import_solution(const LinearModel& m, const std::string& csv_text,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace coex
