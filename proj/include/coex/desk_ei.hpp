#pragma once

// Bundled synthetic study system: three regions, two interfaces, five
// years of week-per-year chronology. Region N is the load center; W has
// night-peaking wind (anti-correlated with load), E day-peaking wind
// (correlated). Interface capacity is scarce enough that high-wind hours
// congest, which is what separates the wind-averaging, synchronized and
// non-synchronized scenario treatments economically.

#include "coex/dataset.hpp"

namespace coex {

SystemDataset make_desk_ei(unsigned seed = 7);

}  // namespace coex
