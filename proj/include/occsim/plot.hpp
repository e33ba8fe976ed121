#pragma once

#include <iosfwd>
#include <string>

#include "occsim/sweeps.hpp"

namespace occsim {

/// Renders a sweep table as a simple SVG line chart (one polyline per data
/// column, swept value on x).
void write_sweep_svg(std::ostream& out, const SweepTable& table, const std::string& title);

} // namespace occsim
