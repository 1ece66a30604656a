#pragma once

#include <span>
#include <string>

#include "cellplan/trajectory.hpp"
#include "cellplan/world.hpp"

namespace cellplan {

struct PlotLayers {
  bool obstacles = true;
  bool revealed = true;
  bool trajectory = true;
  bool markers = true;
  bool cells = false;
};

struct PlotSpec {
  double scale = 12.0;  // pixels per meter
  double margin = 24.0;
  PlotLayers layers;
  int cell_steps = 0;  // how many step traces to draw when layers.cells
};

// Deterministic SVG: 2-D worlds render one panel, 3-D worlds render an (x, y)
// panel over an (x, z) panel. revealed points draw brighter than unknown
// obstacles; markers sit at the trajectory's ends.
std::string render_svg(const OccupancyWorld& w,
                       std::span<const Point3> trajectory,
                       std::span<const Point3> revealed,
                       std::span<const StepTrace> traces,
                       const PlotSpec& spec);

}  // namespace cellplan
