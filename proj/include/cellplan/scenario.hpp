#pragma once

#include <optional>
#include <string>

#include "cellplan/ackermann.hpp"
#include "cellplan/cell_astar.hpp"
#include "cellplan/hybrid_astar.hpp"
#include "cellplan/world.hpp"

namespace cellplan {

// Declarative benchmark case. Text form is line-oriented `key: value` with
// '#' comments; the first data line must be `schema: scenario/1`. Unknown or
// duplicate keys are format errors.
struct Scenario {
  std::string name;
  // Either a path relative to the scenario file or
  // random:<cols>x<rows>:density=<d>:seed=<n>.
  std::string map;
  std::string planner;  // cell_astar | cell_astar_ackermann | hybrid_astar |
                        // hybrid_astar_lattice | dstar_lite
  Point3 start;
  Point3 goal;
  double start_heading = 0.0;

  double resolution = 1.0;
  double inflation_radius = 0.5;
  bool semi_known = false;
  double sensor_range = 5.0;
  std::optional<std::pair<Point3, Point3>> bounds;

  PlanParams plan;
  HybridAStarParams hybrid;
  AckermannSampler sampler;
  AckermannPlanConfig ack;

  std::string source_dir;  // directory of the scenario file, for map paths
};

Scenario parse_scenario(const std::string& text,
                        const std::string& source_dir = ".");
Scenario load_scenario_file(const std::string& path);

// Instantiates the scenario's world (map file or generated random grid).
OccupancyWorld build_world(const Scenario& sc);

std::string serialize_scenario(const Scenario& sc);

}  // namespace cellplan
