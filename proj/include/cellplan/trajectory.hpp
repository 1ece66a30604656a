#pragma once

#include <string>
#include <vector>

#include "cellplan/geometry.hpp"

namespace cellplan {

enum class Outcome { Success, Failed, Timeout, Unreachable };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Failed: return "failed";
    case Outcome::Timeout: return "timeout";
    case Outcome::Unreachable: return "unreachable";
  }
  return "unknown";
}

// Executed motion: the start pose plus every waypoint the agent moved to,
// in execution order. points excludes the start.
struct Trajectory {
  Point3 start;
  std::vector<Point3> points;

  bool empty() const { return points.empty(); }

  std::vector<Point3> polyline() const {
    std::vector<Point3> line;
    line.reserve(points.size() + 1);
    line.push_back(start);
    line.insert(line.end(), points.begin(), points.end());
    return line;
  }

  double length() const {
    double len = 0.0;
    Point3 prev = start;
    for (const Point3& p : points) {
      len += euclid_dist(prev, p);
      prev = p;
    }
    return len;
  }
};

struct RunMetrics {
  Outcome outcome = Outcome::Failed;
  double wall_time_s = 0.0;
  double path_length_m = 0.0;
  // Grid planners: canonical path cost (axial + sqrt(2) * diagonal). -1 when
  // not applicable.
  double path_cost = -1.0;
  long path_nodes = 0;
  long nodes_total = 0;
  std::vector<long> nodes_per_step;
  // One char per replanning step for the cell planner: 'F' fast, 'A' avoidance.
  std::string step_modes;
  int steps = 0;
  std::string detail;
};

// Per-step record of the search cell used, for plots and tests.
struct StepTrace {
  int step = 0;
  char mode = 'F';
  Point3 center;
  int cellsize = 0;
  double gridsize = 0.0;
};

struct PlanResult {
  Trajectory trajectory;
  RunMetrics metrics;
  std::vector<StepTrace> step_traces;
};

}  // namespace cellplan
