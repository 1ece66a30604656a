#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cellplan/trajectory.hpp"
#include "cellplan/world.hpp"

namespace cellplan {

struct PlanParams {
  double w1 = 1.0;   // goal-distance weight
  double w2 = 0.5;   // line-distance weight
  int cellsize_min = 3;
  int cellsize_max = 5;
  double gridsize = 0.5;        // node spacing in avoidance mode
  double bigstep = 1.0;         // node spacing in fast mode
  double avoidance_range = 2.5; // obstacle distance that triggers avoidance
  double goal_tolerance = 0.5;
  int max_steps = 500;
  // Weight of the distance-from-step-start term used by the constrained
  // (Ackermann) variant; ignored by the holonomic planner.
  double w_g = 0.5;
  // When set, the cost sign comes from node occupancy alone (and is thus +1
  // for every selectable node) instead of the onward-corridor probe.
  bool membership_sign_only = false;

  void validate() const;
};

// Local sampling lattice: cellsize^dim nodes spaced gridsize apart, centered
// on the agent, sliced into layers perpendicular to the dominant goal axis.
// layers[0] holds the agent's own slice minus the center node; layers[k] for
// k >= 1 is the full slice k steps toward the goal.
struct SearchCell {
  Point3 center;
  int cellsize = 3;
  double gridsize = 1.0;
  int dim = 3;
  int axis = 0;  // dominant axis index: 0 = x, 1 = y, 2 = z
  int dir = 1;   // +1 if the goal lies toward positive axis values
  std::vector<Point3> nodes;
  std::vector<std::array<int, 3>> offsets;
  std::vector<std::vector<int>> layers;

  int half() const { return (cellsize - 1) / 2; }
};

SearchCell gen_search_cell(const Point3& center, int cellsize, double gridsize,
                           const Point3& goal_dir, int dim);

// +1 when node is free and the straight corridor from p_t reaches it, else -1.
int safe_to_pass(const OccupancyWorld& w, const Point3& p_t,
                 const Point3& node);

// Cost-sign probe used in avoidance mode: +1 when the node is free and the
// corridor from the node onward toward the goal (clipped to probe_len) is
// clear, else -1. The negative sign rewards lateral spread around obstacles.
int onward_sign(const OccupancyWorld& w, const Point3& node,
                const Point3& goal, double probe_len);

// Two-term nodal cost: w1 * H + sign * w2 * L.
double node_cost(const Point3& node, const Point3& start, const Point3& goal,
                 double w1, double w2, int sign);

enum class SelectMode { Fast, Avoidance };

struct CellPath {
  std::vector<Point3> waypoints;
  std::vector<double> costs;

  bool empty() const { return waypoints.empty(); }
};

// Picks one node per layer by minimum nodal cost, keeping consecutive picks
// within one transverse lattice step of each other and every hop clear of
// known obstacles. A layer with no valid candidate ends the selection; the
// prefix picked so far is returned (empty when the first layer fails), so a
// blocked forward slice still allows lateral progress in avoidance mode.
// In avoidance mode the cost sign turns negative for nodes whose onward
// corridor toward the goal is compromised, rewarding lateral spread.
// evaluated counts every node examined.
CellPath select_cell_path(const SearchCell& cell, const OccupancyWorld& w,
                          const Point3& start, const Point3& goal,
                          const PlanParams& params, SelectMode mode,
                          long* evaluated);

struct StepResult {
  CellPath path;
  char mode = 'F';  // 'F' fast, 'A' avoidance
  long nodes_evaluated = 0;
  int cellsize_used = 0;
  std::vector<int> tried_cellsizes;
  bool stuck = false;
};

// One receding-horizon replanning step from p_t. prev_path carries the
// not-yet-executed tail of the previous step's plan for the obstacle probe.
StepResult plan_step(OccupancyWorld& w, const Point3& p_t, const Point3& start,
                     const Point3& goal, const std::vector<Point3>& prev_path,
                     const PlanParams& params);

// Full receding-horizon run. Passing a sensor enables semi-known operation;
// without one the planner acts on whatever the world already knows.
PlanResult plan(OccupancyWorld& w, const Point3& start, const Point3& goal,
                const PlanParams& params,
                const std::optional<SensorConfig>& sensor = std::nullopt);

}  // namespace cellplan
