#pragma once

#include <vector>

#include "cellplan/ackermann.hpp"
#include "cellplan/trajectory.hpp"
#include "cellplan/world.hpp"

namespace cellplan {

struct HybridAStarParams {
  double w_g = 0.5;               // start-distance weight in the priority
  int step_budget = 60;           // node expansions per replanning call
  double goal_tolerance = 1.0;
  int max_steps = 200;
  double pos_bucket = 0.5;        // duplicate-detection position bucket;
                                  // coarser than half the primitive length
                                  // conflates adjacent tree levels
  double heading_bucket_deg = 10.0;
  int loop_threshold = 3;         // executed-state revisits before Failed
  int substeps = 4;               // samples per primitive
  double lattice_step = 1.0;      // edge length of the holonomic sampler

  void validate() const;
};

// Receding-horizon best-first search over Ackermann motion primitives with
// priority f + w_g * g. Each call expands at most step_budget nodes, then the
// vehicle advances one primitive toward the best frontier node and replans;
// a branch that reaches the goal is driven to its end.
PlanResult hybrid_astar_plan(OccupancyWorld& w, const AckermannState& start,
                             const Point3& goal, const HybridAStarParams& params,
                             const AckermannSampler& sampler);

// Same search over an axis-aligned lattice (4 moves in 2-D, 6 in 3-D).
PlanResult hybrid_astar_plan_lattice(OccupancyWorld& w, const Point3& start,
                                     const Point3& goal,
                                     const HybridAStarParams& params);

}  // namespace cellplan
