#pragma once

#include <optional>
#include <vector>

#include "cellplan/cell_astar.hpp"
#include "cellplan/trajectory.hpp"
#include "cellplan/world.hpp"

namespace cellplan {

// Rear-axle bicycle-model state. d is the drive direction: +1 forward,
// -1 reverse.
struct AckermannState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  int d = 1;

  Point3 pos() const { return {x, y, 0.0}; }
};

struct AckermannSampler {
  double sample_dist = 1.0;            // arc length per motion primitive
  std::vector<double> steering_set;    // radians; 0 = straight
  double wheelbase = 2.0;
  int direction = 1;

  double max_steer() const;
  void validate() const;
};

// Normalizes to (-pi, pi].
double normalize_angle(double theta);

// Closed-form constant-steering arc of the given length.
AckermannState ackermann_arc(const AckermannState& s, double steer,
                             double dist, int dir, double wheelbase);

// Intermediate positions along the arc at fractions 1/k ... k/k.
std::vector<Point3> ackermann_arc_points(const AckermannState& s, double steer,
                                         double dist, int dir,
                                         double wheelbase, int k);

// One primitive per steering angle, using the sampler's direction.
std::vector<AckermannState> ackermann_expand(const AckermannState& s,
                                             const AckermannSampler& sampler);

struct AckermannPlanConfig {
  int k_explore = 3;  // steps the sign flip persists after an escape
  int substeps = 4;   // collision / trajectory samples per primitive
};

// Receding-horizon cell planner for the constrained 2-D variant. Chains
// greedy primitive picks to a depth tied to the cell size; when boxed in it
// first flips the line-distance sign and then the drive direction.
PlanResult plan_ackermann(OccupancyWorld& w, const AckermannState& start,
                          const Point3& goal, const PlanParams& params,
                          const AckermannSampler& sampler,
                          const AckermannPlanConfig& cfg = {},
                          const std::optional<SensorConfig>& sensor =
                              std::nullopt);

}  // namespace cellplan
