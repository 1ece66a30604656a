#pragma once

#include <string>
#include <vector>

#include "cellplan/scenario.hpp"
#include "cellplan/trajectory.hpp"

namespace cellplan {

struct AuditReport {
  bool clean = true;
  Point3 first_hit;
  double at_arclen = 0.0;
};

// Checks the executed polyline against the true obstacle set at a quarter of
// the world resolution.
AuditReport audit_trajectory(const OccupancyWorld& w, const Trajectory& t);

struct RunRecord {
  Scenario scenario;
  PlanResult result;
  AuditReport audit;
  OccupancyWorld world;  // post-run state, reveals applied
};

// Builds the world, validates the endpoints, runs the scenario's planner and
// audits the outcome. A Success that collides with the truth is downgraded
// to Failed.
RunRecord run_scenario(const Scenario& sc);

struct ComparisonTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  std::string to_text() const;
};

ComparisonTable compare(const std::vector<RunRecord>& records);

// Writes <base>_trajectory.csv and <base>_metrics.json under out_dir. The
// metrics file carries no timing so repeated runs stay byte-identical.
void export_run(const RunMetrics& metrics, const Trajectory& trajectory,
                const std::string& out_dir, const std::string& base);

std::string trajectory_csv(const Trajectory& trajectory);
std::string metrics_json(const RunMetrics& metrics);

}  // namespace cellplan
