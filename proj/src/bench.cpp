#include "cellplan/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cellplan/dstar_lite.hpp"

namespace cellplan {

AuditReport audit_trajectory(const OccupancyWorld& w, const Trajectory& t) {
  AuditReport report;
  const std::vector<Point3> line = t.polyline();
  const double spacing = w.resolution() / 4.0;
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Point3 a = line[i];
    const Point3 b = line[i + 1];
    const double len = euclid_dist(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int s = (i == 0 ? 0 : 1); s <= n; ++s) {
      const double f = static_cast<double>(s) / n;
      const Point3 p = a + f * (b - a);
      if (w.occupied(p, ObstacleView::Truth)) {
        report.clean = false;
        report.first_hit = p;
        report.at_arclen = walked + f * len;
        return report;
      }
    }
    walked += len;
  }
  if (line.size() == 1 && w.occupied(line[0], ObstacleView::Truth)) {
    report.clean = false;
    report.first_hit = line[0];
  }
  return report;
}

RunRecord run_scenario(const Scenario& sc) {
  RunRecord record;
  record.scenario = sc;
  OccupancyWorld world = build_world(sc);

  if (world.occupied(sc.start, ObstacleView::Truth))
    throw FormatError("scenario '" + sc.name +
                      "': start is occupied in the true world");
  if (world.occupied(sc.goal, ObstacleView::Truth))
    throw FormatError("scenario '" + sc.name +
                      "': goal is occupied in the true world");

  std::optional<SensorConfig> sensor;
  if (sc.semi_known) sensor = SensorConfig{sc.sensor_range};

  if (sc.planner == "cell_astar") {
    record.result = plan(world, sc.start, sc.goal, sc.plan, sensor);
  } else if (sc.planner == "cell_astar_ackermann") {
    if (world.dimensionality() != 2)
      throw FormatError("scenario '" + sc.name +
                        "': cell_astar_ackermann needs a 2-D map");
    AckermannState s0{sc.start.x, sc.start.y, sc.start_heading,
                      sc.sampler.direction};
    record.result = plan_ackermann(world, s0, sc.goal, sc.plan, sc.sampler,
                                   sc.ack, sensor);
  } else if (sc.planner == "hybrid_astar") {
    if (world.dimensionality() != 2)
      throw FormatError("scenario '" + sc.name +
                        "': hybrid_astar needs a 2-D map");
    if (sc.semi_known)
      throw FormatError("scenario '" + sc.name +
                        "': hybrid_astar runs on known maps only");
    AckermannState s0{sc.start.x, sc.start.y, sc.start_heading,
                      sc.sampler.direction};
    record.result =
        hybrid_astar_plan(world, s0, sc.goal, sc.hybrid, sc.sampler);
  } else if (sc.planner == "hybrid_astar_lattice") {
    if (sc.semi_known)
      throw FormatError("scenario '" + sc.name +
                        "': hybrid_astar_lattice runs on known maps only");
    record.result =
        hybrid_astar_plan_lattice(world, sc.start, sc.goal, sc.hybrid);
  } else if (sc.planner == "dstar_lite") {
    if (world.dimensionality() != 2)
      throw FormatError("scenario '" + sc.name +
                        "': dstar_lite needs a 2-D map");
    record.result = dstar_lite_plan(world, world.cell_at(sc.start),
                                    world.cell_at(sc.goal), sensor);
  } else {
    throw FormatError("scenario '" + sc.name + "': unknown planner '" +
                      sc.planner + "'");
  }

  record.audit = audit_trajectory(world, record.result.trajectory);
  if (!record.audit.clean &&
      record.result.metrics.outcome == Outcome::Success) {
    record.result.metrics.outcome = Outcome::Failed;
    std::ostringstream os;
    os << "collision audit hit at (" << record.audit.first_hit.x << ", "
       << record.audit.first_hit.y << ", " << record.audit.first_hit.z
       << "), arc length " << record.audit.at_arclen;
    record.result.metrics.detail = os.str();
  }
  record.world = std::move(world);
  return record;
}

namespace {

std::string fixed3(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

ComparisonTable compare(const std::vector<RunRecord>& records) {
  ComparisonTable table;
  table.header = {"scenario",  "planner",     "outcome",
                  "time_s",    "length_m",    "path_nodes",
                  "nodes_total", "avg_nodes_per_step"};
  for (const RunRecord& r : records) {
    const RunMetrics& m = r.result.metrics;
    const double avg =
        m.nodes_per_step.empty()
            ? 0.0
            : static_cast<double>(m.nodes_total) / m.nodes_per_step.size();
    table.rows.push_back({r.scenario.name, r.scenario.planner,
                          to_string(m.outcome), fixed3(m.wall_time_s),
                          fixed3(m.path_length_m),
                          std::to_string(m.path_nodes),
                          std::to_string(m.nodes_total), fixed3(avg)});
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::string ComparisonTable::to_text() const {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i)
    width[i] = header[i].size();
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());

  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << row[i] << std::string(width[i] - row[i].size(), ' ');
      os << (i + 1 < row.size() ? "  " : "");
    }
    os << "\n";
  };
  emit(header);
  std::vector<std::string> rule;
  for (std::size_t wd : width) rule.push_back(std::string(wd, '-'));
  emit(rule);
  for (const auto& row : rows) emit(row);
  return os.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,x,y,z\n";
  long t = 0;
  for (const Point3& p : trajectory.points) {
    out += std::to_string(t++);
    out += ',';
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += ',';
    out += format_double(p.z);
    out += '\n';
  }
  return out;
}

std::string metrics_json(const RunMetrics& m) {
  nlohmann::json j;
  j["schema"] = "metrics/1";
  j["outcome"] = to_string(m.outcome);
  j["path_length_m"] = m.path_length_m;
  if (m.path_cost >= 0.0) j["path_cost"] = m.path_cost;
  j["path_nodes"] = m.path_nodes;
  j["nodes_evaluated_total"] = m.nodes_total;
  j["nodes_evaluated_per_step"] = m.nodes_per_step;
  j["steps"] = m.steps;
  if (!m.step_modes.empty()) j["step_modes"] = m.step_modes;
  if (!m.detail.empty()) j["detail"] = m.detail;
  return j.dump(2) + "\n";
}

void export_run(const RunMetrics& metrics, const Trajectory& trajectory,
                const std::string& out_dir, const std::string& base) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_text_file((dir / (base + "_trajectory.csv")).string(),
                  trajectory_csv(trajectory));
  write_text_file((dir / (base + "_metrics.json")).string(),
                  metrics_json(metrics));
}

}  // namespace cellplan
