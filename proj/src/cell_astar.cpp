#include "cellplan/cell_astar.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace cellplan {

void PlanParams::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (!(w1 > 0.0)) fail("w1 must be > 0");
  if (!(w2 >= 0.0)) fail("w2 must be >= 0");
  if (cellsize_min < 3 || cellsize_min % 2 == 0)
    fail("cellsize_min must be odd and >= 3");
  if (cellsize_max < cellsize_min || cellsize_max % 2 == 0)
    fail("cellsize_max must be odd and >= cellsize_min");
  if (!(gridsize > 0.0)) fail("gridsize must be > 0");
  if (!(bigstep >= gridsize)) fail("bigstep must be >= gridsize");
  if (!(avoidance_range >= 0.0)) fail("avoidance_range must be >= 0");
  if (!(goal_tolerance > 0.0)) fail("goal_tolerance must be > 0");
  if (max_steps <= 0) fail("max_steps must be > 0");
  if (!(w_g >= 0.0 && w_g <= 1.0)) fail("w_g must be in [0, 1]");
}

SearchCell gen_search_cell(const Point3& center, int cellsize, double gridsize,
                           const Point3& goal_dir, int dim) {
  if (cellsize < 3 || cellsize % 2 == 0)
    throw std::invalid_argument("cellsize must be odd and >= 3");
  if (!(gridsize > 0.0)) throw std::invalid_argument("gridsize must be > 0");
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");

  const std::array<double, 3> d{goal_dir.x, goal_dir.y, goal_dir.z};
  int axis = 0;
  double best = -1.0;
  for (int i = 0; i < dim; ++i) {
    if (std::abs(d[i]) > best) {
      best = std::abs(d[i]);
      axis = i;
    }
  }
  if (best == 0.0)
    throw std::invalid_argument("goal direction must be nonzero");

  SearchCell cell;
  cell.center = center;
  cell.cellsize = cellsize;
  cell.gridsize = gridsize;
  cell.dim = dim;
  cell.axis = axis;
  cell.dir = d[axis] >= 0.0 ? 1 : -1;

  const int h = cell.half();
  cell.layers.assign(h + 1, {});
  const int klo = dim == 3 ? -h : 0;
  const int khi = dim == 3 ? h : 0;
  for (int i = -h; i <= h; ++i) {
    for (int j = -h; j <= h; ++j) {
      for (int k = klo; k <= khi; ++k) {
        const std::array<int, 3> off{i, j, k};
        const Point3 node = center + gridsize * Point3{double(i), double(j),
                                                       double(k)};
        const int index = static_cast<int>(cell.nodes.size());
        cell.nodes.push_back(node);
        cell.offsets.push_back(off);
        const int toward = off[axis] * cell.dir;
        if (toward < 0) continue;
        if (toward == 0 && i == 0 && j == 0 && k == 0) continue;
        cell.layers[toward].push_back(index);
      }
    }
  }
  return cell;
}

int safe_to_pass(const OccupancyWorld& w, const Point3& p_t,
                 const Point3& node) {
  if (is_occupied(w, node)) return -1;
  return segment_clear(w, p_t, node) ? 1 : -1;
}

double node_cost(const Point3& node, const Point3& start, const Point3& goal,
                 double w1, double w2, int sign) {
  return w1 * heuristic_h(node, goal) +
         sign * w2 * line_dist(node, {start, goal});
}

int onward_sign(const OccupancyWorld& w, const Point3& node,
                const Point3& goal, double probe_len) {
  if (is_occupied(w, node)) return -1;
  const Point3 d = goal - node;
  const double dist = norm(d);
  if (dist <= 1e-12) return 1;
  const double len = std::min(dist, probe_len);
  return segment_clear(w, node, node + (len / dist) * d) ? 1 : -1;
}

namespace {

int transverse_deviation(const SearchCell& cell, const std::array<int, 3>& a,
                         const std::array<int, 3>& b) {
  int dev = 0;
  for (int t = 0; t < cell.dim; ++t) {
    if (t == cell.axis) continue;
    dev = std::max(dev, std::abs(a[t] - b[t]));
  }
  return dev;
}

// Exploration step taken while boxed in: goal pursuit is suspended and the
// whole largest cube is scored for separation from the pose where progress
// stalled, with goal distance only breaking ties.
StepResult escape_step(const OccupancyWorld& w, const Point3& p,
                       const Point3& anchor, const Point3& goal,
                       const PlanParams& params, int dim) {
  StepResult result;
  result.mode = 'A';
  result.cellsize_used = params.cellsize_max;
  const SearchCell cell = gen_search_cell(p, params.cellsize_max,
                                          params.gridsize, goal - p, dim);
  int best = -1;
  double best_sep = 0.0, best_goal = 0.0;
  for (std::size_t index = 0; index < cell.nodes.size(); ++index) {
    ++result.nodes_evaluated;
    const auto& off = cell.offsets[index];
    if (off[0] == 0 && off[1] == 0 && off[2] == 0) continue;
    const Point3& node = cell.nodes[index];
    if (is_occupied(w, node)) continue;
    if (!segment_clear(w, p, node)) continue;
    const double sep = euclid_dist(node, anchor);
    const double to_goal = euclid_dist(node, goal);
    if (best < 0 || sep > best_sep + 1e-12 ||
        (sep > best_sep - 1e-12 && to_goal < best_goal)) {
      best = static_cast<int>(index);
      best_sep = sep;
      best_goal = to_goal;
    }
  }
  if (best < 0) {
    result.stuck = true;
    result.tried_cellsizes.push_back(params.cellsize_max);
    return result;
  }
  result.path.waypoints.push_back(cell.nodes[best]);
  result.path.costs.push_back(-best_sep);
  return result;
}

}  // namespace

CellPath select_cell_path(const SearchCell& cell, const OccupancyWorld& w,
                          const Point3& start, const Point3& goal,
                          const PlanParams& params, SelectMode mode,
                          long* evaluated) {
  CellPath path;
  const int max_waypoints = cell.cellsize - 1;
  const int first_layer = mode == SelectMode::Avoidance ? 0 : 1;
  const double probe_len = params.avoidance_range + w.resolution();
  std::array<int, 3> prev_off{0, 0, 0};
  Point3 prev_pt = cell.center;

  for (int layer = first_layer;
       layer <= cell.half() &&
       static_cast<int>(path.waypoints.size()) < max_waypoints;
       ++layer) {
    int best_index = -1;
    double best_cost = 0.0;
    int best_dev = 0;
    for (int index : cell.layers[layer]) {
      if (evaluated) ++*evaluated;
      const std::array<int, 3>& off = cell.offsets[index];
      if (!path.waypoints.empty() &&
          transverse_deviation(cell, off, prev_off) > 1)
        continue;
      const Point3& node = cell.nodes[index];
      if (is_occupied(w, node)) continue;
      if (!segment_clear(w, prev_pt, node)) continue;
      int sign = 1;
      if (mode == SelectMode::Avoidance && !params.membership_sign_only)
        sign = onward_sign(w, node, goal, probe_len);
      const double cost =
          node_cost(node, start, goal, params.w1, params.w2, sign);
      const int dev = transverse_deviation(cell, off, prev_off);
      if (best_index < 0 || cost < best_cost ||
          (cost == best_cost && dev < best_dev)) {
        best_index = index;
        best_cost = cost;
        best_dev = dev;
      }
    }
    // A pick-less layer ends the selection; the prefix found so far is
    // still executable and lets pure-lateral slides make progress when the
    // forward slices are blocked.
    if (best_index < 0) break;
    path.waypoints.push_back(cell.nodes[best_index]);
    path.costs.push_back(best_cost);
    prev_off = cell.offsets[best_index];
    prev_pt = cell.nodes[best_index];
  }
  return path;
}

StepResult plan_step(OccupancyWorld& w, const Point3& p_t, const Point3& start,
                     const Point3& goal, const std::vector<Point3>& prev_path,
                     const PlanParams& params) {
  const int dim = w.dimensionality();
  StepResult result;

  // Terminal hop: jump straight to the goal once it is one step away.
  const double goal_dist = euclid_dist(p_t, goal);
  if (goal_dist <= params.bigstep && segment_clear(w, p_t, goal)) {
    result.path.waypoints.push_back(goal);
    result.path.costs.push_back(
        node_cost(goal, start, goal, params.w1, params.w2, 1));
    result.mode = 'F';
    result.nodes_evaluated = 1;
    result.cellsize_used = params.cellsize_min;
    return result;
  }

  // Probe the rest of the current plan plus the dash to the goal.
  std::vector<Point3> probe = prev_path;
  probe.push_back(goal);
  const auto obstacle_at = nearest_obstacle_on_path(
      w, probe, p_t, params.avoidance_range + w.resolution());
  const bool fast_ok = !obstacle_at || *obstacle_at > params.avoidance_range;

  if (fast_ok) {
    result.mode = 'F';
    result.cellsize_used = params.cellsize_min;
    Point3 cur = p_t;
    const int hops = params.cellsize_min - 1;
    for (int hop = 0; hop < hops; ++hop) {
      const SearchCell cell = gen_search_cell(cur, params.cellsize_min,
                                              params.bigstep, goal - cur, dim);
      CellPath leg = select_cell_path(cell, w, start, goal, params,
                                      SelectMode::Fast,
                                      &result.nodes_evaluated);
      if (leg.empty()) break;
      for (std::size_t i = 0; i < leg.waypoints.size(); ++i) {
        result.path.waypoints.push_back(leg.waypoints[i]);
        result.path.costs.push_back(leg.costs[i]);
      }
      cur = result.path.waypoints.back();
      if (static_cast<int>(result.path.waypoints.size()) >= hops) break;
      if (euclid_dist(cur, goal) <= params.bigstep) break;
    }
    if (!result.path.empty()) return result;
  }

  // Obstacles ahead (or fast mode boxed in): escalate avoidance cells.
  result.mode = 'A';
  result.path = {};
  for (int size = params.cellsize_min; size <= params.cellsize_max;
       size += 2) {
    result.tried_cellsizes.push_back(size);
    const SearchCell cell =
        gen_search_cell(p_t, size, params.gridsize, goal - p_t, dim);
    CellPath candidate = select_cell_path(cell, w, start, goal, params,
                                          SelectMode::Avoidance,
                                          &result.nodes_evaluated);
    if (!candidate.empty()) {
      result.path = candidate;
      result.cellsize_used = size;
      return result;
    }
  }
  result.stuck = true;
  return result;
}

PlanResult plan(OccupancyWorld& w, const Point3& start, const Point3& goal,
                const PlanParams& params,
                const std::optional<SensorConfig>& sensor) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult result;
  result.trajectory.start = start;
  RunMetrics& m = result.metrics;
  m.outcome = Outcome::Timeout;

  Point3 p = start;
  std::vector<Point3> remaining;
  std::vector<Point3> past;
  int explore_left = 0;
  Point3 anchor = start;

  if (euclid_dist(start, goal) <= params.goal_tolerance) {
    m.outcome = Outcome::Success;
  } else {
    for (int step = 1; step <= params.max_steps; ++step) {
      if (sensor) reveal(w, p, *sensor);
      // An exploration episode ends early once the dash to the goal has no
      // obstacle inside the avoidance horizon; goal pursuit resumes at once.
      if (explore_left > 0) {
        const Point3 dash[] = {goal};
        const auto front = nearest_obstacle_on_path(
            w, dash, p, params.avoidance_range + w.resolution());
        if (!front || *front > params.avoidance_range) explore_left = 0;
      }
      const bool exploring = explore_left > 0;
      StepResult sr =
          exploring ? escape_step(w, p, anchor, goal, params,
                                  w.dimensionality())
                    : plan_step(w, p, start, goal, remaining, params);
      if (exploring) --explore_left;
      ++m.steps;
      m.nodes_per_step.push_back(sr.nodes_evaluated);
      m.nodes_total += sr.nodes_evaluated;
      m.step_modes += sr.mode;
      result.step_traces.push_back(
          {step, sr.mode, p, sr.cellsize_used,
           sr.mode == 'F' ? params.bigstep : params.gridsize});

      if (sr.stuck) {
        std::ostringstream os;
        os << "plan stuck at (" << p.x << ", " << p.y << ", " << p.z
           << "); tried cell sizes";
        for (int s : sr.tried_cellsizes) os << " " << s;
        m.detail = os.str();
        m.outcome = Outcome::Failed;
        break;
      }

      bool arrived = false;
      std::size_t executed = 0;
      for (const Point3& wp : sr.path.waypoints) {
        if (!segment_clear(w, p, wp)) break;
        p = wp;
        result.trajectory.points.push_back(wp);
        ++executed;
        if (sensor) reveal(w, p, *sensor);
        if (euclid_dist(p, goal) <= params.goal_tolerance) {
          arrived = true;
          break;
        }
      }
      remaining.assign(sr.path.waypoints.begin() + executed,
                       sr.path.waypoints.end());
      if (arrived) {
        m.outcome = Outcome::Success;
        break;
      }
      // An avoidance step that lands where the agent stood one or two steps
      // ago is livelocked by the cost arithmetic, not sliding along a face;
      // commit to exploring away from here for the next steps.
      if (!exploring && sr.mode == 'A') {
        bool revisit = false;
        for (std::size_t back = 1; back <= 2 && back <= past.size(); ++back)
          if (euclid_dist(p, past[past.size() - back]) <
              0.5 * params.gridsize)
            revisit = true;
        if (revisit) {
          anchor = p;
          explore_left = params.cellsize_max;
          remaining.clear();
        }
      }
      past.push_back(p);
    }
  }

  if (m.outcome == Outcome::Timeout)
    m.detail = "max_steps exhausted at " + std::to_string(params.max_steps);
  m.path_length_m = result.trajectory.length();
  m.path_nodes = static_cast<long>(result.trajectory.points.size()) + 1;
  m.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace cellplan
