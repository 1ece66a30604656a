#include "cellplan/hybrid_astar.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace cellplan {

void HybridAStarParams::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (!(w_g >= 0.0 && w_g <= 1.0)) fail("w_g must be in [0, 1]");
  if (step_budget <= 0) fail("step_budget must be > 0");
  if (!(goal_tolerance > 0.0)) fail("goal_tolerance must be > 0");
  if (max_steps <= 0) fail("max_steps must be > 0");
  if (!(pos_bucket > 0.0)) fail("pos_bucket must be > 0");
  if (!(heading_bucket_deg > 0.0)) fail("heading_bucket_deg must be > 0");
  if (loop_threshold <= 0) fail("loop_threshold must be > 0");
  if (substeps <= 0) fail("substeps must be > 0");
  if (!(lattice_step > 0.0)) fail("lattice_step must be > 0");
}

namespace {

// Bucket key packing: three 21-bit signed fields.
std::int64_t pack_key(int a, int b, int c) {
  const std::int64_t mask = (1 << 21) - 1;
  return ((static_cast<std::int64_t>(a) & mask) << 42) |
         ((static_cast<std::int64_t>(b) & mask) << 21) |
         (static_cast<std::int64_t>(c) & mask);
}

std::int64_t state_bucket(const AckermannState& s,
                          const HybridAStarParams& params) {
  const double hb = params.heading_bucket_deg * M_PI / 180.0;
  const int bx = static_cast<int>(std::floor(s.x / params.pos_bucket));
  const int by = static_cast<int>(std::floor(s.y / params.pos_bucket));
  int bh = static_cast<int>(std::floor((s.theta + M_PI) / hb));
  const int wrap = std::max(1, static_cast<int>(std::ceil(2.0 * M_PI / hb)));
  bh = ((bh % wrap) + wrap) % wrap;
  return pack_key(bx, by, bh);
}

struct SearchNode {
  AckermannState state;
  int parent = -1;
  double steer = 0.0;
  double priority = 0.0;
};

struct OpenEntry {
  double priority;
  long seq;
  int index;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.seq > b.seq;
  }
};

}  // namespace

PlanResult hybrid_astar_plan(OccupancyWorld& w, const AckermannState& start,
                             const Point3& goal,
                             const HybridAStarParams& params,
                             const AckermannSampler& sampler) {
  params.validate();
  sampler.validate();
  if (w.dimensionality() != 2)
    throw std::invalid_argument("hybrid_astar_plan requires a 2-D world");

  const auto t0 = std::chrono::steady_clock::now();
  PlanResult result;
  result.trajectory.start = start.pos();
  RunMetrics& m = result.metrics;
  m.outcome = Outcome::Timeout;

  AckermannState state = start;
  std::unordered_map<std::int64_t, int> visit_counts;
  ++visit_counts[state_bucket(state, params)];

  if (euclid_dist(state.pos(), goal) <= params.goal_tolerance)
    m.outcome = Outcome::Success;

  for (int step = 1; m.outcome == Outcome::Timeout && step <= params.max_steps;
       ++step) {
    const Point3 call_start = state.pos();
    std::vector<SearchNode> pool;
    pool.push_back({state, -1, 0.0,
                    hybrid_heuristic(state.pos(), call_start, goal,
                                     params.w_g)});
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
    long seq = 0;
    open.push({pool[0].priority, seq++, 0});
    // Buckets close when expanded, not when generated, so a cheaper route
    // into a bucket still gets queued instead of being dropped at birth.
    std::unordered_set<std::int64_t> closed;

    long expansions = 0;
    int goal_node = -1;

    while (!open.empty() && expansions < params.step_budget &&
           goal_node < 0) {
      const OpenEntry top = open.top();
      open.pop();
      const AckermannState cur = pool[top.index].state;
      if (euclid_dist(cur.pos(), goal) <= params.goal_tolerance) {
        goal_node = top.index;
        break;
      }
      if (!closed.insert(state_bucket(cur, params)).second) continue;
      ++expansions;
      for (double steer : sampler.steering_set) {
        bool blocked = false;
        for (int i = 1; i <= params.substeps; ++i) {
          const AckermannState at = ackermann_arc(
              cur, steer, sampler.sample_dist * i / params.substeps,
              sampler.direction, sampler.wheelbase);
          if (is_occupied(w, at.pos())) {
            blocked = true;
            break;
          }
        }
        if (blocked) continue;
        const AckermannState child =
            ackermann_arc(cur, steer, sampler.sample_dist, sampler.direction,
                          sampler.wheelbase);
        if (closed.count(state_bucket(child, params))) continue;
        const int index = static_cast<int>(pool.size());
        const double priority =
            hybrid_heuristic(child.pos(), call_start, goal, params.w_g);
        pool.push_back({child, top.index, steer, priority});
        open.push({priority, seq++, index});
      }
    }

    ++m.steps;
    m.nodes_per_step.push_back(expansions);
    m.nodes_total += expansions;

    // Drive toward the best unexpanded node; entries whose bucket closed
    // after they were queued are stale duplicates, not frontier.
    int target = goal_node;
    if (target < 0) {
      while (!open.empty() &&
             closed.count(state_bucket(pool[open.top().index].state, params)))
        open.pop();
      target = open.empty() ? 0 : open.top().index;
    }
    if (target == 0) {
      std::ostringstream os;
      os << "no expandable branch at (" << state.x << ", " << state.y << ")";
      m.detail = os.str();
      m.outcome = Outcome::Failed;
      break;
    }

    std::vector<int> branch;
    for (int at = target; at > 0; at = pool[at].parent) branch.push_back(at);
    std::reverse(branch.begin(), branch.end());
    // Unless the goal itself was reached, advance only one primitive toward
    // the frontier and replan: committing the whole branch would ride the
    // greedy search's mistakes to their end.
    if (goal_node < 0 && branch.size() > 1) branch.resize(1);

    bool arrived = false;
    AckermannState at = state;
    for (int node : branch) {
      const AckermannState leg_start = at;
      for (int i = 1; i <= params.substeps && !arrived; ++i) {
        const AckermannState st = ackermann_arc(
            leg_start, pool[node].steer,
            sampler.sample_dist * i / params.substeps, sampler.direction,
            sampler.wheelbase);
        at = st;
        result.trajectory.points.push_back(st.pos());
        if (euclid_dist(st.pos(), goal) <= params.goal_tolerance)
          arrived = true;
      }
      if (arrived) break;
    }
    state = at;

    if (arrived) {
      m.outcome = Outcome::Success;
      break;
    }

    const int visits = ++visit_counts[state_bucket(state, params)];
    if (visits > params.loop_threshold) {
      std::ostringstream os;
      os << "trapped near (" << state.x << ", " << state.y << "): bucket seen "
         << visits << " times";
      m.detail = os.str();
      m.outcome = Outcome::Failed;
      break;
    }
  }

  if (m.outcome == Outcome::Timeout) {
    m.detail = "max_steps exhausted at " + std::to_string(params.max_steps);
    m.outcome = Outcome::Failed;
  }
  m.path_length_m = result.trajectory.length();
  m.path_nodes = static_cast<long>(result.trajectory.points.size()) + 1;
  m.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

PlanResult hybrid_astar_plan_lattice(OccupancyWorld& w, const Point3& start,
                                     const Point3& goal,
                                     const HybridAStarParams& params) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult result;
  result.trajectory.start = start;
  RunMetrics& m = result.metrics;
  m.outcome = Outcome::Timeout;

  const int dim = w.dimensionality();
  const double step_len = params.lattice_step;
  std::vector<Point3> moves{{step_len, 0, 0}, {-step_len, 0, 0},
                            {0, step_len, 0}, {0, -step_len, 0}};
  if (dim == 3) {
    moves.push_back({0, 0, step_len});
    moves.push_back({0, 0, -step_len});
  }

  auto bucket_of = [&](const Point3& p) {
    return pack_key(static_cast<int>(std::floor(p.x / step_len + 0.5)),
                    static_cast<int>(std::floor(p.y / step_len + 0.5)),
                    static_cast<int>(std::floor(p.z / step_len + 0.5)));
  };

  Point3 state = start;
  std::unordered_map<std::int64_t, int> visit_counts;
  ++visit_counts[bucket_of(state)];

  if (euclid_dist(state, goal) <= params.goal_tolerance)
    m.outcome = Outcome::Success;

  struct LatticeNode {
    Point3 p;
    int parent;
    double priority;
  };

  for (int step = 1; m.outcome == Outcome::Timeout && step <= params.max_steps;
       ++step) {
    const Point3 call_start = state;
    std::vector<LatticeNode> pool;
    pool.push_back({state, -1,
                    hybrid_heuristic(state, call_start, goal, params.w_g)});
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
    long seq = 0;
    open.push({pool[0].priority, seq++, 0});
    // Buckets close when expanded, not when generated, so a cheaper route
    // into a bucket still gets queued instead of being dropped at birth.
    std::unordered_set<std::int64_t> closed;

    long expansions = 0;
    int goal_node = -1;

    while (!open.empty() && expansions < params.step_budget &&
           goal_node < 0) {
      const OpenEntry top = open.top();
      open.pop();
      const Point3 cur = pool[top.index].p;
      if (euclid_dist(cur, goal) <= params.goal_tolerance) {
        goal_node = top.index;
        break;
      }
      if (!closed.insert(bucket_of(cur)).second) continue;
      ++expansions;
      for (const Point3& mv : moves) {
        const Point3 child = cur + mv;
        if (!segment_clear(w, cur, child)) continue;
        if (closed.count(bucket_of(child))) continue;
        const int index = static_cast<int>(pool.size());
        const double priority =
            hybrid_heuristic(child, call_start, goal, params.w_g);
        pool.push_back({child, top.index, priority});
        open.push({priority, seq++, index});
      }
    }

    ++m.steps;
    m.nodes_per_step.push_back(expansions);
    m.nodes_total += expansions;

    // Drive toward the best unexpanded node; entries whose bucket closed
    // after they were queued are stale duplicates, not frontier.
    int target = goal_node;
    if (target < 0) {
      while (!open.empty() && closed.count(bucket_of(pool[open.top().index].p)))
        open.pop();
      target = open.empty() ? 0 : open.top().index;
    }
    if (target == 0) {
      std::ostringstream os;
      os << "no expandable branch at (" << state.x << ", " << state.y << ", "
         << state.z << ")";
      m.detail = os.str();
      m.outcome = Outcome::Failed;
      break;
    }

    std::vector<int> branch;
    for (int at = target; at > 0; at = pool[at].parent) branch.push_back(at);
    std::reverse(branch.begin(), branch.end());
    // Unless the goal itself was reached, advance only one move toward the
    // frontier and replan: committing the whole branch would ride the greedy
    // search's mistakes to their end.
    if (goal_node < 0 && branch.size() > 1) branch.resize(1);

    bool arrived = false;
    for (int node : branch) {
      state = pool[node].p;
      result.trajectory.points.push_back(state);
      if (euclid_dist(state, goal) <= params.goal_tolerance) {
        arrived = true;
        break;
      }
    }

    if (arrived) {
      m.outcome = Outcome::Success;
      break;
    }

    const int visits = ++visit_counts[bucket_of(state)];
    if (visits > params.loop_threshold) {
      std::ostringstream os;
      os << "trapped near (" << state.x << ", " << state.y << ", " << state.z
         << "): bucket seen " << visits << " times";
      m.detail = os.str();
      m.outcome = Outcome::Failed;
      break;
    }
  }

  if (m.outcome == Outcome::Timeout) {
    m.detail = "max_steps exhausted at " + std::to_string(params.max_steps);
    m.outcome = Outcome::Failed;
  }
  m.path_length_m = result.trajectory.length();
  m.path_nodes = static_cast<long>(result.trajectory.points.size()) + 1;
  m.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace cellplan
