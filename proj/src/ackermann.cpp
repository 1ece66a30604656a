#include "cellplan/ackermann.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace cellplan {

double AckermannSampler::max_steer() const {
  double m = 0.0;
  for (double s : steering_set) m = std::max(m, std::abs(s));
  return m;
}

void AckermannSampler::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (!(sample_dist > 0.0)) fail("sample_dist must be > 0");
  if (steering_set.empty()) fail("steering_set must not be empty");
  for (double s : steering_set)
    if (!(std::abs(s) < M_PI / 2)) fail("steering angles must be in (-pi/2, pi/2)");
  if (!(wheelbase > 0.0)) fail("wheelbase must be > 0");
  if (direction != 1 && direction != -1) fail("direction must be +1 or -1");
}

double normalize_angle(double theta) {
  double t = std::fmod(theta + M_PI, 2.0 * M_PI);
  if (t <= 0.0) t += 2.0 * M_PI;
  return t - M_PI;
}

AckermannState ackermann_arc(const AckermannState& s, double steer,
                             double dist, int dir, double wheelbase) {
  AckermannState n = s;
  n.d = dir;
  const double tan_steer = std::tan(steer);
  if (std::abs(tan_steer) < 1e-12) {
    n.x = s.x + dir * dist * std::cos(s.theta);
    n.y = s.y + dir * dist * std::sin(s.theta);
    return n;
  }
  const double radius = wheelbase / tan_steer;
  const double dtheta = dir * dist * tan_steer / wheelbase;
  n.theta = normalize_angle(s.theta + dtheta);
  n.x = s.x + radius * (std::sin(s.theta + dtheta) - std::sin(s.theta));
  n.y = s.y - radius * (std::cos(s.theta + dtheta) - std::cos(s.theta));
  return n;
}

std::vector<Point3> ackermann_arc_points(const AckermannState& s, double steer,
                                         double dist, int dir,
                                         double wheelbase, int k) {
  std::vector<Point3> pts;
  pts.reserve(k);
  for (int i = 1; i <= k; ++i) {
    const AckermannState at =
        ackermann_arc(s, steer, dist * i / k, dir, wheelbase);
    pts.push_back(at.pos());
  }
  return pts;
}

std::vector<AckermannState> ackermann_expand(const AckermannState& s,
                                             const AckermannSampler& sampler) {
  std::vector<AckermannState> out;
  out.reserve(sampler.steering_set.size());
  for (double steer : sampler.steering_set)
    out.push_back(ackermann_arc(s, steer, sampler.sample_dist,
                                sampler.direction, sampler.wheelbase));
  return out;
}

namespace {

// AllPlus/Auto/ForcedMinus score legs by the nodal cost; Escape suspends
// goal pursuit and rewards separation from the pose where progress stopped.
enum class SignPolicy { AllPlus, Auto, ForcedMinus, Escape };

struct Chain {
  std::vector<AckermannState> states;
  std::vector<double> steers;
};

// Greedy depth-limited chain of minimum-cost primitives. Stops early when a
// level has no collision-free child; a partial chain is still usable.
Chain sample_chain(const OccupancyWorld& w, const AckermannState& from,
                   const Point3& step_origin, const Point3& start,
                   const Point3& goal, const Point3& escape_from,
                   const PlanParams& params, const AckermannSampler& sampler,
                   int dir, int depth, SignPolicy policy, int substeps,
                   long* evaluated) {
  Chain chain;
  AckermannState cur = from;
  for (int level = 0; level < depth; ++level) {
    int best = -1;
    double best_cost = 0.0;
    for (std::size_t i = 0; i < sampler.steering_set.size(); ++i) {
      ++*evaluated;
      const double steer = sampler.steering_set[i];
      const AckermannState cand =
          ackermann_arc(cur, steer, sampler.sample_dist, dir,
                        sampler.wheelbase);
      bool blocked = false;
      for (const Point3& p :
           ackermann_arc_points(cur, steer, sampler.sample_dist, dir,
                                sampler.wheelbase, substeps)) {
        if (is_occupied(w, p)) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      double cost;
      if (policy == SignPolicy::Escape) {
        cost = -euclid_dist(cand.pos(), escape_from);
      } else {
        int sign = 1;
        if (policy == SignPolicy::ForcedMinus)
          sign = -1;
        else if (policy == SignPolicy::Auto)
          sign = params.membership_sign_only
                     ? 1
                     : onward_sign(w, cand.pos(), goal,
                                   params.avoidance_range + w.resolution());
        cost = node_cost(cand.pos(), start, goal, params.w1, params.w2, sign) +
               params.w_g * euclid_dist(cand.pos(), step_origin);
      }
      if (best < 0 || cost < best_cost) {
        best = static_cast<int>(i);
        best_cost = cost;
      }
    }
    if (best < 0) break;
    cur = ackermann_arc(cur, sampler.steering_set[best], sampler.sample_dist,
                        dir, sampler.wheelbase);
    chain.states.push_back(cur);
    chain.steers.push_back(sampler.steering_set[best]);
  }
  return chain;
}

}  // namespace

PlanResult plan_ackermann(OccupancyWorld& w, const AckermannState& start,
                          const Point3& goal, const PlanParams& params,
                          const AckermannSampler& sampler,
                          const AckermannPlanConfig& cfg,
                          const std::optional<SensorConfig>& sensor) {
  params.validate();
  sampler.validate();
  if (w.dimensionality() != 2)
    throw std::invalid_argument("plan_ackermann requires a 2-D world");
  if (cfg.k_explore < 1 || cfg.substeps < 1)
    throw std::invalid_argument("k_explore and substeps must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  PlanResult result;
  result.trajectory.start = start.pos();
  RunMetrics& m = result.metrics;
  m.outcome = Outcome::Timeout;

  const Point3 global_start = start.pos();
  AckermannState state = start;
  int cur_dir = sampler.direction;
  int explore_left = 0;
  Point3 anchor = start.pos();
  const int depth_base = std::max(1, params.cellsize_min - 1);
  const int depth_max = std::max(depth_base, params.cellsize_max - 1);

  if (euclid_dist(state.pos(), goal) <= params.goal_tolerance)
    m.outcome = Outcome::Success;

  for (int step = 1; m.outcome == Outcome::Timeout && step <= params.max_steps;
       ++step) {
    if (sensor) reveal(w, state.pos(), *sensor);

    // An exploration episode ends early once the way to the goal is open;
    // normal goal pursuit resumes immediately.
    if (explore_left > 0 && segment_clear(w, state.pos(), goal)) {
      explore_left = 0;
      cur_dir = 1;
    }
    const bool exploring = explore_left > 0;

    const std::vector<Point3> probe{goal};
    const auto obstacle_at = nearest_obstacle_on_path(
        w, probe, state.pos(), params.avoidance_range + w.resolution());
    const bool near =
        obstacle_at && *obstacle_at <= params.avoidance_range;

    const int depth = near || exploring ? depth_max : depth_base;

    // Escape ladder: current policy, then the flipped cost sign, then the
    // flipped drive direction with goal pursuit suspended.
    struct Attempt {
      SignPolicy policy;
      int dir;
    };
    std::vector<Attempt> attempts;
    if (exploring) {
      attempts.push_back({SignPolicy::Escape, cur_dir});
      attempts.push_back({SignPolicy::Escape, -cur_dir});
    } else {
      attempts.push_back(
          {near ? SignPolicy::Auto : SignPolicy::AllPlus, cur_dir});
      attempts.push_back({SignPolicy::ForcedMinus, cur_dir});
      attempts.push_back({SignPolicy::Escape, -cur_dir});
    }
    const Point3 escape_from = exploring ? anchor : state.pos();

    long evaluated = 0;
    Chain chain;
    std::size_t used_attempt = 0;
    for (std::size_t a = 0; a < attempts.size(); ++a) {
      chain = sample_chain(w, state, state.pos(), global_start, goal,
                           escape_from, params, sampler, attempts[a].dir,
                           a == 0 ? depth : depth_max, attempts[a].policy,
                           cfg.substeps, &evaluated);
      if (!chain.states.empty()) {
        used_attempt = a;
        break;
      }
    }

    ++m.steps;
    m.nodes_per_step.push_back(evaluated);
    m.nodes_total += evaluated;
    // A step only counts as fast when the plain forward attempt succeeded;
    // falling back to the escape ladder is avoidance work.
    const bool fast_step =
        !near && !exploring && used_attempt == 0 && !chain.states.empty();
    m.step_modes += fast_step ? 'F' : 'A';
    result.step_traces.push_back({step, m.step_modes.back(), state.pos(),
                                  depth + 1, sampler.sample_dist});

    if (chain.states.empty()) {
      std::ostringstream os;
      os << "vehicle stuck at (" << state.x << ", " << state.y << "), theta "
         << state.theta;
      m.detail = os.str();
      m.outcome = Outcome::Failed;
      break;
    }

    if (!exploring && used_attempt > 0) {
      // Progress stalled: explore away from here for the next k steps.
      anchor = state.pos();
      explore_left = cfg.k_explore;
    }
    if (attempts[used_attempt].dir != cur_dir) cur_dir = -cur_dir;

    // Teleport along the chain, recording densified arc samples.
    AckermannState at = state;
    bool arrived = false;
    bool blocked = false;
    for (std::size_t leg = 0;
         leg < chain.states.size() && !arrived && !blocked; ++leg) {
      const int dir = chain.states[leg].d;
      AckermannState leg_start = at;
      for (int i = 1; i <= cfg.substeps; ++i) {
        const AckermannState st =
            ackermann_arc(leg_start, chain.steers[leg],
                          sampler.sample_dist * i / cfg.substeps, dir,
                          sampler.wheelbase);
        if (is_occupied(w, st.pos())) {
          blocked = true;
          break;
        }
        at = st;
        result.trajectory.points.push_back(st.pos());
        if (euclid_dist(st.pos(), goal) <= params.goal_tolerance) {
          arrived = true;
          break;
        }
      }
      if (!blocked && !arrived && sensor) reveal(w, at.pos(), *sensor);
    }
    state = at;
    state.d = cur_dir;

    if (arrived) {
      m.outcome = Outcome::Success;
      break;
    }
    if (explore_left > 0 && --explore_left == 0) cur_dir = 1;
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
