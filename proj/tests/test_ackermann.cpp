#include "cellplan/ackermann.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cellplan/bench.hpp"
#include "cellplan/scenario.hpp"
#include "test_util.hpp"

using namespace cellplan;
using testutil::fixture;

namespace {

// Independent oracle: RK4 integration of the bicycle model
// x' = d cos(theta), y' = d sin(theta), theta' = d tan(steer) / wheelbase.
AckermannState rk4_arc(const AckermannState& s, double steer, double dist,
                       int dir, double wheelbase, int steps = 1000) {
  double x = s.x, y = s.y, th = s.theta;
  const double h = dist / steps;
  const double w = std::tan(steer) / wheelbase;
  for (int i = 0; i < steps; ++i) {
    auto f = [&](double theta) {
      return std::array<double, 3>{dir * std::cos(theta),
                                   dir * std::sin(theta), dir * w};
    };
    const auto k1 = f(th);
    const auto k2 = f(th + 0.5 * h * k1[2]);
    const auto k3 = f(th + 0.5 * h * k2[2]);
    const auto k4 = f(th + h * k3[2]);
    x += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    y += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    th += h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
  }
  AckermannState out;
  out.x = x;
  out.y = y;
  out.theta = normalize_angle(th);
  out.d = dir;
  return out;
}

// Menger curvature of three consecutive samples; exact 1/R for points on a
// circle of radius R.
double menger_curvature(const Point3& a, const Point3& b, const Point3& c) {
  const double ab = euclid_dist(a, b), bc = euclid_dist(b, c),
               ca = euclid_dist(c, a);
  if (ab * bc * ca == 0.0) return 0.0;
  const double area2 =
      std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  return 2.0 * area2 / (ab * bc * ca);
}

// Largest curvature along a trajectory, skipping direction-switch cusps.
double max_curvature(const Trajectory& t) {
  const std::vector<Point3> line = t.polyline();
  double worst = 0.0;
  for (std::size_t i = 2; i < line.size(); ++i) {
    const Point3 u = line[i - 1] - line[i - 2];
    const Point3 v = line[i] - line[i - 1];
    if (dot(u, v) <= 0.0) continue;  // cusp: gear change, not steering
    worst = std::max(worst,
                     menger_curvature(line[i - 2], line[i - 1], line[i]));
  }
  return worst;
}

bool has_cusp(const Trajectory& t) {
  const std::vector<Point3> line = t.polyline();
  for (std::size_t i = 2; i < line.size(); ++i) {
    const Point3 u = line[i - 1] - line[i - 2];
    const Point3 v = line[i] - line[i - 1];
    if (dot(u, v) < 0.0) return true;
  }
  return false;
}

}  // namespace

TEST(NormalizeAngle, WrapsToHalfOpenRange) {
  EXPECT_DOUBLE_EQ(normalize_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(normalize_angle(M_PI), M_PI);
  EXPECT_DOUBLE_EQ(normalize_angle(-M_PI), M_PI);
  EXPECT_NEAR(normalize_angle(3 * M_PI), M_PI, 1e-12);
  EXPECT_NEAR(normalize_angle(2 * M_PI), 0.0, 1e-12);
  EXPECT_NEAR(normalize_angle(-0.3), -0.3, 1e-12);
  for (double t = -20.0; t <= 20.0; t += 0.37) {
    const double n = normalize_angle(t);
    EXPECT_GT(n, -M_PI - 1e-12);
    EXPECT_LE(n, M_PI + 1e-12);
    EXPECT_NEAR(std::sin(n), std::sin(t), 1e-9);
    EXPECT_NEAR(std::cos(n), std::cos(t), 1e-9);
  }
}

TEST(AckermannArc, StraightForwardAndReverse) {
  AckermannState s;
  s.theta = M_PI / 2;
  const AckermannState fwd = ackermann_arc(s, 0.0, 2.0, 1, 2.0);
  EXPECT_NEAR(fwd.x, 0.0, 1e-12);
  EXPECT_NEAR(fwd.y, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(fwd.theta, M_PI / 2);
  EXPECT_EQ(fwd.d, 1);
  const AckermannState rev = ackermann_arc(s, 0.0, 2.0, -1, 2.0);
  EXPECT_NEAR(rev.y, -2.0, 1e-12);
  EXPECT_EQ(rev.d, -1);
}

TEST(AckermannArc, WorkedTurnExample) {
  // steer 0.3 rad, wheelbase 2 m, arc length 1 m from the origin
  AckermannState s;
  const AckermannState n = ackermann_arc(s, 0.3, 1.0, 1, 2.0);
  const double dtheta = std::tan(0.3) / 2.0;
  const double radius = 2.0 / std::tan(0.3);
  EXPECT_NEAR(dtheta, 0.1547, 1e-4);
  EXPECT_NEAR(radius, 6.465, 1e-3);
  EXPECT_NEAR(n.theta, dtheta, 1e-12);
  EXPECT_NEAR(n.x, radius * std::sin(dtheta), 1e-12);
  EXPECT_NEAR(n.y, radius * (1.0 - std::cos(dtheta)), 1e-12);
  // turning left curves upward, arc length preserved approximately by chord
  EXPECT_GT(n.y, 0.0);
  EXPECT_NEAR(std::hypot(n.x, n.y), 2.0 * radius * std::sin(dtheta / 2),
              1e-12);
}

TEST(AckermannArc, MatchesRk4Oracle) {
  std::mt19937 rng(314);
  std::uniform_real_distribution<double> usteer(-0.6, 0.6), utheta(-3.0, 3.0),
      udist(0.2, 3.0), uwheel(0.8, 3.0), upos(-5, 5);
  std::uniform_int_distribution<int> udir(0, 1);
  for (int i = 0; i < 200; ++i) {
    AckermannState s;
    s.x = upos(rng);
    s.y = upos(rng);
    s.theta = utheta(rng);
    const double steer = usteer(rng);
    const double dist = udist(rng);
    const double wb = uwheel(rng);
    const int dir = udir(rng) ? 1 : -1;
    const AckermannState got = ackermann_arc(s, steer, dist, dir, wb);
    const AckermannState want = rk4_arc(s, steer, dist, dir, wb);
    EXPECT_NEAR(got.x, want.x, 1e-6);
    EXPECT_NEAR(got.y, want.y, 1e-6);
    EXPECT_NEAR(std::sin(got.theta), std::sin(want.theta), 1e-6);
    EXPECT_NEAR(std::cos(got.theta), std::cos(want.theta), 1e-6);
  }
}

TEST(AckermannArcPoints, DensifiesTheArc) {
  AckermannState s;
  const auto pts = ackermann_arc_points(s, 0.3, 1.0, 1, 2.0, 4);
  ASSERT_EQ(pts.size(), 4u);
  const AckermannState end = ackermann_arc(s, 0.3, 1.0, 1, 2.0);
  EXPECT_NEAR(pts.back().x, end.x, 1e-12);
  EXPECT_NEAR(pts.back().y, end.y, 1e-12);
  // intermediate points shorten with the fraction
  for (std::size_t i = 1; i < pts.size(); ++i)
    EXPECT_GT(euclid_dist({0, 0, 0}, pts[i]),
              euclid_dist({0, 0, 0}, pts[i - 1]) - 1e-12);
}

TEST(AckermannExpand, OnePrimitivePerSteeringAngle) {
  AckermannSampler sampler;
  sampler.steering_set = {-0.4, 0.0, 0.4};
  sampler.sample_dist = 1.5;
  sampler.wheelbase = 2.0;
  sampler.direction = -1;
  AckermannState s;
  s.theta = 0.7;
  const auto out = ackermann_expand(s, sampler);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const AckermannState want = ackermann_arc(s, sampler.steering_set[i], 1.5,
                                              -1, 2.0);
    EXPECT_NEAR(out[i].x, want.x, 1e-12);
    EXPECT_NEAR(out[i].y, want.y, 1e-12);
    EXPECT_EQ(out[i].d, -1);
  }
}

TEST(AckermannSampler, ValidateRejectsBadConfigs) {
  AckermannSampler s;
  s.steering_set = {0.0};
  EXPECT_NO_THROW(s.validate());
  s.sample_dist = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.steering_set = {};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.steering_set = {1.6};  // >= pi/2
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.steering_set = {0.0};
  s.direction = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.steering_set = {-0.3, 0.5};
  EXPECT_DOUBLE_EQ(s.max_steer(), 0.5);
}

namespace {

OccupancyWorld empty_world2d() {
  OccupancyWorld::Config cfg;
  cfg.resolution = 1.0;
  cfg.inflation_radius = 0.4;
  std::string text;
  for (int r = 0; r < 40; ++r) text += std::string(40, '.') + "\n";
  return load_map_2d(text, cfg);
}

PlanParams ack_params() {
  PlanParams p;
  p.gridsize = 1.0;
  p.bigstep = 1.0;
  p.cellsize_min = 3;
  p.cellsize_max = 9;
  p.avoidance_range = 2.5;
  p.goal_tolerance = 1.5;
  p.max_steps = 300;
  return p;
}

AckermannSampler car_sampler() {
  AckermannSampler s;
  s.sample_dist = 1.0;
  s.steering_set = {-0.6, 0.0, 0.6};
  s.wheelbase = 2.0;
  return s;
}

}  // namespace

TEST(PlanAckermann, EmptyWorldDrivesNearStraight) {
  OccupancyWorld w = empty_world2d();
  const PlanParams params = ack_params();
  const AckermannSampler sampler = car_sampler();
  AckermannState start;
  start.x = 3.5;
  start.y = 20.5;
  PlanResult r = plan_ackermann(w, start, {33.5, 20.5, 0}, params, sampler);
  EXPECT_EQ(r.metrics.outcome, Outcome::Success);
  EXPECT_LE(euclid_dist(r.trajectory.points.back(), {33.5, 20.5, 0}),
            params.goal_tolerance + 1e-9);
  // straight distance is 30; no obstacle justifies more than a whisker extra
  EXPECT_LE(r.metrics.path_length_m, 30.0 * 1.05);
  EXPECT_FALSE(has_cusp(r.trajectory));
  for (char m : r.metrics.step_modes) EXPECT_EQ(m, 'F');
  // per-substep heading change obeys the kinematic bound
  const double bound = std::tan(sampler.max_steer()) *
                       (sampler.sample_dist / 4.0) / sampler.wheelbase;
  const auto line = r.trajectory.polyline();
  for (std::size_t i = 2; i < line.size(); ++i) {
    const Point3 u = line[i - 1] - line[i - 2];
    const Point3 v = line[i] - line[i - 1];
    if (dot(u, v) <= 0.0) continue;
    const double du = std::atan2(u.y, u.x), dv = std::atan2(v.y, v.x);
    EXPECT_LE(std::abs(normalize_angle(dv - du)), bound * 1.10 + 1e-9);
  }
}

TEST(PlanAckermann, CurvatureNeverExceedsSteeringLimit) {
  OccupancyWorld w = empty_world2d();
  PlanParams params = ack_params();
  const AckermannSampler sampler = car_sampler();
  AckermannState start;
  start.x = 5.5;
  start.y = 5.5;
  start.theta = M_PI / 2;  // force turning toward the goal
  PlanResult r = plan_ackermann(w, start, {34.5, 8.5, 0}, params, sampler);
  EXPECT_EQ(r.metrics.outcome, Outcome::Success);
  const double kappa_max = std::tan(sampler.max_steer()) / sampler.wheelbase;
  EXPECT_LE(max_curvature(r.trajectory), kappa_max * 1.05);
  EXPECT_GT(max_curvature(r.trajectory), 0.0);  // it did steer
}

TEST(PlanAckermann, RequiresPlanarWorld) {
  OccupancyWorld::Config cfg;
  cfg.bounds = {{Point3{-10, -10, -10}, Point3{10, 10, 10}}};
  OccupancyWorld w3 = load_obstacles_3d({}, cfg);
  AckermannState start;
  EXPECT_THROW(
      plan_ackermann(w3, start, {5, 0, 0}, ack_params(), car_sampler()),
      std::invalid_argument);
}

TEST(PlanAckermann, EnclosedVehicleReportsStuck) {
  OccupancyWorld::Config cfg;
  cfg.resolution = 1.0;
  cfg.inflation_radius = 0.4;
  // Only the center cell is free; every primitive collides immediately.
  OccupancyWorld w = load_map_2d(
      "#####\n"
      "#####\n"
      "##.##\n"
      "#####\n"
      "#####\n",
      cfg);
  PlanParams params = ack_params();
  params.cellsize_max = 5;
  AckermannState start;
  start.x = 2.5;
  start.y = 2.5;
  PlanResult r = plan_ackermann(w, start, {20.5, 2.5, 0}, params,
                                car_sampler());
  EXPECT_EQ(r.metrics.outcome, Outcome::Failed);
  EXPECT_NE(r.metrics.detail.find("vehicle stuck"), std::string::npos);
}

TEST(PlanAckermann, NodeBudgetPerStepStaysBounded) {
  Scenario sc = load_scenario_file(fixture("scenarios/blocks2d_ack.scn"));
  RunRecord rec = run_scenario(sc);
  // ladder of 3 attempts x chain depth x steering angles
  const long bound = 3l * (sc.plan.cellsize_max - 1) *
                     static_cast<long>(sc.sampler.steering_set.size());
  for (long n : rec.result.metrics.nodes_per_step) {
    EXPECT_LE(n, bound);
    EXPECT_LE(n, static_cast<long>(sc.plan.cellsize_max) *
                     sc.plan.cellsize_max);
  }
}

TEST(PlanAckermann, DeadCornerEscapesInReverse) {
  Scenario sc = load_scenario_file(fixture("scenarios/deadcorner.scn"));
  RunRecord rec = run_scenario(sc);
  EXPECT_EQ(rec.result.metrics.outcome, Outcome::Success)
      << rec.result.metrics.detail;
  EXPECT_TRUE(rec.audit.clean);
  // boxed in facing the closed side: progress requires a gear change
  EXPECT_TRUE(has_cusp(rec.result.trajectory));
  const double kappa_max =
      std::tan(sc.sampler.max_steer()) / sc.sampler.wheelbase;
  EXPECT_LE(max_curvature(rec.result.trajectory), kappa_max * 1.05);
}

TEST(PlanAckermann, BlockFieldRunIsCleanAndDeterministic) {
  Scenario sc = load_scenario_file(fixture("scenarios/blocks2d_ack.scn"));
  RunRecord a = run_scenario(sc);
  RunRecord b = run_scenario(sc);
  EXPECT_EQ(a.result.metrics.outcome, Outcome::Success)
      << a.result.metrics.detail;
  EXPECT_TRUE(a.audit.clean);
  ASSERT_EQ(a.result.trajectory.points.size(),
            b.result.trajectory.points.size());
  for (std::size_t i = 0; i < a.result.trajectory.points.size(); ++i)
    EXPECT_EQ(a.result.trajectory.points[i], b.result.trajectory.points[i]);
  const double kappa_max =
      std::tan(sc.sampler.max_steer()) / sc.sampler.wheelbase;
  EXPECT_LE(max_curvature(a.result.trajectory), kappa_max * 1.05);
}
