#include <gtest/gtest.h>

#include <cmath>

#include "navfuse/geometric.hpp"
#include "navfuse/planner.hpp"
#include "navfuse/rng.hpp"
#include "support/oracles.hpp"

namespace navfuse {
namespace {

MapGeometry open_map() {
  MapGeometry m;
  m.bounds = {-10.0, -10.0, 20.0, 20.0};
  return m;
}

TEST(Planner, EmptyMapIsNearEuclidean) {
  MapGeometry map = open_map();
  auto path = plan_shortest_path(map, {0.0, 0.0}, {3.0, 4.0}, 0.2);
  ASSERT_TRUE(path.has_value());
  EXPECT_GE(path->length, 5.0 - 1e-9);
  EXPECT_LE(path->length, 5.0 * 1.05);
}

TEST(Planner, GoalInsideObstacleIsUnreachable) {
  MapGeometry map = open_map();
  map.obstacles.push_back(
      Polygon{{{4.0, 4.0}, {6.0, 4.0}, {6.0, 6.0}, {4.0, 6.0}}});
  auto path = plan_shortest_path(map, {0.0, 0.0}, {5.0, 5.0}, 0.2);
  EXPECT_FALSE(path.has_value());
}

TEST(Planner, FullyWalledGoalIsUnreachable) {
  MapGeometry map = open_map();
  // A box around the goal with no gap.
  map.obstacles.push_back(
      Polygon{{{6.0, 6.0}, {10.0, 6.0}, {10.0, 10.0}, {6.0, 10.0}}});
  auto path = plan_shortest_path(map, {0.0, 0.0}, {8.0, 8.0}, 0.2);
  EXPECT_FALSE(path.has_value());
}

TEST(Planner, SquareObstacleMatchesVisibilityOracle) {
  // Small inflation; the oracle plans over the square grown by the same
  // amount with square corners, an upper bound within a fraction of a
  // percent of the true inflated optimum.
  double inflation = 0.05;
  MapGeometry map = open_map();
  map.obstacles.push_back(
      Polygon{{{4.0, -1.5}, {7.0, -1.5}, {7.0, 1.5}, {4.0, 1.5}}});
  auto path = plan_shortest_path(map, {0.0, 0.0}, {11.0, 0.0}, inflation);
  ASSERT_TRUE(path.has_value());

  MapGeometry inflated = open_map();
  double e = inflation + 1e-4;
  inflated.obstacles.push_back(Polygon{{{4.0 - e, -1.5 - e},
                                        {7.0 + e, -1.5 - e},
                                        {7.0 + e, 1.5 + e},
                                        {4.0 - e, 1.5 + e}}});
  double oracle =
      testing::visibility_graph_shortest_path(inflated, {0.0, 0.0}, {11.0, 0.0});
  ASSERT_TRUE(std::isfinite(oracle));
  EXPECT_LE(std::abs(path->length - oracle) / oracle, 0.05)
      << "grid " << path->length << " oracle " << oracle;
}

TEST(Planner, RandomConvexObstaclesWithinFivePercentOfOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    MapGeometry map = open_map();
    int k = 1 + static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < k; ++i) {
      double cx = rng.uniform(2.0, 9.0);
      double cy = rng.uniform(-4.0, 4.0);
      double w = rng.uniform(0.8, 2.5);
      double h = rng.uniform(0.8, 2.5);
      map.obstacles.push_back(Polygon{{{cx - w, cy - h},
                                       {cx + w, cy - h},
                                       {cx + w, cy + h},
                                       {cx - w, cy + h}}});
    }
    Vec2 from{0.0, 0.0}, to{12.0, 0.0};
    if (clearance(from, map) <= 0.06 || clearance(to, map) <= 0.06) continue;
    auto path = plan_shortest_path(map, from, to, 0.05);
    if (!path) continue;  // oracle comparison only for reachable layouts

    MapGeometry inflated = open_map();
    for (const auto& poly : map.obstacles) {
      double e = 0.05 + 1e-4;
      double xmin = poly.vertices[0].x - e, ymin = poly.vertices[0].y - e;
      double xmax = poly.vertices[2].x + e, ymax = poly.vertices[2].y + e;
      inflated.obstacles.push_back(Polygon{
          {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}}});
    }
    double oracle = testing::visibility_graph_shortest_path(inflated, from, to);
    ASSERT_TRUE(std::isfinite(oracle)) << "trial " << trial;
    EXPECT_LE(path->length, oracle * 1.05) << "trial " << trial;
    // Admissibility: grid cannot beat the true shortest path by more than
    // the corner-rounding slack.
    EXPECT_GE(path->length, oracle * 0.995 - 0.05) << "trial " << trial;
  }
}

TEST(Planner, LengthIsAdmissible) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    MapGeometry map = open_map();
    if (rng.uniform() < 0.6) {
      double cx = rng.uniform(2.0, 8.0), cy = rng.uniform(-3.0, 3.0);
      map.obstacles.push_back(Polygon{{{cx - 1, cy - 1},
                                       {cx + 1, cy - 1},
                                       {cx + 1, cy + 1},
                                       {cx - 1, cy + 1}}});
    }
    Vec2 from{rng.uniform(-8, 0), rng.uniform(-8, 8)};
    Vec2 to{rng.uniform(9, 18), rng.uniform(-8, 8)};
    if (clearance(from, map) <= 0.2 || clearance(to, map) <= 0.2) continue;
    auto path = plan_shortest_path(map, from, to, 0.2);
    if (!path) continue;
    EXPECT_GE(path->length, distance(from, to) - 1e-9);
    EXPECT_NEAR(path->length, polyline_length(path->waypoints), 1e-12);
    for (std::size_t i = 1; i < path->waypoints.size(); ++i) {
      EXPECT_GT(distance(path->waypoints[i - 1], path->waypoints[i]), 1e-6);
      // Collision-free against the inflated obstacles, up to the line-of-
      // sight sampling granularity.
      Vec2 a = path->waypoints[i - 1], b = path->waypoints[i];
      int samples = std::max(1, static_cast<int>(distance(a, b) / 0.05));
      for (int k = 0; k <= samples; ++k) {
        Vec2 p = a + (b - a) * (static_cast<double>(k) / samples);
        EXPECT_GT(clearance(p, map), 0.2 - 0.06);
      }
    }
  }
}

Observation clear_scan_observation() {
  Observation obs;
  obs.depth_scan.assign(32, 12.0);
  obs.depth_max_range = 12.0;
  return obs;
}

NavState perfect_state(double x, double y, double heading, double v) {
  NavState s;
  s.mean << x, y, heading, v;
  s.cov = Matrix4::Identity() * 1e-6;
  return s;
}

PlannedPath straight_path() {
  PlannedPath p;
  p.waypoints = {{0.0, 0.0}, {10.0, 0.0}};
  p.length = 10.0;
  return p;
}

TEST(GeometricDecide, NominalForward) {
  NavState s = perfect_state(1.0, 0.0, 0.0, 1.0);
  Observation obs = clear_scan_observation();
  PolicyDecision d = geometric_decide(s, straight_path(), obs,
                                      ActionSpace::Discrete);
  EXPECT_EQ(d.action.kind(), DiscreteAction::MOVE_FORWARD);

  PolicyDecision c = geometric_decide(s, straight_path(), obs,
                                      ActionSpace::Continuous);
  EXPECT_NEAR(c.action.cont().steer, 0.0, 0.05);
  EXPECT_GT(c.action.cont().throttle, 0.0);
}

TEST(GeometricDecide, HeadingErrorTurnsTowardSign) {
  // Path bears +45 degrees from the robot heading: TURN_LEFT.
  NavState s = perfect_state(0.0, 0.0, -kPi / 4.0, 0.5);
  Observation obs = clear_scan_observation();
  PolicyDecision d = geometric_decide(s, straight_path(), obs,
                                      ActionSpace::Discrete);
  EXPECT_EQ(d.action.kind(), DiscreteAction::TURN_LEFT);

  NavState s2 = perfect_state(0.0, 0.0, kPi / 4.0, 0.5);
  PolicyDecision d2 = geometric_decide(s2, straight_path(), obs,
                                       ActionSpace::Discrete);
  EXPECT_EQ(d2.action.kind(), DiscreteAction::TURN_RIGHT);
}

TEST(GeometricDecide, ObstacleAheadStops) {
  NavState s = perfect_state(0.0, 0.0, 0.0, 0.0);
  Observation obs = clear_scan_observation();
  obs.depth_scan[16] = 0.5;  // dead ahead
  PolicyDecision d = geometric_decide(s, straight_path(), obs,
                                      ActionSpace::Discrete);
  EXPECT_EQ(d.action.kind(), DiscreteAction::STOP);

  PolicyDecision c = geometric_decide(s, straight_path(), obs,
                                      ActionSpace::Continuous);
  EXPECT_LE(c.action.cont().throttle, 0.0);
}

TEST(GeometricDecide, NeverThrottlesIntoBlockedScan) {
  Rng rng(5);
  GeometricConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    Observation obs = clear_scan_observation();
    for (auto& d : obs.depth_scan) d = rng.uniform(0.05, 12.0);
    double v = rng.uniform(0.0, 2.0);
    NavState s = perfect_state(rng.uniform(0, 5), rng.uniform(-1, 1),
                               rng.uniform(-0.3, 0.3), v);
    PolicyDecision c = geometric_decide(s, straight_path(), obs,
                                        ActionSpace::Continuous, cfg);
    if (min_forward_depth(obs, cfg.corridor_halfwidth) <
        stopping_distance(v, cfg)) {
      EXPECT_LE(c.action.cont().throttle, 0.0) << "trial " << trial;
    }
    PolicyDecision d = geometric_decide(s, straight_path(), obs,
                                        ActionSpace::Discrete, cfg);
    if (d.action.kind() == DiscreteAction::MOVE_FORWARD) {
      EXPECT_GE(min_forward_depth(obs, cfg.corridor_halfwidth),
                stopping_distance(v, cfg));
    }
  }
}

TEST(GeometricDecide, ConfidenceIsAkfConfidence) {
  NavState s = perfect_state(0.0, 0.0, 0.0, 0.0);
  s.cov(0, 0) = 0.15;
  s.cov(1, 1) = 0.10;  // trace = sigma_ref^2 at sigma_ref = 0.5
  Observation obs = clear_scan_observation();
  PolicyDecision d = geometric_decide(s, straight_path(), obs,
                                      ActionSpace::Discrete, {}, 0.5);
  EXPECT_DOUBLE_EQ(d.confidence, 0.5);
  EXPECT_FALSE(d.explanation.has_value());
}

// Closed-loop sanity: with perfect state and a static world, the continuous
// controller reaches a goal around an obstacle well within the step budget.
TEST(GeometricDecide, ClosedLoopReachesGoal) {
  MapGeometry map;
  map.bounds = {0.0, 0.0, 20.0, 12.0};
  map.obstacles.push_back(
      Polygon{{{8.0, 3.0}, {11.0, 3.0}, {11.0, 9.0}, {8.0, 9.0}}});
  Vec2 start{2.0, 6.0}, goal{18.0, 6.0};
  auto path = plan_shortest_path(map, start, goal, 0.5);
  ASSERT_TRUE(path.has_value());

  MotionParams motion;
  double x = start.x, y = start.y, heading = 0.0, v = 0.0;
  double dt = 0.1;
  bool reached = false;
  for (int step = 0; step < 600; ++step) {
    NavState s = perfect_state(x, y, heading, v);
    Observation obs;
    obs.depth_max_range = 12.0;
    obs.depth_scan.resize(32);
    for (int i = 0; i < 32; ++i) {
      obs.depth_scan[i] = cast_ray_static(
          {x, y}, heading + depth_ray_bearing(i, 32), map, 12.0);
    }
    PolicyDecision d = geometric_decide(s, *path, obs,
                                        ActionSpace::Continuous);
    const auto& u = d.action.cont();
    double v_target = std::clamp(u.throttle, 0.0, 1.0) * motion.v_max;
    v += (v_target - v) * dt / motion.tau_v;
    heading = wrap_angle(heading + u.steer * motion.steer_rate_gain * dt);
    x += v * std::cos(heading) * dt;
    y += v * std::sin(heading) * dt;
    if (distance({x, y}, goal) < 1.0) {
      reached = true;
      break;
    }
    ASSERT_GT(clearance({x, y}, map), 0.3) << "collided at step " << step;
  }
  EXPECT_TRUE(reached);
}

}  // namespace
}  // namespace navfuse
