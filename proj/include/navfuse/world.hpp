// True world state and its integration: the robot's unicycle dynamics, the
// pedestrian crowd, collision checks, and mapping of discrete actions onto
// control commands.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "navfuse/akf.hpp"
#include "navfuse/geometry.hpp"
#include "navfuse/rng.hpp"
#include "navfuse/social_force.hpp"
#include "navfuse/types.hpp"

namespace navfuse {

struct RobotPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct WorldState {
  RobotPose robot;
  std::vector<PedestrianState> pedestrians;
  MapGeometry map;
  double t = 0.0;
  Vec2 drift_bias;  // slowly varying GPS bias (Ornstein-Uhlenbeck)
  Rng rng{0};
};

// Same unicycle discretization the filter's predict step uses, so the model
// mismatch between truth and filter is zero by construction.
inline void integrate_robot(RobotPose& robot, const ContinuousCommand& u,
                            double dt, const MotionParams& mp) {
  double v_target = std::clamp(u.throttle, 0.0, 1.0) * mp.v_max;
  robot.x += robot.speed * std::cos(robot.heading) * dt;
  robot.y += robot.speed * std::sin(robot.heading) * dt;
  robot.heading =
      wrap_angle(robot.heading + u.steer * mp.steer_rate_gain * dt);
  robot.speed += (v_target - robot.speed) * dt / mp.tau_v;
}

// Discrete actions map onto fixed control commands for world integration.
inline ContinuousCommand discrete_to_command(DiscreteAction a,
                                             double cruise_throttle = 0.75,
                                             double turn_steer = 0.5,
                                             double turn_throttle = 0.0) {
  switch (a) {
    case DiscreteAction::MOVE_FORWARD:
      return {0.0, cruise_throttle};
    case DiscreteAction::TURN_LEFT:
      return {turn_steer, turn_throttle};
    case DiscreteAction::TURN_RIGHT:
      return {-turn_steer, turn_throttle};
    case DiscreteAction::STOP:
      return {0.0, -1.0};
  }
  return {0.0, -1.0};
}

inline ContinuousCommand to_world_command(const ActionCommand& a) {
  return a.is_discrete() ? discrete_to_command(a.kind()) : a.cont();
}

enum class CollisionKind { None, Static, Pedestrian, OutOfBounds };

// Strict-overlap collision check: tangent contact does not collide.
inline CollisionKind check_collision(const WorldState& world,
                                     double robot_radius) {
  Vec2 pos = world.robot.position();
  if (!world.map.bounds.contains(pos)) return CollisionKind::OutOfBounds;
  for (const auto& ped : world.pedestrians) {
    if (distance(pos, ped.position) < robot_radius + ped.radius) {
      return CollisionKind::Pedestrian;
    }
  }
  for (const auto& poly : world.map.obstacles) {
    if (point_polygon_distance(pos, poly) < robot_radius) {
      return CollisionKind::Static;
    }
  }
  if (world.map.bounds.interior_margin(pos) < robot_radius) {
    return CollisionKind::Static;  // outer walls are solid
  }
  return CollisionKind::None;
}

}  // namespace navfuse
