// Sensor emulation: noisy position fixes (with an optional Ornstein-Uhlenbeck
// drift bias), odometry deltas, heading, depth ray casts against walls and
// pedestrian discs, and symbolic feature detections with crossing tags.
#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "navfuse/rng.hpp"
#include "navfuse/types.hpp"
#include "navfuse/world.hpp"

namespace navfuse {

struct SensorProfile {
  double sigma_pos = 0.15;           // m per axis
  double sigma_heading = 0.02;       // rad
  double sigma_odo_distance = 0.01;  // m per step
  double sigma_odo_heading = 0.005;  // rad per step
  double sigma_depth = 0.0;          // m per ray
  double sigma_speed = 0.02;         // m/s
  int depth_rays = 32;
  double depth_max_range = 12.0;
  double fov_deg = 180.0;       // feature field of view (full width)
  double feature_range = 10.0;  // m
  // Ornstein-Uhlenbeck drift for the "gps_drift" condition. The stationary
  // std (sigma / sqrt(2 theta), ~5 m here) is large enough that a filter
  // anchored only by the fix cannot hold the corridor.
  double drift_mean_reversion = 0.05;  // 1/s
  double drift_sigma = 2.2;            // m / sqrt(s)
  // Feature visibility limit under the "occlusion" condition.
  double occlusion_feature_range = 1.2;  // m
  // Extra position noise factor under the "low_light" condition.
  double low_light_pos_factor = 3.0;
};

namespace sensor_detail {

// A pedestrian is "crossing" when it is ahead of the robot and moving
// laterally through the driving corridor: either already inside the corridor
// band, or approaching the centerline fast enough to reach it within the
// prediction horizon.
inline bool is_crossing(const RobotPose& robot, const PedestrianState& ped,
                        double horizon_s = 8.0, double corridor_band = 0.8) {
  Vec2 fwd = heading_vector(robot.heading);
  Vec2 left{-fwd.y, fwd.x};
  Vec2 rel = ped.position - robot.position();
  double forward = rel.dot(fwd);
  double lateral = rel.dot(left);
  double lateral_speed = ped.velocity.dot(left);
  if (forward < 0.3) return false;
  if (std::abs(lateral_speed) < 0.15) return false;
  if (std::abs(lateral) <= corridor_band) return true;
  if (lateral * lateral_speed >= 0.0) return false;  // moving away
  return std::abs(lateral) / std::abs(lateral_speed) <= horizon_s;
}

}  // namespace sensor_detail

// Advances the OU drift bias by one step. Kept separate from emulate_sensors
// so the world owns the bias state explicitly.
inline void advance_drift_bias(Vec2& bias, double dt,
                               const SensorProfile& profile, Rng& rng) {
  double theta = profile.drift_mean_reversion;
  double sigma = profile.drift_sigma;
  double sq = sigma * std::sqrt(dt);
  bias.x += -theta * bias.x * dt + sq * rng.gaussian();
  bias.y += -theta * bias.y * dt + sq * rng.gaussian();
}

// Emulates one timestep of sensor data from the true world state. The
// context tags carried by the episode select degradations: "gps_drift" adds
// the OU bias (the caller advances it), "low_light" widens position noise,
// "occlusion" truncates feature visibility. All randomness comes from `rng`.
inline Observation emulate_sensors(const WorldState& world,
                                   const SensorProfile& profile,
                                   const std::set<std::string>& context_tags,
                                   double true_odo_distance,
                                   double true_odo_heading, Rng& rng,
                                   const std::optional<std::string>& instruction) {
  const RobotPose& robot = world.robot;
  bool drift = context_tags.count("gps_drift") > 0;
  bool low_light = context_tags.count("low_light") > 0;
  bool occlusion = context_tags.count("occlusion") > 0;

  Observation obs;
  obs.t = world.t;
  obs.instruction = instruction;
  obs.context_tags = context_tags;
  obs.depth_max_range = profile.depth_max_range;

  double pos_sigma =
      profile.sigma_pos * (low_light ? profile.low_light_pos_factor : 1.0);
  obs.position_fix = {robot.x + rng.gaussian(0.0, pos_sigma),
                      robot.y + rng.gaussian(0.0, pos_sigma)};
  if (drift) {
    obs.position_fix += world.drift_bias;
  }
  obs.position_fix_std = {pos_sigma, pos_sigma};

  obs.heading = wrap_angle(robot.heading + rng.gaussian(0.0, profile.sigma_heading));
  obs.speed = std::max(0.0, robot.speed + rng.gaussian(0.0, profile.sigma_speed));
  obs.odo_distance =
      true_odo_distance + rng.gaussian(0.0, profile.sigma_odo_distance);
  obs.odo_heading =
      true_odo_heading + rng.gaussian(0.0, profile.sigma_odo_heading);

  int n = profile.depth_rays;
  obs.depth_scan.resize(n);
  obs.static_depth_scan.resize(n);
  for (int i = 0; i < n; ++i) {
    double angle = robot.heading + depth_ray_bearing(i, n);
    double d_static = cast_ray_static(robot.position(), angle, world.map,
                                      profile.depth_max_range);
    double d = d_static;
    Vec2 dir = heading_vector(angle);
    for (const auto& ped : world.pedestrians) {
      d = std::min(d, ray_circle_intersection(robot.position(), dir,
                                              ped.position, ped.radius));
    }
    if (profile.sigma_depth > 0.0) {
      d = std::clamp(d + rng.gaussian(0.0, profile.sigma_depth), 0.0,
                     profile.depth_max_range);
      d_static = std::clamp(d_static, 0.0, profile.depth_max_range);
    }
    obs.depth_scan[i] = std::min(d, profile.depth_max_range);
    obs.static_depth_scan[i] = d_static;
  }

  double fov_half = profile.fov_deg * 0.5 * kPi / 180.0;
  double feature_range =
      occlusion ? profile.occlusion_feature_range : profile.feature_range;
  int ped_index = 0;
  for (const auto& ped : world.pedestrians) {
    Vec2 rel = ped.position - robot.position();
    double range = rel.norm();
    double bearing = wrap_angle(bearing_of(rel) - robot.heading);
    ++ped_index;
    if (range > feature_range || std::abs(bearing) > fov_half) continue;
    FeatureDetection f;
    f.id = "ped" + std::to_string(ped_index - 1);
    f.label = ped.label;
    f.bearing = bearing;
    f.range = range;
    if (sensor_detail::is_crossing(robot, ped)) {
      f.attributes["crossing"] = "true";
    }
    obs.features.push_back(std::move(f));
  }
  return obs;
}

// Static markers become features through the same visibility rules; split
// out so callers without markers skip it.
inline void append_marker_features(Observation& obs, const RobotPose& robot,
                                   const std::vector<MarkerSpec>& markers,
                                   const SensorProfile& profile,
                                   bool occlusion) {
  double fov_half = profile.fov_deg * 0.5 * kPi / 180.0;
  double feature_range =
      occlusion ? profile.occlusion_feature_range : profile.feature_range;
  for (const auto& m : markers) {
    Vec2 rel = m.position - robot.position();
    double range = rel.norm();
    double bearing = wrap_angle(bearing_of(rel) - robot.heading);
    if (range > feature_range || std::abs(bearing) > fov_half) continue;
    FeatureDetection f;
    f.id = m.id;
    f.label = m.label;
    f.bearing = bearing;
    f.range = range;
    f.attributes = m.attributes;
    obs.features.push_back(std::move(f));
  }
}

}  // namespace navfuse
