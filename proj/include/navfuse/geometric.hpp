// The classical branch: a waypoint-following controller over the planned
// path. Continuous mode runs pure pursuit with a speed profile and a hard
// depth stop; discrete mode quantizes to MOVE_FORWARD / TURN_* / STOP. The
// branch never explains itself; its confidence is p_AKF from the filter.
#pragma once

#include <algorithm>
#include <cmath>

#include "navfuse/akf.hpp"
#include "navfuse/planner.hpp"
#include "navfuse/types.hpp"

namespace navfuse {

struct GeometricConfig {
  double lookahead = 1.5;            // m
  // Depth-stop threshold at rest. Must stay below the clearance the planner
  // leaves when rounding obstacle corners (inflation 0.5 gives ~0.9 m of
  // corridor-forward distance mid-turn), or the controller parks there.
  double stop_distance = 0.6;        // m
  double brake_headway = 0.7;        // s, speed-proportional stop margin
  double turn_threshold_deg = 30.0;
  double cruise_speed = 1.5;         // m/s
  double goal_slow_gain = 0.8;       // target speed = gain * remaining distance
  double corridor_halfwidth = 0.35;  // m, half-width of the swept corridor
  double min_pursuit_speed = 0.5;    // m/s floor in the pure-pursuit gain
  double blocked_align_deg = 8.0;    // blocked + aligned within this -> STOP
};

// Forward distance to the nearest scan hit inside the robot's swept corridor:
// each ray hit is projected into the robot frame and counts only when its
// lateral offset is within corridor_halfwidth. Walls abeam of the robot do
// not trigger stops; anything in the driving corridor does.
inline double min_forward_depth(const Observation& obs,
                                double corridor_halfwidth) {
  double best = obs.depth_max_range;
  int n = static_cast<int>(obs.depth_scan.size());
  for (int i = 0; i < n; ++i) {
    double beta = depth_ray_bearing(i, n);
    double d = obs.depth_scan[i];
    if (d >= obs.depth_max_range) continue;
    double forward = d * std::cos(beta);
    double lateral = d * std::sin(beta);
    if (forward >= 0.0 && std::abs(lateral) <= corridor_halfwidth) {
      best = std::min(best, forward);
    }
  }
  return best;
}

// Stop threshold grows with speed so the first-order braking lag cannot
// carry the robot into the obstacle.
inline double stopping_distance(double speed, const GeometricConfig& cfg) {
  return cfg.stop_distance + std::max(0.0, speed) * cfg.brake_headway;
}

namespace geometric_detail {

// Index of the closest waypoint segment and the arc position of the point at
// `lookahead` meters beyond the projection of `pos` onto the path.
inline Vec2 lookahead_point(const PlannedPath& path, const Vec2& pos,
                            double lookahead) {
  const auto& w = path.waypoints;
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t best_seg = 0;
  double best_t = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    Vec2 seg = w[i + 1] - w[i];
    double len2 = seg.squared_norm();
    double t = len2 > 0.0 ? std::clamp((pos - w[i]).dot(seg) / len2, 0.0, 1.0)
                          : 0.0;
    double d = distance(pos, w[i] + seg * t);
    if (d < best_d) {
      best_d = d;
      best_seg = i;
      best_t = t;
    }
  }
  double remaining = lookahead;
  Vec2 cursor = w[best_seg] + (w[best_seg + 1] - w[best_seg]) * best_t;
  for (std::size_t i = best_seg; i + 1 < w.size(); ++i) {
    Vec2 seg_end = w[i + 1];
    double seg_len = distance(cursor, seg_end);
    if (seg_len >= remaining) {
      return cursor + (seg_end - cursor).normalized() * remaining;
    }
    remaining -= seg_len;
    cursor = seg_end;
  }
  return w.back();
}

inline double remaining_path_distance(const PlannedPath& path,
                                      const Vec2& pos) {
  const auto& w = path.waypoints;
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t best_seg = 0;
  double best_t = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    Vec2 seg = w[i + 1] - w[i];
    double len2 = seg.squared_norm();
    double t = len2 > 0.0 ? std::clamp((pos - w[i]).dot(seg) / len2, 0.0, 1.0)
                          : 0.0;
    double d = distance(pos, w[i] + seg * t);
    if (d < best_d) {
      best_d = d;
      best_seg = i;
      best_t = t;
    }
  }
  Vec2 proj = w[best_seg] + (w[best_seg + 1] - w[best_seg]) * best_t;
  double total = distance(proj, w[best_seg + 1]);
  for (std::size_t i = best_seg + 1; i + 1 < w.size(); ++i) {
    total += distance(w[i], w[i + 1]);
  }
  return total;
}

}  // namespace geometric_detail

// Produces the classical branch's decision (a_AKF with confidence p_AKF)
// from the filtered state, the planned path, and the current scan.
inline PolicyDecision geometric_decide(const NavState& state,
                                       const PlannedPath& path,
                                       const Observation& obs,
                                       ActionSpace mode,
                                       const GeometricConfig& cfg = {},
                                       double sigma_ref = 0.5,
                                       const MotionParams& motion = {}) {
  Vec2 pos = state.position();
  Vec2 target = geometric_detail::lookahead_point(path, pos, cfg.lookahead);
  double heading_error = wrap_angle(bearing_of(target - pos) - state.heading());
  double forward_depth = min_forward_depth(obs, cfg.corridor_halfwidth);
  bool blocked = forward_depth < stopping_distance(state.speed(), cfg);

  PolicyDecision d;
  d.confidence = akf_confidence(state, sigma_ref);

  if (mode == ActionSpace::Discrete) {
    double limit = cfg.turn_threshold_deg * kPi / 180.0;
    double align_limit = cfg.blocked_align_deg * kPi / 180.0;
    if (std::abs(heading_error) > limit) {
      d.action = ActionCommand::discrete(heading_error > 0.0
                                             ? DiscreteAction::TURN_LEFT
                                             : DiscreteAction::TURN_RIGHT);
    } else if (blocked) {
      // Blocked but not aligned with the path: rotate in place toward it
      // instead of parking. STOP only when the blockage is dead ahead.
      if (std::abs(heading_error) > align_limit) {
        d.action = ActionCommand::discrete(heading_error > 0.0
                                               ? DiscreteAction::TURN_LEFT
                                               : DiscreteAction::TURN_RIGHT);
      } else {
        d.action = ActionCommand::discrete(DiscreteAction::STOP);
      }
    } else {
      d.action = ActionCommand::discrete(DiscreteAction::MOVE_FORWARD);
    }
    return d;
  }

  // Pure pursuit: turn rate 2 v sin(eta) / Ld, expressed as a steer command.
  double v_eff = std::max(state.speed(), cfg.min_pursuit_speed);
  double omega = 2.0 * v_eff * std::sin(heading_error) / cfg.lookahead;
  double steer = std::clamp(omega / motion.steer_rate_gain, -kMaxSteer, kMaxSteer);

  double remaining = geometric_detail::remaining_path_distance(path, pos);
  double v_target = std::min(cfg.cruise_speed, cfg.goal_slow_gain * remaining);
  // Slow through sharp turns.
  v_target *= std::max(0.25, std::cos(heading_error));
  double throttle = std::clamp(v_target / motion.v_max, 0.0, 1.0);
  if (blocked) throttle = -1.0;  // hard stop

  d.action = ActionCommand::continuous(steer, throttle);
  return d;
}

}  // namespace navfuse
