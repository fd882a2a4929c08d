// Social-force pedestrian dynamics (Helbing-Molnar form): goal attraction
// with relaxation time tau plus exponential repulsion from other pedestrians,
// walls, and the robot. Integrated with semi-implicit Euler; speeds are
// clamped to v_max.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "navfuse/geometry.hpp"

namespace navfuse {

struct SocialForceParams {
  double tau = 0.5;     // s, relaxation time toward the preferred velocity
  double a = 2.0;       // m/s^2, repulsion strength
  double b = 0.3;       // m, repulsion range
  double v_max = 2.5;   // m/s, hard speed cap
  double goal_radius = 0.3;  // m, pedestrians idle once at their goal
};

struct PedestrianState {
  Vec2 position;
  Vec2 velocity;
  Vec2 goal;
  double v0 = 1.2;
  double radius = 0.25;
  std::string label = "pedestrian";
};

// Repulsion magnitude between two discs at center distance d:
// a * exp((r_sum - d) / b), pointing from the other agent toward this one.
inline double social_repulsion_magnitude(double radius_sum, double d,
                                         const SocialForceParams& p) {
  return p.a * std::exp((radius_sum - d) / p.b);
}

// Total acceleration on pedestrian `i` of `peds`. The robot is one more
// repulsor disc; walls repel from the nearest boundary point.
inline Vec2 social_force_accel(const std::vector<PedestrianState>& peds,
                               std::size_t i, const Vec2& robot_position,
                               double robot_radius, const MapGeometry& map,
                               const SocialForceParams& p) {
  const PedestrianState& self = peds[i];
  Vec2 accel{0.0, 0.0};

  Vec2 to_goal = self.goal - self.position;
  if (to_goal.norm() > p.goal_radius) {
    Vec2 desired = to_goal.normalized() * self.v0;
    accel += (desired - self.velocity) * (1.0 / p.tau);
  } else {
    accel += (Vec2{0.0, 0.0} - self.velocity) * (1.0 / p.tau);
  }

  for (std::size_t j = 0; j < peds.size(); ++j) {
    if (j == i) continue;
    Vec2 away = self.position - peds[j].position;
    double d = away.norm();
    if (d < 1e-9) continue;
    accel += away.normalized() *
             social_repulsion_magnitude(self.radius + peds[j].radius, d, p);
  }

  {
    Vec2 away = self.position - robot_position;
    double d = away.norm();
    if (d > 1e-9) {
      accel += away.normalized() *
               social_repulsion_magnitude(self.radius + robot_radius, d, p);
    }
  }

  // Wall term: nearest point on each obstacle, same exponential form.
  for (const auto& poly : map.obstacles) {
    const auto& v = poly.vertices;
    double best_d = std::numeric_limits<double>::infinity();
    Vec2 best_point;
    for (std::size_t k = 0, m = v.size() - 1; k < v.size(); m = k++) {
      Vec2 seg = v[k] - v[m];
      double len2 = seg.squared_norm();
      double t = len2 > 0.0
                     ? std::clamp((self.position - v[m]).dot(seg) / len2, 0.0, 1.0)
                     : 0.0;
      Vec2 q = v[m] + seg * t;
      double d = distance(self.position, q);
      if (d < best_d) {
        best_d = d;
        best_point = q;
      }
    }
    if (best_d < 1e-9 || !std::isfinite(best_d)) continue;
    accel += (self.position - best_point).normalized() *
             social_repulsion_magnitude(self.radius, best_d, p);
  }
  if (map.bounds.width() > 0.0) {
    // Outer walls: repel from the nearest boundary edge.
    const Rect& b = map.bounds;
    struct Edge {
      Vec2 a, bpt;
    } edges[4] = {{{b.xmin, b.ymin}, {b.xmax, b.ymin}},
                  {{b.xmax, b.ymin}, {b.xmax, b.ymax}},
                  {{b.xmax, b.ymax}, {b.xmin, b.ymax}},
                  {{b.xmin, b.ymax}, {b.xmin, b.ymin}}};
    for (const auto& e : edges) {
      Vec2 seg = e.bpt - e.a;
      double len2 = seg.squared_norm();
      double t = len2 > 0.0
                     ? std::clamp((self.position - e.a).dot(seg) / len2, 0.0, 1.0)
                     : 0.0;
      Vec2 q = e.a + seg * t;
      double d = distance(self.position, q);
      if (d < 1e-9) continue;
      accel += (self.position - q).normalized() *
               social_repulsion_magnitude(self.radius, d, p);
    }
  }
  return accel;
}

// One semi-implicit Euler step for every pedestrian.
inline void social_force_step(std::vector<PedestrianState>& peds,
                              const Vec2& robot_position, double robot_radius,
                              const MapGeometry& map, double dt,
                              const SocialForceParams& p = {}) {
  std::vector<Vec2> accel(peds.size());
  for (std::size_t i = 0; i < peds.size(); ++i) {
    accel[i] = social_force_accel(peds, i, robot_position, robot_radius, map, p);
  }
  for (std::size_t i = 0; i < peds.size(); ++i) {
    peds[i].velocity += accel[i] * dt;
    double speed = peds[i].velocity.norm();
    if (speed > p.v_max) {
      peds[i].velocity = peds[i].velocity * (p.v_max / speed);
    }
    peds[i].position += peds[i].velocity * dt;
  }
}

}  // namespace navfuse
