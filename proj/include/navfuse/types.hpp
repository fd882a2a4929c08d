// Canonical data types shared by every module: actions, observations,
// explanations, policy decisions, episode specs and results.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "navfuse/geometry.hpp"

namespace navfuse {

inline constexpr double kMaxSteer = 0.6;     // rad
inline constexpr double kMaxThrottle = 1.0;  // normalized; negative = braking

enum class DiscreteAction { MOVE_FORWARD, TURN_LEFT, TURN_RIGHT, STOP };

inline const char* to_string(DiscreteAction a) {
  switch (a) {
    case DiscreteAction::MOVE_FORWARD: return "MOVE_FORWARD";
    case DiscreteAction::TURN_LEFT: return "TURN_LEFT";
    case DiscreteAction::TURN_RIGHT: return "TURN_RIGHT";
    case DiscreteAction::STOP: return "STOP";
  }
  return "?";
}

inline std::optional<DiscreteAction> discrete_action_from_string(
    const std::string& s) {
  if (s == "MOVE_FORWARD") return DiscreteAction::MOVE_FORWARD;
  if (s == "TURN_LEFT") return DiscreteAction::TURN_LEFT;
  if (s == "TURN_RIGHT") return DiscreteAction::TURN_RIGHT;
  if (s == "STOP") return DiscreteAction::STOP;
  return std::nullopt;
}

inline const std::vector<DiscreteAction>& all_discrete_actions() {
  static const std::vector<DiscreteAction> k = {
      DiscreteAction::MOVE_FORWARD, DiscreteAction::TURN_LEFT,
      DiscreteAction::TURN_RIGHT, DiscreteAction::STOP};
  return k;
}

struct ContinuousCommand {
  double steer = 0.0;     // rad, clamped to [-kMaxSteer, kMaxSteer]
  double throttle = 0.0;  // [-1, 1], negative = braking

  bool operator==(const ContinuousCommand&) const = default;
};

// Tagged union of a discrete navigation action and a continuous control
// command. Continuous fields are clamped into range on construction.
struct ActionCommand {
  std::variant<DiscreteAction, ContinuousCommand> value =
      DiscreteAction::STOP;

  static ActionCommand discrete(DiscreteAction kind) {
    ActionCommand a;
    a.value = kind;
    return a;
  }

  static ActionCommand continuous(double steer, double throttle) {
    ActionCommand a;
    a.value = ContinuousCommand{std::clamp(steer, -kMaxSteer, kMaxSteer),
                                std::clamp(throttle, -kMaxThrottle,
                                           kMaxThrottle)};
    return a;
  }

  bool is_discrete() const {
    return std::holds_alternative<DiscreteAction>(value);
  }
  DiscreteAction kind() const { return std::get<DiscreteAction>(value); }
  const ContinuousCommand& cont() const {
    return std::get<ContinuousCommand>(value);
  }

  bool operator==(const ActionCommand&) const = default;
};

enum class ActionSpace { Discrete, Continuous };

// A symbolic detection standing in for a perceived visual feature. The id is
// stable within one Observation so explanations can cite (and erasure can
// remove) individual features.
struct FeatureDetection {
  std::string id;
  std::string label;                            // "pedestrian", "dog", ...
  double bearing = 0.0;                         // rad relative to heading
  double range = 0.0;                           // m, >= 0
  std::map<std::string, std::string> attributes;  // e.g. crossing=true

  bool operator==(const FeatureDetection&) const = default;
};

// One timestep of emulated sensor data.
struct Observation {
  double t = 0.0;
  Vec2 position_fix;
  Vec2 position_fix_std;  // per-axis standard deviation, >= 0
  double odo_distance = 0.0;
  double odo_heading = 0.0;  // rad since last step
  double heading = 0.0;      // rad
  double speed = 0.0;        // m/s, >= 0
  std::vector<double> depth_scan;  // ray distances over [-pi/2, +pi/2]
  // Matching scan cast against static geometry only; used to restore rays
  // when erasing a feature. Empty when unknown.
  std::vector<double> static_depth_scan;
  double depth_max_range = 12.0;
  std::vector<FeatureDetection> features;
  std::set<std::string> context_tags;
  std::optional<std::string> instruction;

  bool operator==(const Observation&) const = default;
};

// Bearing of depth ray i out of n, evenly spaced over [-pi/2, +pi/2].
inline double depth_ray_bearing(int i, int n) {
  if (n <= 1) return 0.0;
  return -kPi / 2.0 + kPi * static_cast<double>(i) / (n - 1);
}

struct Explanation {
  std::string text;
  // Feature ids this rationale rests on, most important first.
  std::vector<std::string> cited_feature_ids;
  std::optional<double> confidence_note;  // self-assessment in [0,1]

  bool operator==(const Explanation&) const = default;
};

// An action proposal from one branch: the action itself, a nonnegative
// confidence, an optional distribution over discrete actions and an optional
// explanation.
struct PolicyDecision {
  ActionCommand action;
  double confidence = 0.0;
  std::optional<std::map<DiscreteAction, double>> action_distribution;
  std::optional<Explanation> explanation;

  bool operator==(const PolicyDecision&) const = default;
};

// Throws std::invalid_argument when the decision violates its invariants:
// negative confidence, a distribution that does not sum to 1 (within 1e-9),
// or a distribution argmax that disagrees with the chosen action.
inline void validate_decision(const PolicyDecision& d) {
  if (!(d.confidence >= 0.0)) {
    throw std::invalid_argument("PolicyDecision: confidence must be >= 0");
  }
  if (d.action_distribution) {
    double sum = 0.0;
    double best_p = -1.0;
    DiscreteAction best = DiscreteAction::STOP;
    for (const auto& [k, p] : *d.action_distribution) {
      sum += p;
      if (p > best_p) {
        best_p = p;
        best = k;
      }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument(
          "PolicyDecision: action_distribution must sum to 1");
    }
    if (d.action.is_discrete() && best != d.action.kind()) {
      throw std::invalid_argument(
          "PolicyDecision: distribution argmax disagrees with action");
    }
  }
}

// Builds a discrete decision from a normalized score map. The action is the
// distribution argmax and the confidence its probability.
inline PolicyDecision decision_from_distribution(
    const std::map<DiscreteAction, double>& dist) {
  double best_p = -1.0;
  DiscreteAction best = DiscreteAction::STOP;
  for (const auto& [k, p] : dist) {
    if (p > best_p) {
      best_p = p;
      best = k;
    }
  }
  PolicyDecision d;
  d.action = ActionCommand::discrete(best);
  d.confidence = best_p;
  d.action_distribution = dist;
  validate_decision(d);
  return d;
}

enum class Domain { Indoor, Outdoor, Social };

inline const char* to_string(Domain d) {
  switch (d) {
    case Domain::Indoor: return "indoor";
    case Domain::Outdoor: return "outdoor";
    case Domain::Social: return "social";
  }
  return "?";
}

inline std::optional<Domain> domain_from_string(const std::string& s) {
  if (s == "indoor") return Domain::Indoor;
  if (s == "outdoor") return Domain::Outdoor;
  if (s == "social") return Domain::Social;
  return std::nullopt;
}

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  bool operator==(const Pose&) const = default;
};

struct PedestrianSpec {
  Vec2 position;
  Vec2 goal;
  double v0 = 1.2;      // preferred speed, > 0
  double radius = 0.25;  // > 0
  std::string label = "pedestrian";

  bool operator==(const PedestrianSpec&) const = default;
};

// A static symbolic scene element ("tree", "sign", ...) the sensor stack can
// report as a FeatureDetection.
struct MarkerSpec {
  std::string id;
  std::string label;
  Vec2 position;
  std::map<std::string, std::string> attributes;

  bool operator==(const MarkerSpec&) const = default;
};

struct EpisodeSpec {
  std::string id;
  Domain domain = Domain::Indoor;
  MapGeometry map;
  Pose start_pose;
  Vec2 goal;
  double goal_tolerance = 3.0;
  std::vector<PedestrianSpec> pedestrians;
  std::vector<MarkerSpec> markers;
  std::set<std::string> context_tags;
  std::optional<std::string> instruction;
  std::uint64_t seed = 0;
  int max_steps = 600;
  double dt = 0.1;

  bool operator==(const EpisodeSpec&) const = default;
};

// Validates the structural invariants a spec must satisfy before it can be
// simulated. Returns an empty string when valid, else a diagnostic.
inline std::string validate_episode_spec(const EpisodeSpec& spec) {
  if (spec.id.empty()) return "id must be nonempty";
  if (!(spec.dt > 0.0)) return "dt must be > 0";
  if (spec.max_steps <= 0) return "max_steps must be > 0";
  if (!(spec.goal_tolerance > 0.0)) return "goal_tolerance must be > 0";
  const MapGeometry& m = spec.map;
  if (!(m.bounds.width() > 0.0) || !(m.bounds.height() > 0.0)) {
    return "map bounds must have positive area";
  }
  Vec2 start{spec.start_pose.x, spec.start_pose.y};
  if (!m.bounds.contains(start)) return "start outside bounds";
  if (!m.bounds.contains(spec.goal)) return "goal outside bounds";
  for (const auto& poly : m.obstacles) {
    if (poly.vertices.size() < 3) return "obstacle polygon needs >= 3 vertices";
    if (point_in_polygon(start, poly)) return "start inside an obstacle";
    if (point_in_polygon(spec.goal, poly)) return "goal inside an obstacle";
  }
  for (const auto& p : spec.pedestrians) {
    if (!(p.v0 > 0.0)) return "pedestrian v0 must be > 0";
    if (!(p.radius > 0.0)) return "pedestrian radius must be > 0";
  }
  return "";
}

// Compact per-step record kept in episode results.
struct ObservationSummary {
  double t = 0.0;
  Vec2 fix;
  double heading = 0.0;
  double speed = 0.0;
  double min_depth = 0.0;
  std::vector<std::string> feature_ids;

  bool operator==(const ObservationSummary&) const = default;
};

struct StepRecord {
  ObservationSummary obs;
  ActionCommand action;  // the fused command actually executed
  double alpha = 0.0;    // fusion weight at this step
  std::optional<Explanation> explanation;
  std::optional<double> faithfulness;  // F in [0,1], when an erasure check ran

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeResult {
  std::string episode_id;
  std::string mode;  // classical | single_branch | no_fusion | proposed
  Domain domain = Domain::Indoor;
  bool success = false;
  double l_opt = 0.0;    // shortest path length, m
  double l_agent = 0.0;  // path length actually driven, m
  int collisions = 0;
  int pedestrian_collisions = 0;
  std::vector<StepRecord> steps;
  std::string terminated_reason;  // goal | collision | max_steps | unreachable

  bool operator==(const EpisodeResult&) const = default;
};

}  // namespace navfuse
