// Closed-loop episode execution for the four policy modes of the method
// comparison:
//
//   classical     - geometric branch only (plan + track on the filtered state)
//   single_branch - semantic branch only, alpha forced to 1
//   no_fusion     - both branches, alpha from raw confidences, no erasure or
//                   consistency adjustments
//   proposed      - full adaptive fusion
//
// Each episode owns its world, its filter, and its RNG stream, so runs are
// bit-deterministic per (spec, mode, config) and parallelize freely.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "navfuse/akf.hpp"
#include "navfuse/fusion.hpp"
#include "navfuse/generator.hpp"
#include "navfuse/geometric.hpp"
#include "navfuse/planner.hpp"
#include "navfuse/prompt.hpp"
#include "navfuse/semantic.hpp"
#include "navfuse/sensors.hpp"
#include "navfuse/world.hpp"

namespace navfuse {

enum class PolicyMode { Classical, SingleBranch, NoFusion, Proposed };

inline const char* to_string(PolicyMode m) {
  switch (m) {
    case PolicyMode::Classical: return "classical";
    case PolicyMode::SingleBranch: return "single_branch";
    case PolicyMode::NoFusion: return "no_fusion";
    case PolicyMode::Proposed: return "proposed";
  }
  return "?";
}

inline std::optional<PolicyMode> policy_mode_from_string(const std::string& s) {
  if (s == "classical") return PolicyMode::Classical;
  if (s == "single_branch") return PolicyMode::SingleBranch;
  if (s == "no_fusion") return PolicyMode::NoFusion;
  if (s == "proposed") return PolicyMode::Proposed;
  return std::nullopt;
}

struct RunnerConfig {
  MotionParams motion;
  NoiseConfig akf_noise;
  GeometricConfig geometric;
  ScriptedConfig scripted;
  FusionConfig fusion;
  SensorProfile sensors;
  SocialForceParams social;
  ActionSpace action_space = ActionSpace::Discrete;
  double robot_radius = 0.3;
  double planner_inflation = 0.7;
  double planner_resolution = 0.1;

  // Default adaptation table: degraded GPS integrity and lighting scale the
  // position-fix noise so p_AKF honestly reflects the conditions.
  RunnerConfig() {
    akf_noise.q_base =
        (Vector4() << 0.08, 0.08, 0.01, 0.15).finished().asDiagonal();
    akf_noise.r_pos_base = Matrix2::Identity() * 0.1225;  // (0.35 m)^2
    akf_noise.sigma_ref = 0.5;
    akf_noise.adaptation_table["gps_drift"] =
        NoiseMultipliers{1.0, 100.0, 1.0, 1.0};
    akf_noise.adaptation_table["low_light"] =
        NoiseMultipliers{1.0, 9.0, 1.0, 1.0};
    sensors.sigma_pos = 0.35;
  }
};

namespace runner_detail {

inline ObservationSummary summarize(const Observation& obs,
                                    const GeometricConfig& geo) {
  ObservationSummary s;
  s.t = obs.t;
  s.fix = obs.position_fix;
  s.heading = obs.heading;
  s.speed = obs.speed;
  s.min_depth = min_forward_depth(obs, geo.corridor_halfwidth);
  for (const auto& f : obs.features) s.feature_ids.push_back(f.id);
  return s;
}

}  // namespace runner_detail

// Runs one episode to termination. `backend` may be null only in classical
// mode. Invalid specs are rejected with an "unreachable"/"invalid" result
// rather than a crash.
inline EpisodeResult run_episode(const EpisodeSpec& spec, PolicyMode mode,
                                 SemanticBackend* backend,
                                 const RunnerConfig& cfg = {}) {
  EpisodeResult result;
  result.episode_id = spec.id;
  result.mode = to_string(mode);
  result.domain = spec.domain;

  std::string invalid = validate_episode_spec(spec);
  if (!invalid.empty()) {
    result.terminated_reason = "invalid_spec: " + invalid;
    result.l_opt = 1.0;
    return result;
  }

  Vec2 start{spec.start_pose.x, spec.start_pose.y};
  auto planned = plan_shortest_path(spec.map, start, spec.goal,
                                    cfg.planner_inflation,
                                    cfg.planner_resolution);
  if (!planned) {
    result.terminated_reason = "unreachable";
    result.l_opt = std::max(distance(start, spec.goal), 1e-3);
    return result;
  }
  result.l_opt = planned->length;

  WorldState world;
  world.map = spec.map;
  world.robot = {spec.start_pose.x, spec.start_pose.y, spec.start_pose.heading,
                 0.0};
  world.rng = Rng(Rng::derive_seed(spec.seed, 101));
  for (const auto& p : spec.pedestrians) {
    world.pedestrians.push_back(
        PedestrianState{p.position, {0.0, 0.0}, p.goal, p.v0, p.radius, p.label});
  }

  NavState init;
  init.mean << spec.start_pose.x, spec.start_pose.y, spec.start_pose.heading,
      0.0;
  init.cov = (Vector4() << 0.25, 0.25, 0.01, 0.04).finished().asDiagonal();
  AdaptiveKalmanFilter filter(init, cfg.akf_noise, cfg.motion);

  bool drift_active = spec.context_tags.count("gps_drift") > 0;
  bool occlusion_active = spec.context_tags.count("occlusion") > 0;

  ContinuousCommand last_command{0.0, 0.0};
  RobotPose prev_robot = world.robot;
  result.terminated_reason = "max_steps";

  for (int step = 0; step < spec.max_steps; ++step) {
    if (drift_active) {
      advance_drift_bias(world.drift_bias, spec.dt, cfg.sensors, world.rng);
    }
    double odo_d = distance(world.robot.position(), prev_robot.position());
    double odo_h = wrap_angle(world.robot.heading - prev_robot.heading);

    Observation obs =
        emulate_sensors(world, cfg.sensors, spec.context_tags, odo_d, odo_h,
                        world.rng, spec.instruction);
    append_marker_features(obs, world.robot, spec.markers, cfg.sensors,
                           occlusion_active);

    filter.predict_step(last_command, spec.dt, spec.context_tags);
    filter.observe(obs, spec.dt);

    PolicyDecision geometric =
        geometric_decide(filter.state(), *planned, obs, cfg.action_space,
                         cfg.geometric, cfg.akf_noise.sigma_ref, cfg.motion);

    FusedDecision fused;
    switch (mode) {
      case PolicyMode::Classical: {
        fused.action = geometric.action;
        fused.alpha = 0.0;
        fused.p_akf = geometric.confidence;
        fused.source = FusionSource::AKF;
        break;
      }
      case PolicyMode::SingleBranch: {
        std::string prompt = encode_observation_prompt(obs);
        Result<PolicyDecision> semantic =
            backend ? backend->decide(prompt, obs, cfg.action_space)
                    : Result<PolicyDecision>::fail("no backend");
        fused.alpha = 1.0;
        fused.p_akf = geometric.confidence;
        if (semantic.has_value()) {
          fused.action = semantic.value().action;
          fused.p_vlm_raw = semantic.value().confidence;
          fused.p_vlm_adjusted = semantic.value().confidence;
          fused.explanation = semantic.value().explanation;
          fused.source = FusionSource::VLM;
        } else {
          // Semantic-only mode with no backend answer: hold position.
          fused.action =
              cfg.action_space == ActionSpace::Discrete
                  ? ActionCommand::discrete(DiscreteAction::STOP)
                  : ActionCommand::continuous(0.0, -1.0);
          fused.source = FusionSource::VLM;
        }
        break;
      }
      case PolicyMode::NoFusion:
      case PolicyMode::Proposed: {
        std::string prompt = encode_observation_prompt(obs);
        Result<PolicyDecision> semantic =
            backend ? backend->decide(prompt, obs, cfg.action_space)
                    : Result<PolicyDecision>::fail("no backend");
        FusionConfig fusion_cfg = cfg.fusion;
        if (mode == PolicyMode::NoFusion) {
          fusion_cfg.enable_erasure = false;
          fusion_cfg.enable_consistency = false;
        }
        fused = fusion_step(geometric, semantic, backend, obs, fusion_cfg,
                            cfg.action_space);
        break;
      }
    }

    StepRecord record;
    record.obs = runner_detail::summarize(obs, cfg.geometric);
    record.action = fused.action;
    record.alpha = fused.alpha;
    record.explanation = fused.explanation;
    record.faithfulness = fused.faithfulness;
    result.steps.push_back(std::move(record));

    // Advance the world.
    last_command = to_world_command(fused.action);
    prev_robot = world.robot;
    integrate_robot(world.robot, last_command, spec.dt, cfg.motion);
    social_force_step(world.pedestrians, world.robot.position(),
                      cfg.robot_radius, world.map, spec.dt, cfg.social);
    world.t += spec.dt;
    result.l_agent += distance(world.robot.position(), prev_robot.position());

    CollisionKind collision = check_collision(world, cfg.robot_radius);
    if (collision != CollisionKind::None) {
      result.collisions += 1;
      if (collision == CollisionKind::Pedestrian) {
        result.pedestrian_collisions += 1;
      }
      result.terminated_reason =
          collision == CollisionKind::OutOfBounds ? "out_of_bounds"
                                                  : "collision";
      break;
    }
    if (distance(world.robot.position(), spec.goal) <= spec.goal_tolerance) {
      result.success = true;
      result.terminated_reason = "goal";
      break;
    }
  }
  return result;
}

}  // namespace navfuse
