// The semantic (VLM-branch) interface and the deterministic scripted backend
// that stands in for a fine-tuned model: a rule cascade producing an action
// distribution plus a feature-citing explanation.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "navfuse/geometric.hpp"
#include "navfuse/result.hpp"
#include "navfuse/types.hpp"

namespace navfuse {

// Behavior contract for any semantic policy backend. Implementations must
// populate action_distribution (discrete mode) and an Explanation citing only
// feature ids present in the observation. Transport or model failures are
// reported through the Result, never thrown.
class SemanticBackend {
 public:
  virtual ~SemanticBackend() = default;
  virtual Result<PolicyDecision> decide(const std::string& prompt,
                                        const Observation& obs,
                                        ActionSpace mode) = 0;
  virtual std::string name() const = 0;
};

struct ScriptedConfig {
  double crossing_stop_range = 8.0;  // m, stop early for crossing features
  double obstacle_stop_range = 0.45;  // m, depth-based stop (no speed margin)
  double turn_trigger_range = 3.0;   // m, instruction turns fire near walls
  double corridor_halfwidth = 0.35;  // m, shared corridor definition
  // Rule scores feeding the softmax distribution. Crossing evidence is
  // graded: each additional crossing feature beyond the first adds to the
  // STOP score (capped), so removing some of several causes produces a
  // measurable confidence drop.
  double score_crossing = 5.0;
  double score_crossing_extra = 1.0;  // per additional crosser
  double score_crossing_extra_cap = 2.0;
  double score_obstacle = 5.0;
  double score_turn = 2.5;
  double score_forward = 2.0;
  double score_floor = 0.3;
  // Continuous-mode predictive std reported per output.
  double sigma_steer = 0.08;
  double sigma_throttle = 0.15;
  double sigma_steer_ref = 0.1;
  double sigma_throttle_ref = 0.2;
};

inline std::map<DiscreteAction, double> softmax_scores(
    const std::map<DiscreteAction, double>& scores) {
  double max_s = -std::numeric_limits<double>::infinity();
  for (const auto& [k, s] : scores) max_s = std::max(max_s, s);
  double sum = 0.0;
  std::map<DiscreteAction, double> out;
  for (const auto& [k, s] : scores) {
    double e = std::exp(s - max_s);
    out[k] = e;
    sum += e;
  }
  for (auto& [k, v] : out) v /= sum;
  return out;
}

// Multiplies the backend's self-assessment (clamped to [0.1, 1]) into the
// confidence when present.
inline double apply_confidence_note(double p,
                                    const std::optional<Explanation>& e) {
  if (e && e->confidence_note) {
    return p * std::clamp(*e->confidence_note, 0.1, 1.0);
  }
  return p;
}

// Confidence for a continuous action from reported predictive stds,
// mirroring the AKF map so the two branches stay commensurable.
inline double continuous_confidence(double sigma_steer, double sigma_throttle,
                                    const ScriptedConfig& cfg) {
  return (1.0 / (1.0 + sigma_steer / cfg.sigma_steer_ref)) *
         (1.0 / (1.0 + sigma_throttle / cfg.sigma_throttle_ref));
}

// Deterministic rule cascade:
//   1. a crossing-tagged feature in range -> STOP, citing it;
//   2. an obstacle inside the (speed-blind) stop range -> STOP;
//   3. an instruction turn cue with its trigger condition -> TURN;
//   4. otherwise MOVE_FORWARD.
// The returned distribution is a softmax over rule scores and p_VLM is the
// probability of the chosen action.
inline PolicyDecision scripted_decide(const Observation& obs, ActionSpace mode,
                                      const ScriptedConfig& cfg = {}) {
  std::map<DiscreteAction, double> scores = {
      {DiscreteAction::MOVE_FORWARD, cfg.score_forward},
      {DiscreteAction::TURN_LEFT, cfg.score_floor},
      {DiscreteAction::TURN_RIGHT, cfg.score_floor},
      {DiscreteAction::STOP, cfg.score_floor}};

  Explanation expl;

  // Rule 1: crossing features (the nearest one is the headline cause).
  const FeatureDetection* crosser = nullptr;
  int crosser_count = 0;
  for (const auto& f : obs.features) {
    auto it = f.attributes.find("crossing");
    if (it != f.attributes.end() && it->second == "true" &&
        f.range < cfg.crossing_stop_range) {
      ++crosser_count;
      if (!crosser || f.range < crosser->range) crosser = &f;
    }
  }

  double forward_depth = min_forward_depth(obs, cfg.corridor_halfwidth);
  bool obstacle_close = forward_depth < cfg.obstacle_stop_range;

  if (crosser) {
    scores[DiscreteAction::STOP] =
        cfg.score_crossing +
        std::min(cfg.score_crossing_extra * (crosser_count - 1),
                 cfg.score_crossing_extra_cap);
    if (crosser->label == "pedestrian") {
      expl.text = "Halting as a pedestrian is detected in the crossing zone.";
    } else {
      expl.text =
          "Stopping because a " + crosser->label + " is crossing the road.";
    }
    expl.cited_feature_ids.push_back(crosser->id);
    // A second crossing feature, if any, is cited as a secondary cause.
    for (const auto& f : obs.features) {
      if (&f == crosser) continue;
      auto it = f.attributes.find("crossing");
      if (it != f.attributes.end() && it->second == "true" &&
          f.range < cfg.crossing_stop_range) {
        expl.cited_feature_ids.push_back(f.id);
        break;
      }
    }
  } else if (obstacle_close) {
    scores[DiscreteAction::STOP] = cfg.score_obstacle;
    // Cite the nearest feature in the corridor when one explains the depth
    // reading.
    const FeatureDetection* nearest = nullptr;
    for (const auto& f : obs.features) {
      if (std::abs(f.bearing) > kPi / 3.0) continue;
      if (!nearest || f.range < nearest->range) nearest = &f;
    }
    if (nearest && nearest->range < cfg.obstacle_stop_range + 1.5) {
      expl.text = "Stopping because a " + nearest->label + " is blocking the path.";
      expl.cited_feature_ids.push_back(nearest->id);
    } else {
      expl.text = "Stopping because an obstacle is directly ahead.";
    }
  } else {
    // Rule 3: instruction turn cue, triggered near a wall or a junction
    // feature.
    DiscreteAction turn = DiscreteAction::MOVE_FORWARD;
    if (obs.instruction) {
      std::string instr = *obs.instruction;
      std::transform(instr.begin(), instr.end(), instr.begin(), ::tolower);
      bool wants_left = instr.find("turn left") != std::string::npos;
      bool wants_right = instr.find("turn right") != std::string::npos;
      const FeatureDetection* junction = nullptr;
      for (const auto& f : obs.features) {
        if (f.label == "junction" && f.range < cfg.turn_trigger_range) {
          junction = &f;
          break;
        }
      }
      bool triggered =
          junction != nullptr || forward_depth < cfg.turn_trigger_range;
      if (triggered && (wants_left || wants_right)) {
        turn = wants_left ? DiscreteAction::TURN_LEFT
                          : DiscreteAction::TURN_RIGHT;
        scores[turn] = cfg.score_turn;
        expl.text = std::string("Turning ") +
                    (wants_left ? "left" : "right") + " as instructed.";
        if (junction) expl.cited_feature_ids.push_back(junction->id);
      }
    }
    if (turn == DiscreteAction::MOVE_FORWARD) {
      expl.text = "Proceeding forward because the path ahead is clear.";
    }
  }

  PolicyDecision d = decision_from_distribution(softmax_scores(scores));
  d.explanation = expl;
  d.confidence = apply_confidence_note(d.confidence, d.explanation);

  if (mode == ActionSpace::Continuous) {
    ScriptedConfig c = cfg;
    switch (d.action.kind()) {
      case DiscreteAction::STOP:
        d.action = ActionCommand::continuous(0.0, -1.0);
        break;
      case DiscreteAction::TURN_LEFT:
        d.action = ActionCommand::continuous(0.45, 0.2);
        break;
      case DiscreteAction::TURN_RIGHT:
        d.action = ActionCommand::continuous(-0.45, 0.2);
        break;
      case DiscreteAction::MOVE_FORWARD:
        d.action = ActionCommand::continuous(0.0, 0.6);
        break;
    }
    d.confidence = apply_confidence_note(
        continuous_confidence(c.sigma_steer, c.sigma_throttle, c),
        d.explanation);
  }
  return d;
}

// SemanticBackend adapter around scripted_decide. Pure and thread-safe.
class ScriptedBackend : public SemanticBackend {
 public:
  explicit ScriptedBackend(ScriptedConfig cfg = {}) : cfg_(cfg) {}

  Result<PolicyDecision> decide(const std::string& /*prompt*/,
                                const Observation& obs,
                                ActionSpace mode) override {
    return Result<PolicyDecision>::ok(scripted_decide(obs, mode, cfg_));
  }

  std::string name() const override { return "scripted"; }

  const ScriptedConfig& config() const { return cfg_; }

 private:
  ScriptedConfig cfg_;
};

// Re-infers the action with the explanation appended as prior reasoning and
// returns the probability the new distribution assigns to the original
// action. Absent result means the backend was unavailable (treated as a
// neutral multiplier by fusion). Throws when the decision has no explanation.
inline Result<double> consistency_score(SemanticBackend& backend,
                                        const Observation& obs,
                                        const std::string& prompt,
                                        const PolicyDecision& decision,
                                        ActionSpace mode) {
  if (!decision.explanation) {
    throw std::invalid_argument(
        "consistency_score: decision carries no explanation");
  }
  std::string augmented =
      prompt + "Prior reasoning: " + decision.explanation->text + "\n";
  Result<PolicyDecision> redo = backend.decide(augmented, obs, mode);
  if (!redo) return Result<double>::fail(redo.error());
  const PolicyDecision& second = redo.value();
  if (decision.action.is_discrete() && second.action_distribution) {
    auto it = second.action_distribution->find(decision.action.kind());
    double p = it != second.action_distribution->end() ? it->second : 0.0;
    return Result<double>::ok(std::clamp(p, 0.0, 1.0));
  }
  // Continuous re-inference: score 1 when the command matches closely,
  // decaying with the command-space distance.
  if (!decision.action.is_discrete() && !second.action.is_discrete()) {
    double ds = decision.action.cont().steer - second.action.cont().steer;
    double dth = decision.action.cont().throttle - second.action.cont().throttle;
    return Result<double>::ok(std::exp(-4.0 * (std::abs(ds) + std::abs(dth))));
  }
  return Result<double>::ok(0.0);
}

}  // namespace navfuse
