// Adaptive fusion of the semantic and classical branches.
//
// The fusion weight alpha_t = p_VLM / (p_VLM + p_AKF) decides per step how
// much the semantic branch steers the final command: continuous commands are
// blended affinely, discrete actions switch to the semantic side only when
// alpha_t exceeds the threshold strictly. Before weighting, the semantic
// confidence can be adjusted by a chain-of-thought consistency re-check and
// by erasure-based verification: re-deciding with the explanation's cited
// features removed measures whether those features actually caused the
// action, and a negligible drop penalizes the confidence.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "navfuse/prompt.hpp"
#include "navfuse/semantic.hpp"
#include "navfuse/types.hpp"

namespace navfuse {

struct FusionConfig {
  double discrete_threshold = 0.5;
  int erasure_top_k = 2;
  double erasure_negligible_drop = 0.05;  // epsilon
  double erasure_penalty_floor = 0.5;     // lambda in [0, 1]
  bool enable_erasure = true;
  bool enable_consistency = true;
};

enum class FusionSource { VLM, AKF, BLEND };

inline const char* to_string(FusionSource s) {
  switch (s) {
    case FusionSource::VLM: return "vlm";
    case FusionSource::AKF: return "akf";
    case FusionSource::BLEND: return "blend";
  }
  return "?";
}

struct FusedDecision {
  ActionCommand action;
  double alpha = 0.0;
  double p_vlm_raw = 0.0;
  double p_vlm_adjusted = 0.0;
  double p_akf = 0.0;
  std::optional<double> faithfulness;
  FusionSource source = FusionSource::AKF;
  bool degenerate = false;  // both confidences were zero
  std::optional<Explanation> explanation;
};

struct FusionWeight {
  double alpha = 0.5;
  bool degenerate = false;
};

// alpha_t = p_vlm / (p_vlm + p_akf); 0.5 with a degenerate flag when both
// confidences are zero. Negative or non-finite inputs are contract errors.
inline FusionWeight fusion_weight(double p_vlm, double p_akf) {
  if (!std::isfinite(p_vlm) || !std::isfinite(p_akf) || p_vlm < 0.0 ||
      p_akf < 0.0) {
    throw std::invalid_argument(
        "fusion_weight: confidences must be finite and >= 0");
  }
  double denom = p_vlm + p_akf;
  if (denom <= 0.0) return {0.5, true};
  return {p_vlm / denom, false};
}

// Component-wise affine blend, re-clamped into command range.
inline ActionCommand fuse_continuous(double alpha, const ContinuousCommand& vlm,
                                     const ContinuousCommand& akf) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("fuse_continuous: alpha must be in [0,1]");
  }
  return ActionCommand::continuous(
      alpha * vlm.steer + (1.0 - alpha) * akf.steer,
      alpha * vlm.throttle + (1.0 - alpha) * akf.throttle);
}

// Strict-inequality switch: alpha exactly at the threshold selects the
// classical action.
inline DiscreteAction fuse_discrete(double alpha, DiscreteAction vlm,
                                    DiscreteAction akf,
                                    double threshold = 0.5) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("fuse_discrete: alpha must be in [0,1]");
  }
  return alpha > threshold ? vlm : akf;
}

// Returns a copy of the observation with the named features removed. Depth
// rays that saw a removed feature are restored to the static-map-only
// distance (or to max range when no static scan is available). Unknown ids
// are ignored. The input observation is never modified.
inline Observation erase_features(const Observation& obs,
                                  const std::vector<std::string>& feature_ids) {
  Observation out = obs;
  for (const auto& id : feature_ids) {
    auto it = std::find_if(out.features.begin(), out.features.end(),
                           [&](const FeatureDetection& f) { return f.id == id; });
    if (it == out.features.end()) continue;
    FeatureDetection erased = *it;
    out.features.erase(it);

    int n = static_cast<int>(out.depth_scan.size());
    if (n == 0) continue;
    double half_width =
        std::atan2(0.5, std::max(erased.range, 0.3));  // angular footprint
    for (int i = 0; i < n; ++i) {
      double beta = depth_ray_bearing(i, n);
      if (std::abs(wrap_angle(beta - erased.bearing)) > half_width) continue;
      if (!out.static_depth_scan.empty()) {
        out.depth_scan[i] = out.static_depth_scan[i];
      } else if (out.depth_scan[i] > erased.range - 0.75 &&
                 out.depth_scan[i] < erased.range + 0.75) {
        // No static baseline: only rays that plausibly hit the feature are
        // opened up.
        out.depth_scan[i] = out.depth_max_range;
      }
    }
  }
  return out;
}

struct ErasureOutcome {
  std::optional<double> faithfulness;  // F in [0, 1]
  double p_vlm_adjusted = 0.0;
};

// F = clamp(1 - p_after / p_before, 0, 1): the fractional drop in the
// probability of the originally chosen action after erasure.
inline double erasure_faithfulness(double p_before, double p_after) {
  if (!(p_before > 0.0)) {
    throw std::invalid_argument("erasure_faithfulness: p_before must be > 0");
  }
  return std::clamp(1.0 - p_after / p_before, 0.0, 1.0);
}

// Erasure-based verification: re-decide on the observation with the top-k
// cited features erased. A changed argmax means the explanation named the
// decisive features (F = 1). Otherwise F is the fractional confidence drop,
// and when that drop is negligible the semantic confidence is penalized by
// the factor (lambda + (1 - lambda) * F).
inline ErasureOutcome erasure_verify(SemanticBackend& backend,
                                     const Observation& obs,
                                     const PolicyDecision& decision,
                                     double p_vlm, const FusionConfig& cfg,
                                     ActionSpace mode) {
  if (!decision.explanation || decision.explanation->cited_feature_ids.empty()) {
    throw std::invalid_argument(
        "erasure_verify: decision must cite at least one feature");
  }
  if (!decision.action.is_discrete() || !decision.action_distribution) {
    // Erasure compares action probabilities; without a distribution there is
    // nothing to measure.
    return {std::nullopt, p_vlm};
  }

  std::vector<std::string> top_k;
  for (const auto& id : decision.explanation->cited_feature_ids) {
    if (static_cast<int>(top_k.size()) >= cfg.erasure_top_k) break;
    top_k.push_back(id);
  }
  Observation erased = erase_features(obs, top_k);
  Result<PolicyDecision> redo =
      backend.decide(encode_observation_prompt(erased), erased, mode);
  if (!redo) return {std::nullopt, p_vlm};

  const PolicyDecision& second = redo.value();
  DiscreteAction original = decision.action.kind();
  double p0 = 0.0;
  if (auto it = decision.action_distribution->find(original);
      it != decision.action_distribution->end()) {
    p0 = it->second;
  }
  if (p0 <= 0.0) return {std::nullopt, p_vlm};

  bool argmax_changed =
      !second.action.is_discrete() || second.action.kind() != original;
  if (argmax_changed) {
    return {1.0, p_vlm};
  }
  double p1 = 0.0;
  if (second.action_distribution) {
    if (auto it = second.action_distribution->find(original);
        it != second.action_distribution->end()) {
      p1 = it->second;
    }
  }
  double drop = 1.0 - p1 / p0;
  double f = erasure_faithfulness(p0, p1);
  double adjusted = p_vlm;
  if (drop < cfg.erasure_negligible_drop) {
    adjusted = p_vlm * (cfg.erasure_penalty_floor +
                        (1.0 - cfg.erasure_penalty_floor) * f);
  }
  return {f, adjusted};
}

// One full fusion step. The classical decision is always present; the
// semantic side may be unavailable, in which case the step degrades to the
// classical action with alpha = 0.
inline FusedDecision fusion_step(const PolicyDecision& geometric,
                                 const Result<PolicyDecision>& semantic,
                                 SemanticBackend* backend,
                                 const Observation& obs,
                                 const FusionConfig& cfg, ActionSpace mode) {
  FusedDecision out;
  out.p_akf = geometric.confidence;

  if (!semantic.has_value()) {
    out.action = geometric.action;
    out.alpha = 0.0;
    out.source = FusionSource::AKF;
    return out;
  }

  const PolicyDecision& vlm = semantic.value();
  out.p_vlm_raw = vlm.confidence;
  out.explanation = vlm.explanation;
  double p = vlm.confidence;

  if (cfg.enable_consistency && backend != nullptr && vlm.explanation) {
    Result<double> score = consistency_score(
        *backend, obs, encode_observation_prompt(obs), vlm, mode);
    if (score.has_value()) p *= score.value();
  }

  if (cfg.enable_erasure && backend != nullptr && vlm.explanation &&
      !vlm.explanation->cited_feature_ids.empty()) {
    ErasureOutcome erasure = erasure_verify(*backend, obs, vlm, p, cfg, mode);
    out.faithfulness = erasure.faithfulness;
    p = erasure.p_vlm_adjusted;
  }

  out.p_vlm_adjusted = p;
  FusionWeight w = fusion_weight(p, out.p_akf);
  out.alpha = w.alpha;
  out.degenerate = w.degenerate;

  if (mode == ActionSpace::Discrete && vlm.action.is_discrete() &&
      geometric.action.is_discrete()) {
    DiscreteAction chosen = fuse_discrete(out.alpha, vlm.action.kind(),
                                          geometric.action.kind(),
                                          cfg.discrete_threshold);
    out.action = ActionCommand::discrete(chosen);
    out.source = out.alpha > cfg.discrete_threshold ? FusionSource::VLM
                                                    : FusionSource::AKF;
  } else {
    out.action = fuse_continuous(out.alpha, vlm.action.cont(),
                                 geometric.action.cont());
    out.source = out.alpha >= 1.0 ? FusionSource::VLM
                 : out.alpha <= 0.0 ? FusionSource::AKF
                                    : FusionSource::BLEND;
  }
  return out;
}

}  // namespace navfuse
