// Global configuration: one human-readable JSON document covering noise
// profiles, filter, fusion, planner, controller, scripted-backend and
// social-force parameters, plus backend selection. Loading validates every
// key (unknown keys are rejected) and save(load(x)) is idempotent.
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "navfuse/result.hpp"
#include "navfuse/runner.hpp"

namespace navfuse {

struct BackendSelection {
  std::string type = "scripted";  // scripted | remote
  std::string endpoint = "127.0.0.1:8900";
  int timeout_ms = 2000;
};

struct GlobalConfig {
  RunnerConfig runner;
  BackendSelection backend;
};

namespace config_detail {

using Json = nlohmann::ordered_json;

class Checker {
 public:
  Checker(const Json& node, std::string path)
      : node_(&node), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("config field '" + path_ + "': " + what);
  }

  void closed(std::initializer_list<const char*> allowed) const {
    if (!node_->is_object()) fail("expected an object");
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      bool known = false;
      for (const char* k : allowed) {
        if (it.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) fail("unknown key '" + it.key() + "'");
    }
  }

  bool has(const char* key) const { return node_->contains(key); }

  Checker sub(const char* key) const {
    return Checker((*node_)[key], path_.empty() ? key : path_ + "." + key);
  }

  double number(const char* key, double fallback) const {
    if (!node_->contains(key)) return fallback;
    const Json& v = (*node_)[key];
    if (!v.is_number()) sub(key).fail("expected a number");
    return v.get<double>();
  }

  int integer(const char* key, int fallback) const {
    if (!node_->contains(key)) return fallback;
    const Json& v = (*node_)[key];
    if (!v.is_number_integer()) sub(key).fail("expected an integer");
    return v.get<int>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!node_->contains(key)) return fallback;
    const Json& v = (*node_)[key];
    if (!v.is_boolean()) sub(key).fail("expected a boolean");
    return v.get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!node_->contains(key)) return fallback;
    const Json& v = (*node_)[key];
    if (!v.is_string()) sub(key).fail("expected a string");
    return v.get<std::string>();
  }

  const Json& raw() const { return *node_; }

 private:
  const Json* node_;
  std::string path_;
};

inline Json diag4_to_json(const Matrix4& m) {
  return Json::array({m(0, 0), m(1, 1), m(2, 2), m(3, 3)});
}

inline Json diag2_to_json(const Matrix2& m) {
  return Json::array({m(0, 0), m(1, 1)});
}

}  // namespace config_detail

inline std::string save_config(const GlobalConfig& cfg) {
  using config_detail::Json;
  const RunnerConfig& r = cfg.runner;
  Json j;
  j["schema_version"] = 1;

  Json backend;
  backend["type"] = cfg.backend.type;
  backend["endpoint"] = cfg.backend.endpoint;
  backend["timeout_ms"] = cfg.backend.timeout_ms;
  j["backend"] = backend;

  j["action_space"] =
      r.action_space == ActionSpace::Discrete ? "discrete" : "continuous";
  j["robot_radius"] = r.robot_radius;

  Json akf;
  akf["sigma_ref"] = r.akf_noise.sigma_ref;
  akf["q_diag"] = config_detail::diag4_to_json(r.akf_noise.q_base);
  akf["r_pos_diag"] = config_detail::diag2_to_json(r.akf_noise.r_pos_base);
  akf["r_odo_diag"] = config_detail::diag2_to_json(r.akf_noise.r_odo_base);
  akf["r_heading"] = r.akf_noise.r_heading_base;
  Json table = Json::object();
  for (const auto& [tag, m] : r.akf_noise.adaptation_table) {
    Json entry;
    entry["q"] = m.q;
    entry["r_pos"] = m.r_pos;
    entry["r_odo"] = m.r_odo;
    entry["r_heading"] = m.r_heading;
    table[tag] = entry;
  }
  akf["adaptation"] = table;
  j["akf"] = akf;

  Json motion;
  motion["v_max"] = r.motion.v_max;
  motion["tau_v"] = r.motion.tau_v;
  motion["steer_rate_gain"] = r.motion.steer_rate_gain;
  j["motion"] = motion;

  Json fusion;
  fusion["discrete_threshold"] = r.fusion.discrete_threshold;
  fusion["erasure_top_k"] = r.fusion.erasure_top_k;
  fusion["erasure_negligible_drop"] = r.fusion.erasure_negligible_drop;
  fusion["erasure_penalty_floor"] = r.fusion.erasure_penalty_floor;
  fusion["enable_erasure"] = r.fusion.enable_erasure;
  fusion["enable_consistency"] = r.fusion.enable_consistency;
  j["fusion"] = fusion;

  Json planner;
  planner["resolution"] = r.planner_resolution;
  planner["inflation"] = r.planner_inflation;
  j["planner"] = planner;

  Json geo;
  geo["lookahead"] = r.geometric.lookahead;
  geo["stop_distance"] = r.geometric.stop_distance;
  geo["brake_headway"] = r.geometric.brake_headway;
  geo["turn_threshold_deg"] = r.geometric.turn_threshold_deg;
  geo["cruise_speed"] = r.geometric.cruise_speed;
  geo["goal_slow_gain"] = r.geometric.goal_slow_gain;
  geo["corridor_halfwidth"] = r.geometric.corridor_halfwidth;
  geo["min_pursuit_speed"] = r.geometric.min_pursuit_speed;
  j["geometric"] = geo;

  Json scripted;
  scripted["crossing_stop_range"] = r.scripted.crossing_stop_range;
  scripted["obstacle_stop_range"] = r.scripted.obstacle_stop_range;
  scripted["turn_trigger_range"] = r.scripted.turn_trigger_range;
  scripted["corridor_halfwidth"] = r.scripted.corridor_halfwidth;
  scripted["score_crossing"] = r.scripted.score_crossing;
  scripted["score_obstacle"] = r.scripted.score_obstacle;
  scripted["score_turn"] = r.scripted.score_turn;
  scripted["score_forward"] = r.scripted.score_forward;
  scripted["score_floor"] = r.scripted.score_floor;
  scripted["sigma_steer"] = r.scripted.sigma_steer;
  scripted["sigma_throttle"] = r.scripted.sigma_throttle;
  scripted["sigma_steer_ref"] = r.scripted.sigma_steer_ref;
  scripted["sigma_throttle_ref"] = r.scripted.sigma_throttle_ref;
  j["scripted"] = scripted;

  Json social;
  social["tau"] = r.social.tau;
  social["a"] = r.social.a;
  social["b"] = r.social.b;
  social["v_max"] = r.social.v_max;
  social["goal_radius"] = r.social.goal_radius;
  j["social_force"] = social;

  Json sensors;
  sensors["sigma_pos"] = r.sensors.sigma_pos;
  sensors["sigma_heading"] = r.sensors.sigma_heading;
  sensors["sigma_odo_distance"] = r.sensors.sigma_odo_distance;
  sensors["sigma_odo_heading"] = r.sensors.sigma_odo_heading;
  sensors["sigma_depth"] = r.sensors.sigma_depth;
  sensors["sigma_speed"] = r.sensors.sigma_speed;
  sensors["depth_rays"] = r.sensors.depth_rays;
  sensors["depth_max_range"] = r.sensors.depth_max_range;
  sensors["fov_deg"] = r.sensors.fov_deg;
  sensors["feature_range"] = r.sensors.feature_range;
  sensors["drift_mean_reversion"] = r.sensors.drift_mean_reversion;
  sensors["drift_sigma"] = r.sensors.drift_sigma;
  sensors["occlusion_feature_range"] = r.sensors.occlusion_feature_range;
  sensors["low_light_pos_factor"] = r.sensors.low_light_pos_factor;
  j["sensors"] = sensors;

  return j.dump(2) + "\n";
}

// Parses and validates a config document. Missing keys keep their defaults;
// unknown keys anywhere are an error.
inline Result<GlobalConfig> load_config(const std::string& text) {
  using config_detail::Checker;
  using config_detail::Json;
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return Result<GlobalConfig>::fail("config is not a JSON object");
  }
  try {
    GlobalConfig cfg;
    RunnerConfig& r = cfg.runner;
    Checker root(j, "");
    root.closed({"schema_version", "backend", "action_space", "robot_radius",
                 "akf", "motion", "fusion", "planner", "geometric", "scripted",
                 "social_force", "sensors"});
    int version = root.integer("schema_version", 1);
    if (version != 1) root.fail("unsupported schema_version");

    if (root.has("backend")) {
      Checker b = root.sub("backend");
      b.closed({"type", "endpoint", "timeout_ms"});
      cfg.backend.type = b.text("type", cfg.backend.type);
      if (cfg.backend.type != "scripted" && cfg.backend.type != "remote") {
        b.fail("type must be 'scripted' or 'remote'");
      }
      cfg.backend.endpoint = b.text("endpoint", cfg.backend.endpoint);
      cfg.backend.timeout_ms = b.integer("timeout_ms", cfg.backend.timeout_ms);
    }

    std::string space = root.text("action_space", "discrete");
    if (space == "discrete") {
      r.action_space = ActionSpace::Discrete;
    } else if (space == "continuous") {
      r.action_space = ActionSpace::Continuous;
    } else {
      root.fail("action_space must be 'discrete' or 'continuous'");
    }
    r.robot_radius = root.number("robot_radius", r.robot_radius);

    if (root.has("akf")) {
      Checker a = root.sub("akf");
      a.closed({"sigma_ref", "q_diag", "r_pos_diag", "r_odo_diag", "r_heading",
                "adaptation"});
      r.akf_noise.sigma_ref = a.number("sigma_ref", r.akf_noise.sigma_ref);
      if (!(r.akf_noise.sigma_ref > 0.0)) a.fail("sigma_ref must be > 0");
      auto read_diag = [&](const char* key, auto& matrix, int n) {
        if (!a.has(key)) return;
        const Json& arr = a.raw()[key];
        if (!arr.is_array() || static_cast<int>(arr.size()) != n) {
          a.sub(key).fail("expected an array of " + std::to_string(n));
        }
        for (int i = 0; i < n; ++i) {
          double v = arr[i].get<double>();
          if (v < 0.0) a.sub(key).fail("entries must be >= 0");
          matrix(i, i) = v;
        }
      };
      read_diag("q_diag", r.akf_noise.q_base, 4);
      read_diag("r_pos_diag", r.akf_noise.r_pos_base, 2);
      read_diag("r_odo_diag", r.akf_noise.r_odo_base, 2);
      r.akf_noise.r_heading_base =
          a.number("r_heading", r.akf_noise.r_heading_base);
      if (a.has("adaptation")) {
        Checker table = a.sub("adaptation");
        if (!table.raw().is_object()) table.fail("expected an object");
        r.akf_noise.adaptation_table.clear();
        for (auto it = table.raw().begin(); it != table.raw().end(); ++it) {
          Checker entry(it.value(), "akf.adaptation." + it.key());
          entry.closed({"q", "r_pos", "r_odo", "r_heading"});
          NoiseMultipliers m;
          m.q = entry.number("q", 1.0);
          m.r_pos = entry.number("r_pos", 1.0);
          m.r_odo = entry.number("r_odo", 1.0);
          m.r_heading = entry.number("r_heading", 1.0);
          if (m.q <= 0 || m.r_pos <= 0 || m.r_odo <= 0 || m.r_heading <= 0) {
            entry.fail("multipliers must be > 0");
          }
          r.akf_noise.adaptation_table[it.key()] = m;
        }
      }
    }

    if (root.has("motion")) {
      Checker m = root.sub("motion");
      m.closed({"v_max", "tau_v", "steer_rate_gain"});
      r.motion.v_max = m.number("v_max", r.motion.v_max);
      r.motion.tau_v = m.number("tau_v", r.motion.tau_v);
      r.motion.steer_rate_gain =
          m.number("steer_rate_gain", r.motion.steer_rate_gain);
      if (!(r.motion.v_max > 0) || !(r.motion.tau_v > 0)) {
        m.fail("v_max and tau_v must be > 0");
      }
    }

    if (root.has("fusion")) {
      Checker f = root.sub("fusion");
      f.closed({"discrete_threshold", "erasure_top_k",
                "erasure_negligible_drop", "erasure_penalty_floor",
                "enable_erasure", "enable_consistency"});
      r.fusion.discrete_threshold =
          f.number("discrete_threshold", r.fusion.discrete_threshold);
      r.fusion.erasure_top_k = f.integer("erasure_top_k", r.fusion.erasure_top_k);
      r.fusion.erasure_negligible_drop =
          f.number("erasure_negligible_drop", r.fusion.erasure_negligible_drop);
      r.fusion.erasure_penalty_floor =
          f.number("erasure_penalty_floor", r.fusion.erasure_penalty_floor);
      r.fusion.enable_erasure =
          f.boolean("enable_erasure", r.fusion.enable_erasure);
      r.fusion.enable_consistency =
          f.boolean("enable_consistency", r.fusion.enable_consistency);
      if (r.fusion.discrete_threshold < 0.0 ||
          r.fusion.discrete_threshold > 1.0 ||
          r.fusion.erasure_penalty_floor < 0.0 ||
          r.fusion.erasure_penalty_floor > 1.0) {
        f.fail("thresholds must be in [0,1]");
      }
      if (r.fusion.erasure_top_k < 1) f.fail("erasure_top_k must be >= 1");
    }

    if (root.has("planner")) {
      Checker p = root.sub("planner");
      p.closed({"resolution", "inflation"});
      r.planner_resolution = p.number("resolution", r.planner_resolution);
      r.planner_inflation = p.number("inflation", r.planner_inflation);
      if (!(r.planner_resolution > 0)) p.fail("resolution must be > 0");
    }

    if (root.has("geometric")) {
      Checker g = root.sub("geometric");
      g.closed({"lookahead", "stop_distance", "brake_headway",
                "turn_threshold_deg", "cruise_speed", "goal_slow_gain",
                "corridor_halfwidth", "min_pursuit_speed"});
      r.geometric.lookahead = g.number("lookahead", r.geometric.lookahead);
      r.geometric.stop_distance =
          g.number("stop_distance", r.geometric.stop_distance);
      r.geometric.brake_headway =
          g.number("brake_headway", r.geometric.brake_headway);
      r.geometric.turn_threshold_deg =
          g.number("turn_threshold_deg", r.geometric.turn_threshold_deg);
      r.geometric.cruise_speed =
          g.number("cruise_speed", r.geometric.cruise_speed);
      r.geometric.goal_slow_gain =
          g.number("goal_slow_gain", r.geometric.goal_slow_gain);
      r.geometric.corridor_halfwidth =
          g.number("corridor_halfwidth", r.geometric.corridor_halfwidth);
      r.geometric.min_pursuit_speed =
          g.number("min_pursuit_speed", r.geometric.min_pursuit_speed);
    }

    if (root.has("scripted")) {
      Checker s = root.sub("scripted");
      s.closed({"crossing_stop_range", "obstacle_stop_range",
                "turn_trigger_range", "corridor_halfwidth", "score_crossing",
                "score_obstacle", "score_turn", "score_forward", "score_floor",
                "sigma_steer", "sigma_throttle", "sigma_steer_ref",
                "sigma_throttle_ref"});
      r.scripted.crossing_stop_range =
          s.number("crossing_stop_range", r.scripted.crossing_stop_range);
      r.scripted.obstacle_stop_range =
          s.number("obstacle_stop_range", r.scripted.obstacle_stop_range);
      r.scripted.turn_trigger_range =
          s.number("turn_trigger_range", r.scripted.turn_trigger_range);
      r.scripted.corridor_halfwidth =
          s.number("corridor_halfwidth", r.scripted.corridor_halfwidth);
      r.scripted.score_crossing =
          s.number("score_crossing", r.scripted.score_crossing);
      r.scripted.score_obstacle =
          s.number("score_obstacle", r.scripted.score_obstacle);
      r.scripted.score_turn = s.number("score_turn", r.scripted.score_turn);
      r.scripted.score_forward =
          s.number("score_forward", r.scripted.score_forward);
      r.scripted.score_floor = s.number("score_floor", r.scripted.score_floor);
      r.scripted.sigma_steer = s.number("sigma_steer", r.scripted.sigma_steer);
      r.scripted.sigma_throttle =
          s.number("sigma_throttle", r.scripted.sigma_throttle);
      r.scripted.sigma_steer_ref =
          s.number("sigma_steer_ref", r.scripted.sigma_steer_ref);
      r.scripted.sigma_throttle_ref =
          s.number("sigma_throttle_ref", r.scripted.sigma_throttle_ref);
    }

    if (root.has("social_force")) {
      Checker s = root.sub("social_force");
      s.closed({"tau", "a", "b", "v_max", "goal_radius"});
      r.social.tau = s.number("tau", r.social.tau);
      r.social.a = s.number("a", r.social.a);
      r.social.b = s.number("b", r.social.b);
      r.social.v_max = s.number("v_max", r.social.v_max);
      r.social.goal_radius = s.number("goal_radius", r.social.goal_radius);
      if (!(r.social.tau > 0) || !(r.social.b > 0) || !(r.social.v_max > 0)) {
        s.fail("tau, b, v_max must be > 0");
      }
    }

    if (root.has("sensors")) {
      Checker s = root.sub("sensors");
      s.closed({"sigma_pos", "sigma_heading", "sigma_odo_distance",
                "sigma_odo_heading", "sigma_depth", "sigma_speed", "depth_rays",
                "depth_max_range", "fov_deg", "feature_range",
                "drift_mean_reversion", "drift_sigma",
                "occlusion_feature_range", "low_light_pos_factor"});
      r.sensors.sigma_pos = s.number("sigma_pos", r.sensors.sigma_pos);
      r.sensors.sigma_heading =
          s.number("sigma_heading", r.sensors.sigma_heading);
      r.sensors.sigma_odo_distance =
          s.number("sigma_odo_distance", r.sensors.sigma_odo_distance);
      r.sensors.sigma_odo_heading =
          s.number("sigma_odo_heading", r.sensors.sigma_odo_heading);
      r.sensors.sigma_depth = s.number("sigma_depth", r.sensors.sigma_depth);
      r.sensors.sigma_speed = s.number("sigma_speed", r.sensors.sigma_speed);
      r.sensors.depth_rays = s.integer("depth_rays", r.sensors.depth_rays);
      r.sensors.depth_max_range =
          s.number("depth_max_range", r.sensors.depth_max_range);
      r.sensors.fov_deg = s.number("fov_deg", r.sensors.fov_deg);
      r.sensors.feature_range =
          s.number("feature_range", r.sensors.feature_range);
      r.sensors.drift_mean_reversion =
          s.number("drift_mean_reversion", r.sensors.drift_mean_reversion);
      r.sensors.drift_sigma = s.number("drift_sigma", r.sensors.drift_sigma);
      r.sensors.occlusion_feature_range = s.number(
          "occlusion_feature_range", r.sensors.occlusion_feature_range);
      r.sensors.low_light_pos_factor =
          s.number("low_light_pos_factor", r.sensors.low_light_pos_factor);
      if (r.sensors.depth_rays < 2) s.fail("depth_rays must be >= 2");
    }

    return Result<GlobalConfig>::ok(cfg);
  } catch (const std::invalid_argument& e) {
    return Result<GlobalConfig>::fail(e.what());
  } catch (const nlohmann::json::exception& e) {
    return Result<GlobalConfig>::fail(std::string("config parse: ") + e.what());
  }
}

inline Result<GlobalConfig> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Result<GlobalConfig>::fail("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

}  // namespace navfuse
