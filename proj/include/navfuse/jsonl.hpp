// Strict JSONL serialization for episode specs and results.
//
// The schema is closed: every key is required (nullable where noted), unknown
// keys are rejected, and parse(serialize(x)) == x for all valid records.
// Field order is fixed so benchmark files are byte-stable.
#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "navfuse/result.hpp"
#include "navfuse/types.hpp"

namespace navfuse {

using Json = nlohmann::ordered_json;

inline constexpr int kRecordSchemaVersion = 1;

using ParsedRecord = std::variant<EpisodeSpec, EpisodeResult>;

namespace jsonl_detail {

struct ParseError {
  std::string message;
};

// Context for error reporting: line number plus a dotted field path.
class Cursor {
 public:
  Cursor(const Json& node, int line, std::string path)
      : node_(&node), line_(line), path_(std::move(path)) {}

  const Json& node() const { return *node_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError{"line " + std::to_string(line_) + ", field '" + path_ +
                     "': " + what};
  }

  Cursor child(const std::string& key) const {
    auto it = node_->find(key);
    if (it == node_->end()) fail("missing required field '" + key + "'");
    return Cursor(*it, line_, path_.empty() ? key : path_ + "." + key);
  }

  Cursor element(std::size_t i) const {
    return Cursor((*node_)[i], line_,
                  path_ + "[" + std::to_string(i) + "]");
  }

  // Rejects any key not in the allowed list, naming the offender.
  void check_closed(std::initializer_list<const char*> allowed) const {
    if (!node_->is_object()) fail("expected an object");
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      bool known = false;
      for (const char* k : allowed) {
        if (it.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) fail("unknown field '" + it.key() + "'");
    }
  }

  double as_double() const {
    if (!node_->is_number()) fail("expected a number");
    return node_->get<double>();
  }
  int as_int() const {
    if (!node_->is_number_integer()) fail("expected an integer");
    return node_->get<int>();
  }
  std::uint64_t as_u64() const {
    if (!node_->is_number_unsigned() && !node_->is_number_integer()) {
      fail("expected an unsigned integer");
    }
    return node_->get<std::uint64_t>();
  }
  bool as_bool() const {
    if (!node_->is_boolean()) fail("expected a boolean");
    return node_->get<bool>();
  }
  std::string as_string() const {
    if (!node_->is_string()) fail("expected a string");
    return node_->get<std::string>();
  }
  const Json& as_array(std::size_t exact_size = 0) const {
    if (!node_->is_array()) fail("expected an array");
    if (exact_size > 0 && node_->size() != exact_size) {
      fail("expected an array of size " + std::to_string(exact_size));
    }
    return *node_;
  }

 private:
  const Json* node_;
  int line_;
  std::string path_;
};

inline Json vec2_to_json(const Vec2& v) { return Json::array({v.x, v.y}); }

inline Vec2 vec2_from(const Cursor& c) {
  c.as_array(2);
  return Vec2{c.element(0).as_double(), c.element(1).as_double()};
}

inline Json map_to_json(const MapGeometry& m) {
  Json j;
  j["bounds"] = Json::array(
      {m.bounds.xmin, m.bounds.ymin, m.bounds.xmax, m.bounds.ymax});
  Json obstacles = Json::array();
  for (const auto& poly : m.obstacles) {
    Json verts = Json::array();
    for (const auto& v : poly.vertices) verts.push_back(vec2_to_json(v));
    obstacles.push_back(verts);
  }
  j["obstacles"] = obstacles;
  return j;
}

inline MapGeometry map_from(const Cursor& c) {
  c.check_closed({"bounds", "obstacles"});
  MapGeometry m;
  Cursor b = c.child("bounds");
  b.as_array(4);
  m.bounds = Rect{b.element(0).as_double(), b.element(1).as_double(),
                  b.element(2).as_double(), b.element(3).as_double()};
  Cursor obs = c.child("obstacles");
  obs.as_array();
  for (std::size_t i = 0; i < obs.node().size(); ++i) {
    Cursor poly = obs.element(i);
    poly.as_array();
    Polygon p;
    for (std::size_t k = 0; k < poly.node().size(); ++k) {
      p.vertices.push_back(vec2_from(poly.element(k)));
    }
    m.obstacles.push_back(std::move(p));
  }
  return m;
}

inline Json attributes_to_json(const std::map<std::string, std::string>& a) {
  Json j = Json::object();
  for (const auto& [k, v] : a) j[k] = v;
  return j;
}

inline std::map<std::string, std::string> attributes_from(const Cursor& c) {
  if (!c.node().is_object()) c.fail("expected an object");
  std::map<std::string, std::string> out;
  for (auto it = c.node().begin(); it != c.node().end(); ++it) {
    if (!it.value().is_string()) c.fail("attribute values must be strings");
    out[it.key()] = it.value().get<std::string>();
  }
  return out;
}

inline Json tags_to_json(const std::set<std::string>& tags) {
  Json j = Json::array();
  for (const auto& t : tags) j.push_back(t);
  return j;
}

inline std::set<std::string> tags_from(const Cursor& c) {
  c.as_array();
  std::set<std::string> out;
  for (std::size_t i = 0; i < c.node().size(); ++i) {
    out.insert(c.element(i).as_string());
  }
  return out;
}

inline Json action_to_json(const ActionCommand& a) {
  Json j;
  if (a.is_discrete()) {
    j["kind"] = to_string(a.kind());
  } else {
    j["steer"] = a.cont().steer;
    j["throttle"] = a.cont().throttle;
  }
  return j;
}

inline ActionCommand action_from(const Cursor& c) {
  if (!c.node().is_object()) c.fail("expected an object");
  if (c.node().contains("kind")) {
    c.check_closed({"kind"});
    auto kind = discrete_action_from_string(c.child("kind").as_string());
    if (!kind) c.fail("unknown discrete action kind");
    return ActionCommand::discrete(*kind);
  }
  c.check_closed({"steer", "throttle"});
  return ActionCommand::continuous(c.child("steer").as_double(),
                                   c.child("throttle").as_double());
}

inline Json explanation_to_json(const Explanation& e) {
  Json j;
  j["text"] = e.text;
  Json ids = Json::array();
  for (const auto& id : e.cited_feature_ids) ids.push_back(id);
  j["cited_feature_ids"] = ids;
  j["confidence_note"] =
      e.confidence_note ? Json(*e.confidence_note) : Json(nullptr);
  return j;
}

inline Explanation explanation_from(const Cursor& c) {
  c.check_closed({"text", "cited_feature_ids", "confidence_note"});
  Explanation e;
  e.text = c.child("text").as_string();
  Cursor ids = c.child("cited_feature_ids");
  ids.as_array();
  for (std::size_t i = 0; i < ids.node().size(); ++i) {
    e.cited_feature_ids.push_back(ids.element(i).as_string());
  }
  Cursor note = c.child("confidence_note");
  if (!note.node().is_null()) e.confidence_note = note.as_double();
  return e;
}

}  // namespace jsonl_detail

inline std::string serialize_episode_record(const EpisodeSpec& spec) {
  using namespace jsonl_detail;
  Json j;
  j["kind"] = "episode_spec";
  j["schema_version"] = kRecordSchemaVersion;
  j["id"] = spec.id;
  j["domain"] = to_string(spec.domain);
  j["seed"] = spec.seed;
  j["dt"] = spec.dt;
  j["max_steps"] = spec.max_steps;
  j["map"] = map_to_json(spec.map);
  j["start"] =
      Json::array({spec.start_pose.x, spec.start_pose.y, spec.start_pose.heading});
  j["goal"] = vec2_to_json(spec.goal);
  j["goal_tolerance"] = spec.goal_tolerance;
  Json peds = Json::array();
  for (const auto& p : spec.pedestrians) {
    Json pj;
    pj["position"] = vec2_to_json(p.position);
    pj["goal"] = vec2_to_json(p.goal);
    pj["v0"] = p.v0;
    pj["radius"] = p.radius;
    pj["label"] = p.label;
    peds.push_back(pj);
  }
  j["pedestrians"] = peds;
  Json markers = Json::array();
  for (const auto& m : spec.markers) {
    Json mj;
    mj["id"] = m.id;
    mj["label"] = m.label;
    mj["position"] = vec2_to_json(m.position);
    mj["attributes"] = attributes_to_json(m.attributes);
    markers.push_back(mj);
  }
  j["markers"] = markers;
  j["context_tags"] = tags_to_json(spec.context_tags);
  j["instruction"] = spec.instruction ? Json(*spec.instruction) : Json(nullptr);
  return j.dump();
}

inline std::string serialize_episode_record(const EpisodeResult& r) {
  using namespace jsonl_detail;
  Json j;
  j["kind"] = "episode_result";
  j["schema_version"] = kRecordSchemaVersion;
  j["episode_id"] = r.episode_id;
  j["mode"] = r.mode;
  j["domain"] = to_string(r.domain);
  j["success"] = r.success ? 1 : 0;
  j["l_opt"] = r.l_opt;
  j["l_agent"] = r.l_agent;
  j["collisions"] = r.collisions;
  j["pedestrian_collisions"] = r.pedestrian_collisions;
  j["terminated_reason"] = r.terminated_reason;
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json sj;
    sj["t"] = s.obs.t;
    sj["fix"] = vec2_to_json(s.obs.fix);
    sj["heading"] = s.obs.heading;
    sj["speed"] = s.obs.speed;
    sj["min_depth"] = s.obs.min_depth;
    Json ids = Json::array();
    for (const auto& id : s.obs.feature_ids) ids.push_back(id);
    sj["feature_ids"] = ids;
    sj["action"] = action_to_json(s.action);
    sj["alpha"] = s.alpha;
    sj["explanation"] =
        s.explanation ? explanation_to_json(*s.explanation) : Json(nullptr);
    sj["faithfulness"] =
        s.faithfulness ? Json(*s.faithfulness) : Json(nullptr);
    steps.push_back(sj);
  }
  j["steps"] = steps;
  return j.dump();
}

// Parses one JSONL line into a spec or result. line_no is used only for
// diagnostics. Malformed input yields an error naming the line and field.
inline Result<ParsedRecord> parse_episode_record(const std::string& line,
                                                 int line_no = 1) {
  using namespace jsonl_detail;
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    return Result<ParsedRecord>::fail("line " + std::to_string(line_no) +
                                      ": not valid JSON");
  }
  try {
    Cursor root(j, line_no, "");
    if (!j.is_object()) root.fail("expected an object");
    std::string kind = root.child("kind").as_string();
    int version = root.child("schema_version").as_int();
    if (version != kRecordSchemaVersion) {
      root.fail("unsupported schema_version " + std::to_string(version));
    }
    if (kind == "episode_spec") {
      root.check_closed({"kind", "schema_version", "id", "domain", "seed",
                         "dt", "max_steps", "map", "start", "goal",
                         "goal_tolerance", "pedestrians", "markers",
                         "context_tags", "instruction"});
      EpisodeSpec spec;
      spec.id = root.child("id").as_string();
      auto domain = domain_from_string(root.child("domain").as_string());
      if (!domain) root.child("domain").fail("unknown domain");
      spec.domain = *domain;
      spec.seed = root.child("seed").as_u64();
      spec.dt = root.child("dt").as_double();
      spec.max_steps = root.child("max_steps").as_int();
      spec.map = map_from(root.child("map"));
      Cursor start = root.child("start");
      start.as_array(3);
      spec.start_pose = Pose{start.element(0).as_double(),
                             start.element(1).as_double(),
                             start.element(2).as_double()};
      spec.goal = vec2_from(root.child("goal"));
      spec.goal_tolerance = root.child("goal_tolerance").as_double();
      Cursor peds = root.child("pedestrians");
      peds.as_array();
      for (std::size_t i = 0; i < peds.node().size(); ++i) {
        Cursor pc = peds.element(i);
        pc.check_closed({"position", "goal", "v0", "radius", "label"});
        PedestrianSpec p;
        p.position = vec2_from(pc.child("position"));
        p.goal = vec2_from(pc.child("goal"));
        p.v0 = pc.child("v0").as_double();
        p.radius = pc.child("radius").as_double();
        p.label = pc.child("label").as_string();
        spec.pedestrians.push_back(std::move(p));
      }
      Cursor markers = root.child("markers");
      markers.as_array();
      for (std::size_t i = 0; i < markers.node().size(); ++i) {
        Cursor mc = markers.element(i);
        mc.check_closed({"id", "label", "position", "attributes"});
        MarkerSpec m;
        m.id = mc.child("id").as_string();
        m.label = mc.child("label").as_string();
        m.position = vec2_from(mc.child("position"));
        m.attributes = attributes_from(mc.child("attributes"));
        spec.markers.push_back(std::move(m));
      }
      spec.context_tags = tags_from(root.child("context_tags"));
      Cursor instr = root.child("instruction");
      if (!instr.node().is_null()) spec.instruction = instr.as_string();
      return Result<ParsedRecord>::ok(ParsedRecord{std::move(spec)});
    }
    if (kind == "episode_result") {
      root.check_closed({"kind", "schema_version", "episode_id", "mode",
                         "domain", "success", "l_opt", "l_agent", "collisions",
                         "pedestrian_collisions", "terminated_reason",
                         "steps"});
      EpisodeResult r;
      r.episode_id = root.child("episode_id").as_string();
      r.mode = root.child("mode").as_string();
      auto domain = domain_from_string(root.child("domain").as_string());
      if (!domain) root.child("domain").fail("unknown domain");
      r.domain = *domain;
      int success = root.child("success").as_int();
      if (success != 0 && success != 1) {
        root.child("success").fail("success must be 0 or 1");
      }
      r.success = success == 1;
      r.l_opt = root.child("l_opt").as_double();
      r.l_agent = root.child("l_agent").as_double();
      r.collisions = root.child("collisions").as_int();
      r.pedestrian_collisions = root.child("pedestrian_collisions").as_int();
      r.terminated_reason = root.child("terminated_reason").as_string();
      Cursor steps = root.child("steps");
      steps.as_array();
      for (std::size_t i = 0; i < steps.node().size(); ++i) {
        Cursor sc = steps.element(i);
        sc.check_closed({"t", "fix", "heading", "speed", "min_depth",
                         "feature_ids", "action", "alpha", "explanation",
                         "faithfulness"});
        StepRecord s;
        s.obs.t = sc.child("t").as_double();
        s.obs.fix = vec2_from(sc.child("fix"));
        s.obs.heading = sc.child("heading").as_double();
        s.obs.speed = sc.child("speed").as_double();
        s.obs.min_depth = sc.child("min_depth").as_double();
        Cursor ids = sc.child("feature_ids");
        ids.as_array();
        for (std::size_t k = 0; k < ids.node().size(); ++k) {
          s.obs.feature_ids.push_back(ids.element(k).as_string());
        }
        s.action = action_from(sc.child("action"));
        s.alpha = sc.child("alpha").as_double();
        Cursor expl = sc.child("explanation");
        if (!expl.node().is_null()) s.explanation = explanation_from(expl);
        Cursor f = sc.child("faithfulness");
        if (!f.node().is_null()) s.faithfulness = f.as_double();
        r.steps.push_back(std::move(s));
      }
      return Result<ParsedRecord>::ok(ParsedRecord{std::move(r)});
    }
    root.child("kind").fail("unknown record kind '" + kind + "'");
  } catch (const ParseError& e) {
    return Result<ParsedRecord>::fail(e.message);
  }
  return Result<ParsedRecord>::fail("unreachable");
}

}  // namespace navfuse
