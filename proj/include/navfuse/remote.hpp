// HTTP client for an external semantic model server.
//
// Wire schema v1 (JSON over POST /v1/decide; GET /v1/ping for liveness):
//
//   request  {"version":1, "request_id":"r-<n>", "prompt":"<encoded obs>",
//             "cue":"Think step by step:", "action_space":"discrete"|"continuous",
//             "features":[{"id","label","bearing","range","attributes"}...]}
//   response {"version":1, "request_id":"r-<n>",
//             "action":"STOP"|... | {"steer":s,"throttle":t},
//             "distribution":{"STOP":p,...},          // discrete only
//             "sigma":{"steer":s,"throttle":t},       // continuous only
//             "explanation":{"text":"...",
//                            "cited_feature_ids":[...],
//                            "confidence_note":x|null}}
//
// Distributions within 1e-6 of unit mass are renormalized; anything further
// off, any transport failure, or any malformed field degrades to a
// backend-unavailable result. Nothing here throws for remote misbehavior.
#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <string>

// navfuse/semantic.hpp pulls in Eigen, which must precede httplib's system
// headers in any translation unit.
#include "navfuse/semantic.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace navfuse {

struct RemoteBackendConfig {
  std::string host = "127.0.0.1";
  int port = 8900;
  int timeout_ms = 2000;
  ScriptedConfig sigma_refs;  // reference scales for continuous confidence
};

inline constexpr int kWireSchemaVersion = 1;
inline constexpr const char* kTwoStageCue = "Think step by step:";

class RemoteBackend : public SemanticBackend {
 public:
  explicit RemoteBackend(RemoteBackendConfig cfg) : cfg_(std::move(cfg)) {}

  static Result<RemoteBackendConfig> parse_endpoint(const std::string& url,
                                                    int timeout_ms) {
    // Accepts host:port or http://host:port.
    std::string rest = url;
    const std::string scheme = "http://";
    if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
      return Result<RemoteBackendConfig>::fail(
          "endpoint must look like host:port, got '" + url + "'");
    }
    RemoteBackendConfig cfg;
    cfg.host = rest.substr(0, colon);
    try {
      cfg.port = std::stoi(rest.substr(colon + 1));
    } catch (...) {
      return Result<RemoteBackendConfig>::fail("bad port in '" + url + "'");
    }
    cfg.timeout_ms = timeout_ms;
    return Result<RemoteBackendConfig>::ok(cfg);
  }

  bool ping() {
    httplib::Client client(cfg_.host, cfg_.port);
    set_timeouts(client);
    auto res = client.Get("/v1/ping");
    return res && res->status == 200;
  }

  Result<PolicyDecision> decide(const std::string& prompt,
                                const Observation& obs,
                                ActionSpace mode) override {
    nlohmann::ordered_json req;
    req["version"] = kWireSchemaVersion;
    req["request_id"] = "r-" + std::to_string(next_request_id_++);
    req["prompt"] = prompt;
    req["cue"] = kTwoStageCue;
    req["action_space"] =
        mode == ActionSpace::Discrete ? "discrete" : "continuous";
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (const auto& f : obs.features) {
      nlohmann::ordered_json fj;
      fj["id"] = f.id;
      fj["label"] = f.label;
      fj["bearing"] = f.bearing;
      fj["range"] = f.range;
      fj["attributes"] = f.attributes;
      features.push_back(fj);
    }
    req["features"] = features;

    httplib::Client client(cfg_.host, cfg_.port);
    set_timeouts(client);
    auto res = client.Post("/v1/decide", req.dump(), "application/json");
    if (!res) {
      return unavailable("transport: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      return unavailable("HTTP status " + std::to_string(res->status));
    }
    return parse_response(res->body, req["request_id"].get<std::string>(), obs,
                          mode);
  }

  std::string name() const override {
    return "remote(" + cfg_.host + ":" + std::to_string(cfg_.port) + ")";
  }

 private:
  void set_timeouts(httplib::Client& client) const {
    client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
    client.set_read_timeout(0, cfg_.timeout_ms * 1000);
    client.set_write_timeout(0, cfg_.timeout_ms * 1000);
  }

  static Result<PolicyDecision> unavailable(const std::string& why) {
    return Result<PolicyDecision>::fail("backend unavailable: " + why);
  }

  Result<PolicyDecision> parse_response(const std::string& body,
                                        const std::string& request_id,
                                        const Observation& obs,
                                        ActionSpace mode) const {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return unavailable("response is not a JSON object");
    }
    if (!j.contains("version") || j["version"] != kWireSchemaVersion) {
      return unavailable("missing or unsupported wire version");
    }
    if (j.value("request_id", "") != request_id) {
      return unavailable("request_id mismatch");
    }

    PolicyDecision d;
    if (j.contains("explanation") && j["explanation"].is_object()) {
      const auto& ej = j["explanation"];
      Explanation e;
      e.text = ej.value("text", "");
      if (ej.contains("cited_feature_ids")) {
        for (const auto& id : ej["cited_feature_ids"]) {
          if (!id.is_string()) return unavailable("cited id is not a string");
          e.cited_feature_ids.push_back(id.get<std::string>());
        }
      }
      for (const auto& id : e.cited_feature_ids) {
        bool known = false;
        for (const auto& f : obs.features) {
          if (f.id == id) {
            known = true;
            break;
          }
        }
        if (!known) {
          return unavailable("explanation cites unknown feature '" + id + "'");
        }
      }
      if (ej.contains("confidence_note") && !ej["confidence_note"].is_null()) {
        e.confidence_note = ej["confidence_note"].get<double>();
      }
      d.explanation = std::move(e);
    }

    if (mode == ActionSpace::Discrete) {
      if (!j.contains("action") || !j["action"].is_string()) {
        return unavailable("discrete response needs a string action");
      }
      auto kind = discrete_action_from_string(j["action"].get<std::string>());
      if (!kind) return unavailable("unknown action kind");
      if (!j.contains("distribution") || !j["distribution"].is_object()) {
        return unavailable("discrete response needs a distribution");
      }
      std::map<DiscreteAction, double> dist;
      for (DiscreteAction a : all_discrete_actions()) dist[a] = 0.0;
      double sum = 0.0;
      for (auto it = j["distribution"].begin(); it != j["distribution"].end();
           ++it) {
        auto a = discrete_action_from_string(it.key());
        if (!a) return unavailable("unknown action in distribution");
        if (!it.value().is_number()) {
          return unavailable("distribution values must be numbers");
        }
        double p = it.value().get<double>();
        if (p < 0.0) return unavailable("negative probability");
        dist[*a] = p;
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        return unavailable("distribution sums to " + std::to_string(sum));
      }
      for (auto& [k, v] : dist) v /= sum;  // renormalize the residual error
      PolicyDecision normalized = decision_from_distribution(dist);
      if (normalized.action.kind() != *kind) {
        return unavailable("action disagrees with distribution argmax");
      }
      normalized.explanation = d.explanation;
      normalized.confidence =
          apply_confidence_note(normalized.confidence, normalized.explanation);
      return Result<PolicyDecision>::ok(normalized);
    }

    if (!j.contains("action") || !j["action"].is_object() ||
        !j["action"].contains("steer") || !j["action"].contains("throttle")) {
      return unavailable("continuous response needs {steer, throttle}");
    }
    double steer = j["action"]["steer"].get<double>();
    double throttle = j["action"]["throttle"].get<double>();
    d.action = ActionCommand::continuous(steer, throttle);
    double sigma_steer = cfg_.sigma_refs.sigma_steer;
    double sigma_throttle = cfg_.sigma_refs.sigma_throttle;
    if (j.contains("sigma") && j["sigma"].is_object()) {
      sigma_steer = j["sigma"].value("steer", sigma_steer);
      sigma_throttle = j["sigma"].value("throttle", sigma_throttle);
      if (sigma_steer < 0.0 || sigma_throttle < 0.0) {
        return unavailable("negative sigma");
      }
    }
    d.confidence = apply_confidence_note(
        continuous_confidence(sigma_steer, sigma_throttle, cfg_.sigma_refs),
        d.explanation);
    return Result<PolicyDecision>::ok(d);
  }

  RemoteBackendConfig cfg_;
  mutable std::atomic<std::uint64_t> next_request_id_{0};
};

}  // namespace navfuse
