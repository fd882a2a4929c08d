#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "navfuse/remote.hpp"

#include <nlohmann/json.hpp>

namespace navfuse {
namespace {

using nlohmann::json;

// Minimal in-process model server for exercising the wire protocol.
class TestServer {
 public:
  using Handler = std::function<json(const json&)>;

  explicit TestServer(Handler handler) : handler_(std::move(handler)) {
    server_.Get("/v1/ping", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"version\":1}", "application/json");
    });
    server_.Post("/v1/decide",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   json in = json::parse(req.body);
                   json out = handler_(in);
                   res.set_content(out.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~TestServer() {
    server_.stop();
    thread_.join();
  }

  int port() const { return port_; }

 private:
  httplib::Server server_;
  Handler handler_;
  int port_ = 0;
  std::thread thread_;
};

Observation observation_with_feature() {
  Observation obs;
  obs.depth_scan.assign(32, 12.0);
  obs.depth_max_range = 12.0;
  FeatureDetection f;
  f.id = "f1";
  f.label = "dog";
  f.range = 4.0;
  obs.features.push_back(f);
  return obs;
}

json well_formed_response(const json& req) {
  json out;
  out["version"] = 1;
  out["request_id"] = req["request_id"];
  out["action"] = "STOP";
  out["distribution"] = {{"STOP", 0.8}, {"MOVE_FORWARD", 0.2}};
  out["explanation"] = {{"text", "Stopping because a dog is crossing the road."},
                        {"cited_feature_ids", {"f1"}},
                        {"confidence_note", nullptr}};
  return out;
}

TEST(RemoteBackend, WellFormedResponseMapsToDecision) {
  TestServer server(well_formed_response);
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  RemoteBackend backend(cfg);
  EXPECT_TRUE(backend.ping());

  Observation obs = observation_with_feature();
  auto result = backend.decide("prompt", obs, ActionSpace::Discrete);
  ASSERT_TRUE(result.has_value()) << result.error();
  const PolicyDecision& d = result.value();
  EXPECT_EQ(d.action.kind(), DiscreteAction::STOP);
  EXPECT_NEAR(d.confidence, 0.8, 1e-9);
  ASSERT_TRUE(d.explanation.has_value());
  EXPECT_EQ(d.explanation->cited_feature_ids[0], "f1");
}

TEST(RemoteBackend, RequestCarriesPromptCueAndFeatures) {
  json captured;
  TestServer server([&](const json& req) {
    captured = req;
    return well_formed_response(req);
  });
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  ASSERT_TRUE(backend.decide("the prompt", obs, ActionSpace::Discrete));
  EXPECT_EQ(captured["prompt"], "the prompt");
  EXPECT_EQ(captured["cue"], "Think step by step:");
  EXPECT_EQ(captured["action_space"], "discrete");
  ASSERT_EQ(captured["features"].size(), 1u);
  EXPECT_EQ(captured["features"][0]["id"], "f1");
  EXPECT_EQ(captured["version"], 1);
}

TEST(RemoteBackend, UnderNormalizedDistributionRejected) {
  TestServer server([](const json& req) {
    json out = well_formed_response(req);
    out["distribution"] = {{"STOP", 0.5}, {"MOVE_FORWARD", 0.2}};
    return out;
  });
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  auto result = backend.decide("p", obs, ActionSpace::Discrete);
  ASSERT_FALSE(result.has_value());
  EXPECT_NE(result.error().find("backend unavailable"), std::string::npos);
  EXPECT_NE(result.error().find("sums to"), std::string::npos);
}

TEST(RemoteBackend, NearUnitDistributionRenormalized) {
  TestServer server([](const json& req) {
    json out = well_formed_response(req);
    out["distribution"] = {{"STOP", 0.8000004}, {"MOVE_FORWARD", 0.2}};
    return out;
  });
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  auto result = backend.decide("p", obs, ActionSpace::Discrete);
  ASSERT_TRUE(result.has_value()) << result.error();
  double sum = 0.0;
  for (const auto& [k, p] : *result.value().action_distribution) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(RemoteBackend, UnknownCitedFeatureRejected) {
  TestServer server([](const json& req) {
    json out = well_formed_response(req);
    out["explanation"]["cited_feature_ids"] = {"ghost"};
    return out;
  });
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  auto result = backend.decide("p", obs, ActionSpace::Discrete);
  ASSERT_FALSE(result.has_value());
  EXPECT_NE(result.error().find("ghost"), std::string::npos);
}

TEST(RemoteBackend, ArgmaxActionMismatchRejected) {
  TestServer server([](const json& req) {
    json out = well_formed_response(req);
    out["action"] = "MOVE_FORWARD";  // distribution argmax is STOP
    return out;
  });
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  auto result = backend.decide("p", obs, ActionSpace::Discrete);
  ASSERT_FALSE(result.has_value());
}

TEST(RemoteBackend, TimeoutDegradesToUnavailable) {
  TestServer server([](const json& req) {
    std::this_thread::sleep_for(std::chrono::milliseconds(400));
    return well_formed_response(req);
  });
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  cfg.timeout_ms = 100;
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  auto start = std::chrono::steady_clock::now();
  auto result = backend.decide("p", obs, ActionSpace::Discrete);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  EXPECT_FALSE(result.has_value());
  EXPECT_LT(elapsed, 390);  // came back before the handler finished
}

TEST(RemoteBackend, UnreachableEndpointUnavailableNotThrow) {
  RemoteBackendConfig cfg;
  cfg.port = 1;  // nothing listens here
  cfg.timeout_ms = 200;
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  EXPECT_FALSE(backend.ping());
  auto result = backend.decide("p", obs, ActionSpace::Discrete);
  ASSERT_FALSE(result.has_value());
  EXPECT_NE(result.error().find("backend unavailable"), std::string::npos);
}

TEST(RemoteBackend, ContinuousResponseWithSigma) {
  TestServer server([](const json& req) {
    json out;
    out["version"] = 1;
    out["request_id"] = req["request_id"];
    out["action"] = {{"steer", 0.2}, {"throttle", 0.5}};
    out["sigma"] = {{"steer", 0.1}, {"throttle", 0.2}};
    return out;
  });
  RemoteBackendConfig cfg;
  cfg.port = server.port();
  RemoteBackend backend(cfg);
  Observation obs = observation_with_feature();
  auto result = backend.decide("p", obs, ActionSpace::Continuous);
  ASSERT_TRUE(result.has_value()) << result.error();
  EXPECT_NEAR(result.value().action.cont().steer, 0.2, 1e-12);
  // p = 1/(1 + 0.1/0.1) * 1/(1 + 0.2/0.2) = 0.25.
  EXPECT_NEAR(result.value().confidence, 0.25, 1e-12);
}

TEST(RemoteBackend, EndpointParsing) {
  auto ok = RemoteBackend::parse_endpoint("http://10.0.0.5:9100", 500);
  ASSERT_TRUE(ok.has_value());
  EXPECT_EQ(ok.value().host, "10.0.0.5");
  EXPECT_EQ(ok.value().port, 9100);
  EXPECT_EQ(ok.value().timeout_ms, 500);
  EXPECT_FALSE(RemoteBackend::parse_endpoint("nonsense", 500).has_value());
}

}  // namespace
}  // namespace navfuse
