// Acceptance suite: one test per criterion, each printing a [PASS]/[FAIL]
// line. Run via ctest (test name "acceptance") or directly:
//   ./build/tests/navfuse_acceptance
#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "navfuse/calibration.hpp"
#include "navfuse/fusion.hpp"
#include "navfuse/harness.hpp"
#include "navfuse/metrics.hpp"
#include "navfuse/rng.hpp"
#include "navfuse/social_force.hpp"
#include "support/oracles.hpp"
#include "support/test_backends.hpp"

namespace navfuse {
namespace {

namespace fs = std::filesystem;

class Acceptance : public ::testing::Test {
 protected:
  void criterion(int number, const char* description) {
    number_ = number;
    description_ = description;
  }

  void TearDown() override {
    std::printf("[%s] criterion %d: %s\n", HasFailure() ? "FAIL" : "PASS",
                number_, description_);
    std::fflush(stdout);
  }

  int number_ = 0;
  const char* description_ = "";
};

TEST_F(Acceptance, C1_FusionWeightFigureCheck) {
  criterion(1, "fusion weight matches the worked confidence ratios");
  EXPECT_NEAR(fusion_weight(2.5, 1.0).alpha, 0.714, 0.005);
  EXPECT_NEAR(fusion_weight(1.0, 2.5).alpha, 0.286, 0.005);
}

TEST_F(Acceptance, C2_CombinedScoreTableArithmetic) {
  criterion(2, "combined score reproduces all 9 published table rows");
  struct Row {
    double sr_percent, faithfulness, combined;
  };
  const Row rows[] = {
      {65, 0.75, 0.49}, {80, 0.78, 0.62}, {70, 0.74, 0.52},  // single-branch
      {67, 0.83, 0.56}, {82, 0.82, 0.67}, {73, 0.80, 0.58},  // no fusion
      {78, 0.87, 0.68}, {91, 0.87, 0.79}, {83, 0.86, 0.71},  // proposed
  };
  for (const Row& row : rows) {
    double combined = combined_score(row.sr_percent / 100.0, row.faithfulness);
    double rounded = std::round(combined * 100.0) / 100.0;
    EXPECT_NEAR(rounded, row.combined, 1e-12)
        << "SR " << row.sr_percent << " x F " << row.faithfulness;
  }
}

TEST_F(Acceptance, C3_KalmanBatchOracleEquivalence) {
  criterion(3, "sequential filter equals batch least squares within 1e-9");
  Rng rng(777);
  int cases = 0;
  for (int trial = 0; trial < 120; ++trial) {
    NavState s;
    s.mean << rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-0.4, 0.4),
        rng.uniform(0, 1);
    Eigen::Matrix4d a = Eigen::Matrix4d::NullaryExpr(
        [&](Eigen::Index, Eigen::Index) { return rng.uniform(-0.5, 0.5); });
    s.cov = a * a.transpose() + Matrix4::Identity() * 0.05;

    Eigen::VectorXd prior_mean = s.mean;
    Eigen::MatrixXd prior_cov = s.cov;
    std::vector<testing::LinearMeasurement> batch;
    int steps = 1 + static_cast<int>(rng.uniform_index(50));
    double dt = 0.1;
    double prev_heading = s.heading();
    for (int k = 0; k < steps; ++k) {
      switch (rng.uniform_index(3)) {
        case 0: {
          Vec2 fix{rng.uniform(-3, 3), rng.uniform(-3, 3)};
          Matrix2 r = (Eigen::Vector2d() << rng.uniform(0.01, 1.0),
                       rng.uniform(0.01, 1.0))
                          .finished()
                          .asDiagonal();
          s = update_position(s, fix, r);
          testing::LinearMeasurement m;
          m.h = Eigen::MatrixXd::Zero(2, 4);
          m.h(0, 0) = 1.0;
          m.h(1, 1) = 1.0;
          m.z = Eigen::Vector2d(fix.x, fix.y);
          m.r = r;
          batch.push_back(m);
          break;
        }
        case 1: {
          double meas = rng.uniform(-0.4, 0.4);
          double r = rng.uniform(0.001, 0.5);
          s = update_heading(s, meas, r);
          testing::LinearMeasurement m;
          m.h = Eigen::MatrixXd::Zero(1, 4);
          m.h(0, 2) = 1.0;
          m.z = Eigen::VectorXd::Constant(1, meas);
          m.r = Eigen::MatrixXd::Constant(1, 1, r);
          batch.push_back(m);
          break;
        }
        default: {
          double dd = rng.uniform(0.0, 0.3);
          double dh = rng.uniform(-0.1, 0.1);
          Matrix2 r = (Eigen::Vector2d() << rng.uniform(0.001, 0.1),
                       rng.uniform(0.001, 0.1))
                          .finished()
                          .asDiagonal();
          s = update_odometry(s, dd, dh, r, dt, prev_heading);
          testing::LinearMeasurement m;
          m.h = Eigen::MatrixXd::Zero(2, 4);
          m.h(0, 3) = dt;
          m.h(1, 2) = 1.0;
          m.z = Eigen::Vector2d(dd, prev_heading + dh);
          m.r = r;
          batch.push_back(m);
          break;
        }
      }
      Eigen::SelfAdjointEigenSolver<Matrix4> es(s.cov);
      ASSERT_GE(es.eigenvalues().minCoeff(), -1e-9);
    }
    testing::BatchEstimate oracle =
        testing::batch_least_squares(prior_mean, prior_cov, batch);
    ASSERT_LT((s.mean - oracle.mean).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_LT((s.cov - oracle.cov).cwiseAbs().maxCoeff(), 1e-9);
    ++cases;
  }
  EXPECT_GE(cases, 100);
}

TEST_F(Acceptance, C4_FaithfulnessDiscrimination) {
  criterion(4,
            "erasure faithfulness separates causal from misattributed "
            "explanations");
  RunnerConfig cfg;
  std::vector<EpisodeSpec> suite;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    suite.push_back(generate_episode(Domain::Outdoor, seed, GenKnobs{}));
  }

  ScriptedBackend faithful;
  testing::MisattributingBackend misattributing;
  std::vector<EpisodeResult> faithful_results, misattributed_results;
  for (const auto& spec : suite) {
    faithful_results.push_back(
        run_episode(spec, PolicyMode::Proposed, &faithful, cfg));
    misattributed_results.push_back(
        run_episode(spec, PolicyMode::Proposed, &misattributing, cfg));
  }

  auto mean_faithful = aggregate_faithfulness(faithful_results);
  auto mean_misattributed = aggregate_faithfulness(misattributed_results);
  ASSERT_TRUE(mean_faithful.has_value());
  ASSERT_TRUE(mean_misattributed.has_value());
  EXPECT_GE(*mean_faithful, 0.9) << "causal explanations should score high";
  EXPECT_LE(*mean_misattributed, 0.1) << "decoy citations should score low";
}

TEST_F(Acceptance, C5_DirectionalAblationTrend) {
  criterion(5,
            "mixed-suite ordering: proposed >= no_fusion >= classical-on-"
            "drift, with proposed collision rate lowest");
  fs::path dir = fs::temp_directory_path() / "navfuse_acceptance_c5";
  fs::create_directories(dir);
  std::string episodes = (dir / "mixed.episodes.jsonl").string();

  GenOptions gen;
  gen.domain = Domain::Outdoor;
  gen.count = 200;
  gen.seed = 1000;
  gen.drift_fraction = 0.45;      // episodes [0, 90): gps drift
  gen.occlusion_fraction = 0.25;  // episodes [90, 140): occlusion
  ASSERT_TRUE(cmd_gen(gen, episodes).has_value());

  GlobalConfig cfg;
  std::map<std::string, std::vector<EpisodeResult>> by_mode;
  for (PolicyMode mode : {PolicyMode::Classical, PolicyMode::SingleBranch,
                          PolicyMode::NoFusion, PolicyMode::Proposed}) {
    std::string out = (dir / (std::string(to_string(mode)) + ".results.jsonl"))
                          .string();
    auto run = cmd_run(episodes, mode, cfg, out, 8, false);
    ASSERT_TRUE(run.has_value()) << run.error();
    auto results = load_episode_results(out);
    ASSERT_TRUE(results.has_value());
    by_mode[to_string(mode)] = results.value();
  }

  auto specs = load_episode_specs(episodes);
  ASSERT_TRUE(specs.has_value());
  std::set<std::string> drift_ids;
  for (const auto& s : specs.value()) {
    if (s.context_tags.count("gps_drift")) drift_ids.insert(s.id);
  }
  ASSERT_GT(drift_ids.size(), 50u);

  auto sr = [](const std::vector<EpisodeResult>& rs) {
    int ok = 0;
    for (const auto& r : rs) ok += r.success ? 1 : 0;
    return static_cast<double>(ok) / rs.size();
  };
  double sr_proposed = sr(by_mode["proposed"]);
  double sr_no_fusion = sr(by_mode["no_fusion"]);
  std::vector<EpisodeResult> classical_drift;
  for (const auto& r : by_mode["classical"]) {
    if (drift_ids.count(r.episode_id)) classical_drift.push_back(r);
  }
  double sr_classical_drift = sr(classical_drift);

  std::printf("  SR proposed=%.3f no_fusion=%.3f classical(drift)=%.3f\n",
              sr_proposed, sr_no_fusion, sr_classical_drift);
  EXPECT_GE(sr_proposed, sr_no_fusion);
  EXPECT_GE(sr_no_fusion, sr_classical_drift);

  double coll_proposed = collision_rates(by_mode["proposed"]).per_episode;
  double coll_classical = collision_rates(by_mode["classical"]).per_episode;
  double coll_single = collision_rates(by_mode["single_branch"]).per_episode;
  std::printf("  collisions/episode proposed=%.3f classical=%.3f single=%.3f\n",
              coll_proposed, coll_classical, coll_single);
  EXPECT_LE(coll_proposed, coll_classical);
  EXPECT_LE(coll_proposed, coll_single);
  fs::remove_all(dir);
}

TEST_F(Acceptance, C6_SplMetricIdentities) {
  criterion(6, "SPL identities hold on 1000 randomized synthetic results");
  Rng rng(909);
  std::vector<EpisodeResult> results;
  for (int i = 0; i < 1000; ++i) {
    EpisodeResult r;
    r.episode_id = "syn" + std::to_string(i);
    r.mode = "proposed";
    r.domain = Domain::Indoor;
    r.success = rng.uniform() < 0.6;
    r.l_opt = rng.uniform(0.5, 40.0);
    r.l_agent = rng.uniform(0.0, 60.0);
    double v = spl(r.success, r.l_opt, r.l_agent);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    if (!r.success) {
      ASSERT_EQ(v, 0.0);
    }
    if (r.success && r.l_agent >= r.l_opt) {
      ASSERT_NEAR(v, r.l_opt / r.l_agent, 1e-12);
    }
    results.push_back(std::move(r));
  }
  BenchmarkReport report = build_report(results);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_LE(report.rows[0].spl, report.rows[0].sr + 1e-12);
}

TEST_F(Acceptance, C7_EndToEndDeterminism) {
  criterion(7,
            "gen/run/eval twice at parallelism 1 and 8 are byte-identical");
  fs::path dir = fs::temp_directory_path() / "navfuse_acceptance_c7";
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  GlobalConfig cfg;
  for (int round = 0; round < 2; ++round) {
    std::string tag = std::to_string(round);
    GenOptions gen;
    gen.domain = Domain::Outdoor;
    gen.count = 16;
    gen.seed = 77;
    gen.drift_fraction = 0.25;
    gen.occlusion_fraction = 0.25;
    ASSERT_TRUE(cmd_gen(gen, p("suite" + tag + ".episodes.jsonl")).has_value());
    auto run = cmd_run(p("suite" + tag + ".episodes.jsonl"),
                       PolicyMode::Proposed, cfg,
                       p("run" + tag + ".results.jsonl"), round == 0 ? 1 : 8,
                       false);
    ASSERT_TRUE(run.has_value()) << run.error();
    ASSERT_TRUE(cmd_eval({p("run" + tag + ".results.jsonl")},
                         p("report" + tag))
                    .has_value());
  }
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  EXPECT_EQ(slurp(p("suite0.episodes.jsonl")), slurp(p("suite1.episodes.jsonl")));
  EXPECT_EQ(slurp(p("run0.results.jsonl")), slurp(p("run1.results.jsonl")));
  EXPECT_EQ(slurp(p("report0.txt")), slurp(p("report1.txt")));
  EXPECT_EQ(slurp(p("report0.jsonl")), slurp(p("report1.jsonl")));
  EXPECT_FALSE(slurp(p("run0.results.jsonl")).empty());
  fs::remove_all(dir);
}

TEST_F(Acceptance, C8_SocialForceSanity) {
  criterion(8, "social-force relaxation, symmetry, and speed cap");
  SocialForceParams params;

  // Relaxation: lone pedestrian within 5% of v0 after 3 tau.
  std::vector<PedestrianState> lone = {
      {{0.0, 0.0}, {0.0, 0.0}, {100.0, 0.0}, 1.4, 0.25, "pedestrian"}};
  MapGeometry open;
  open.bounds = {-200.0, -200.0, 200.0, 200.0};
  double dt = 0.01;
  for (int i = 0; i < static_cast<int>(3.0 * params.tau / dt); ++i) {
    social_force_step(lone, {-150.0, -150.0}, 0.3, open, dt, params);
  }
  EXPECT_NEAR(lone[0].velocity.norm(), 1.4, 1.4 * 0.05);

  // Symmetry: head-on pair at rest with goals at their own positions, so the
  // only force is the mutual repulsion.
  std::vector<PedestrianState> pair = {
      {{-0.8, 0.0}, {0.0, 0.0}, {-0.8, 0.0}, 1.2, 0.25, "a"},
      {{0.8, 0.0}, {0.0, 0.0}, {0.8, 0.0}, 1.2, 0.25, "b"}};
  Vec2 far_robot{0.0, 150.0};
  Vec2 a0 = social_force_accel(pair, 0, far_robot, 0.3, open, params);
  Vec2 a1 = social_force_accel(pair, 1, far_robot, 0.3, open, params);
  EXPECT_NEAR((a0 + a1).norm(), 0.0, 1e-9);
  EXPECT_NEAR(a0.norm(),
              social_repulsion_magnitude(0.5, 1.6, params), 1e-9);

  // Speed cap over 10,000 randomized pedestrian-steps.
  Rng rng(616);
  std::vector<PedestrianState> crowd;
  for (int i = 0; i < 10; ++i) {
    crowd.push_back(PedestrianState{{rng.uniform(-4, 4), rng.uniform(-4, 4)},
                                    {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                                    {rng.uniform(-4, 4), rng.uniform(-4, 4)},
                                    rng.uniform(0.6, 2.2),
                                    0.25,
                                    "p"});
  }
  MapGeometry arena;
  arena.bounds = {-6.0, -6.0, 6.0, 6.0};
  for (int step = 0; step < 1000; ++step) {
    social_force_step(crowd, {rng.uniform(-4, 4), rng.uniform(-4, 4)}, 0.3,
                      arena, 0.05, params);
    for (const auto& ped : crowd) {
      ASSERT_LE(ped.velocity.norm(), params.v_max + 1e-9);
    }
  }
}

TEST_F(Acceptance, C9_TemperatureScalingCalibration) {
  criterion(9, "temperature fit matches the exhaustive oracle within 1e-3");
  Rng rng(2025);
  std::vector<CalibrationSample> samples;
  for (int i = 0; i < 300; ++i) {
    CalibrationSample s;
    s.logits.assign(4, 0.0);
    int predicted = static_cast<int>(rng.uniform_index(4));
    s.logits[predicted] = 4.0;  // ~95% softmax confidence
    for (auto& l : s.logits) l += rng.gaussian(0.0, 0.1);
    s.true_label = rng.uniform() < 0.6
                       ? predicted
                       : static_cast<int>((predicted + 1 + rng.uniform_index(3)) % 4);
    samples.push_back(std::move(s));
  }
  CalibrationModel fitted = fit_temperature(samples);
  EXPECT_GT(fitted.temperature, 1.0);
  EXPECT_LT(fitted.fit_nll_after, fitted.fit_nll_before);  // strict decrease

  double best_t = 0.0, best_nll = std::numeric_limits<double>::infinity();
  for (double t = 0.05; t <= 20.0; t += 5e-4) {
    double nll = calibration_nll(samples, t);
    if (nll < best_nll) {
      best_nll = nll;
      best_t = t;
    }
  }
  EXPECT_NEAR(fitted.temperature, best_t, 1e-3);

  // Argmax preservation across 1000 random logit vectors and temperatures.
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> logits(4);
    for (auto& l : logits) l = rng.uniform(-6.0, 6.0);
    CalibrationModel m;
    m.temperature = std::exp(rng.uniform(std::log(0.05), std::log(20.0)));
    auto probs = apply_temperature(m, logits);
    std::size_t am_l =
        std::max_element(logits.begin(), logits.end()) - logits.begin();
    std::size_t am_p =
        std::max_element(probs.begin(), probs.end()) - probs.begin();
    ASSERT_EQ(am_l, am_p);
  }
}

}  // namespace
}  // namespace navfuse
