#include <gtest/gtest.h>

#include <cmath>

#include "navfuse/metrics.hpp"
#include "navfuse/rng.hpp"

namespace navfuse {
namespace {

TEST(Spl, FormulaAndGuards) {
  EXPECT_DOUBLE_EQ(spl(false, 10.0, 25.0), 0.0);
  EXPECT_DOUBLE_EQ(spl(true, 10.0, 10.0), 1.0);
  EXPECT_DOUBLE_EQ(spl(true, 12.0, 15.0), 0.8);
  // Odometry shorter than optimal: clamped to 1, never above.
  EXPECT_DOUBLE_EQ(spl(true, 10.0, 7.0), 1.0);
  EXPECT_THROW(spl(true, 0.0, 5.0), std::invalid_argument);
  EXPECT_THROW(spl(true, -1.0, 5.0), std::invalid_argument);
}

TEST(Spl, PropertySuite) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    bool success = rng.uniform() < 0.6;
    double l_opt = rng.uniform(0.5, 50.0);
    double l_agent = rng.uniform(0.0, 80.0);
    double v = spl(success, l_opt, l_agent);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    if (!success) {
      EXPECT_DOUBLE_EQ(v, 0.0);
    }
    if (success && l_agent >= l_opt) {
      EXPECT_NEAR(v, l_opt / l_agent, 1e-12);
    }
  }
}

EpisodeResult result_with(bool success, double l_opt, double l_agent,
                          std::vector<double> faith = {},
                          std::string mode = "proposed",
                          Domain domain = Domain::Indoor) {
  static int counter = 0;
  EpisodeResult r;
  r.episode_id = "ep" + std::to_string(counter++);
  r.mode = std::move(mode);
  r.domain = domain;
  r.success = success;
  r.l_opt = l_opt;
  r.l_agent = l_agent;
  r.terminated_reason = success ? "goal" : "max_steps";
  for (double f : faith) {
    StepRecord s;
    s.faithfulness = f;
    s.explanation =
        Explanation{"Stopping because a dog is crossing the road.", {"f"}, {}};
    r.steps.push_back(s);
  }
  return r;
}

TEST(Faithfulness, MeanOverAllRecordedDecisions) {
  std::vector<EpisodeResult> results = {
      result_with(true, 10, 12, {1.0}),
      result_with(true, 10, 12, {0.8}),
      result_with(false, 10, 12, {0.6}),
  };
  auto f = aggregate_faithfulness(results);
  ASSERT_TRUE(f.has_value());
  EXPECT_NEAR(*f, 0.8, 1e-12);

  std::vector<EpisodeResult> all_one = {result_with(true, 10, 12, {1.0, 1.0}),
                                        result_with(true, 10, 12, {1.0})};
  EXPECT_DOUBLE_EQ(*aggregate_faithfulness(all_one), 1.0);
}

TEST(Faithfulness, AbsentWithoutExplanations) {
  std::vector<EpisodeResult> results = {result_with(true, 10, 12),
                                        result_with(false, 10, 12)};
  EXPECT_FALSE(aggregate_faithfulness(results).has_value());
}

TEST(Collisions, RatesArithmetic) {
  std::vector<EpisodeResult> results;
  for (int i = 0; i < 10; ++i) {
    EpisodeResult r = result_with(true, 10, 15);
    r.collisions = i < 3 ? 1 : 0;
    r.pedestrian_collisions = i < 2 ? 1 : 0;
    results.push_back(r);
  }
  CollisionRates rates = collision_rates(results);
  EXPECT_NEAR(rates.per_episode, 0.3, 1e-12);
  ASSERT_TRUE(rates.per_meter.has_value());
  EXPECT_NEAR(*rates.per_meter, 3.0 / 150.0, 1e-12);
  EXPECT_NEAR(rates.pedestrian_per_episode, 0.2, 1e-12);
}

TEST(Collisions, ZeroAndDegenerateCases) {
  std::vector<EpisodeResult> clean = {result_with(true, 10, 15)};
  CollisionRates rates = collision_rates(clean);
  EXPECT_DOUBLE_EQ(rates.per_episode, 0.0);
  EXPECT_DOUBLE_EQ(*rates.per_meter, 0.0);

  EpisodeResult zero_len = result_with(false, 10, 0.0);
  CollisionRates r2 = collision_rates({zero_len});
  EXPECT_FALSE(r2.per_meter.has_value());
}

TEST(FkGrade, HandCountedExamples) {
  // "The cat sat." -> words 3, sentences 1, syllables 3.
  EXPECT_NEAR(fk_grade("The cat sat."), 0.39 * 3 + 11.8 * 1 - 15.59, 1e-12);
  EXPECT_NEAR(fk_grade("The cat sat."), -2.62, 1e-9);
}

TEST(FkGrade, RatioInvarianceUnderRepetition) {
  double once = fk_grade("Go.");
  double thrice = fk_grade("Go. Go. Go.");
  EXPECT_NEAR(once, thrice, 1e-12);
}

TEST(FkGrade, CanonicalExplanationGolden) {
  // Hand count: stop-ping(2) be-cause(2) a(1) dog(1) is(1) cross-ing(2)
  // the(1) road(1) = 11 syllables, 8 words, 1 sentence.
  double expected = 0.39 * 8.0 + 11.8 * (11.0 / 8.0) - 15.59;
  EXPECT_NEAR(fk_grade("Stopping because a dog is crossing the road."),
              expected, 1e-12);
  EXPECT_NEAR(expected, 3.755, 1e-9);
}

TEST(FkGrade, DegenerateTextIsError) {
  EXPECT_THROW(fk_grade(""), std::invalid_argument);
  EXPECT_THROW(fk_grade("no terminator"), std::invalid_argument);
  EXPECT_THROW(fk_grade("..."), std::invalid_argument);
}

TEST(CombinedScore, PaperTableTriples) {
  // The three proposed rows of the method-comparison table.
  EXPECT_NEAR(std::round(combined_score(0.91, 0.87) * 100) / 100, 0.79, 1e-12);
  EXPECT_NEAR(std::round(combined_score(0.78, 0.87) * 100) / 100, 0.68, 1e-12);
  EXPECT_NEAR(std::round(combined_score(0.83, 0.86) * 100) / 100, 0.71, 1e-12);
  EXPECT_DOUBLE_EQ(combined_score(0.0, 0.9), 0.0);
}

TEST(CombinedScore, SymmetricAndMonotone) {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    double a = rng.uniform(0, 1), b = rng.uniform(0, 1);
    EXPECT_DOUBLE_EQ(combined_score(a, b), combined_score(b, a));
    double a2 = std::min(1.0, a + rng.uniform(0, 1 - a));
    EXPECT_GE(combined_score(a2, b), combined_score(a, b) - 1e-12);
  }
  EXPECT_THROW(combined_score(1.2, 0.5), std::invalid_argument);
}

TEST(Report, ClassicalRowsRenderNa) {
  std::vector<EpisodeResult> results = {
      result_with(true, 10, 12, {}, "classical", Domain::Indoor),
      result_with(false, 10, 12, {}, "classical", Domain::Indoor)};
  BenchmarkReport report = build_report(results);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_FALSE(report.rows[0].mean_faithfulness.has_value());
  EXPECT_FALSE(report.rows[0].combined.has_value());
  std::string text = render_report_text(report);
  EXPECT_NE(text.find("N/A"), std::string::npos);
  EXPECT_NE(text.find("Classical"), std::string::npos);
  EXPECT_NE(text.find("50"), std::string::npos);  // SR as whole percent
}

TEST(Report, EmptyResultSetIsEmptyReport) {
  BenchmarkReport report = build_report({});
  EXPECT_TRUE(report.rows.empty());
  EXPECT_FALSE(render_report_text(report).empty());  // header only
  EXPECT_TRUE(render_report_jsonl(report).empty());
}

TEST(Report, RowsSortedModeMajorDomainMinor) {
  std::vector<EpisodeResult> results;
  for (const char* mode : {"proposed", "classical", "no_fusion",
                           "single_branch"}) {
    for (Domain d : {Domain::Social, Domain::Indoor, Domain::Outdoor}) {
      results.push_back(result_with(true, 10, 12, {0.9}, mode, d));
    }
  }
  BenchmarkReport report = build_report(results);
  ASSERT_EQ(report.rows.size(), 12u);
  EXPECT_EQ(report.rows[0].mode, "classical");
  EXPECT_EQ(report.rows[0].domain, Domain::Indoor);
  EXPECT_EQ(report.rows[1].domain, Domain::Outdoor);
  EXPECT_EQ(report.rows[2].domain, Domain::Social);
  EXPECT_EQ(report.rows[3].mode, "single_branch");
  EXPECT_EQ(report.rows[6].mode, "no_fusion");
  EXPECT_EQ(report.rows[9].mode, "proposed");
}

TEST(Report, AggregationIsOrderIndependent) {
  Rng rng(12);
  std::vector<EpisodeResult> results;
  for (int i = 0; i < 40; ++i) {
    results.push_back(result_with(rng.uniform() < 0.5, rng.uniform(5, 20),
                                  rng.uniform(5, 30),
                                  {rng.uniform(0, 1), rng.uniform(0, 1)},
                                  i % 2 == 0 ? "proposed" : "classical",
                                  Domain::Outdoor));
  }
  BenchmarkReport a = build_report(results);
  std::vector<EpisodeResult> shuffled = results;
  // Deterministic shuffle.
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);
  }
  BenchmarkReport b = build_report(shuffled);
  EXPECT_EQ(render_report_jsonl(a), render_report_jsonl(b));
}

TEST(Report, AggregateSplNeverExceedsSr) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EpisodeResult> results;
    int n = 1 + static_cast<int>(rng.uniform_index(20));
    for (int i = 0; i < n; ++i) {
      results.push_back(result_with(rng.uniform() < 0.5, rng.uniform(1, 20),
                                    rng.uniform(0, 40)));
    }
    BenchmarkReport report = build_report(results);
    for (const auto& row : report.rows) {
      EXPECT_LE(row.spl, row.sr + 1e-12);
    }
  }
}

}  // namespace
}  // namespace navfuse
