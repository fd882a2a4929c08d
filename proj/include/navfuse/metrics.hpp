// Benchmark metrics and reporting: success rate, SPL, collision rates,
// erasure-faithfulness aggregation, Flesch-Kincaid readability, the combined
// score, and the per-(mode, domain) report table.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "navfuse/types.hpp"

namespace navfuse {

// SPL = S * l_opt / max(l_agent, l_opt). The denominator guard keeps SPL <= 1
// when a noisy odometer reports l_agent < l_opt.
inline double spl(bool success, double l_opt, double l_agent) {
  if (!(l_opt > 0.0)) throw std::invalid_argument("spl: l_opt must be > 0");
  if (l_agent < 0.0) throw std::invalid_argument("spl: l_agent must be >= 0");
  if (!success) return 0.0;
  return l_opt / std::max(l_agent, l_opt);
}

// Mean of every recorded per-decision F across all episodes; absent when no
// decision carried one.
inline std::optional<double> aggregate_faithfulness(
    const std::vector<EpisodeResult>& results) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : results) {
    for (const auto& s : r.steps) {
      if (s.faithfulness) {
        sum += *s.faithfulness;
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

struct CollisionRates {
  double per_episode = 0.0;
  std::optional<double> per_meter;
  double pedestrian_per_episode = 0.0;
  std::optional<double> pedestrian_per_meter;
};

inline CollisionRates collision_rates(const std::vector<EpisodeResult>& results) {
  CollisionRates out;
  if (results.empty()) return out;
  double total = 0.0, ped_total = 0.0, meters = 0.0;
  for (const auto& r : results) {
    total += r.collisions;
    ped_total += r.pedestrian_collisions;
    meters += r.l_agent;
  }
  out.per_episode = total / results.size();
  out.pedestrian_per_episode = ped_total / results.size();
  if (meters > 0.0) {
    out.per_meter = total / meters;
    out.pedestrian_per_meter = ped_total / meters;
  }
  return out;
}

namespace metrics_detail {

inline bool is_vowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
    case 'y':
      return true;
    default:
      return false;
  }
}

// Vowel-group heuristic: count vowel clusters, subtract a silent trailing
// 'e' (a lone final 'e' after a consonant, when the word has another
// cluster), minimum one syllable per word.
inline int count_syllables(const std::string& word) {
  int clusters = 0;
  bool in_cluster = false;
  for (char c : word) {
    if (is_vowel(c)) {
      if (!in_cluster) {
        ++clusters;
        in_cluster = true;
      }
    } else {
      in_cluster = false;
    }
  }
  if (clusters > 1 && word.size() >= 2) {
    char last = static_cast<char>(std::tolower(word.back()));
    if (last == 'e' && !is_vowel(word[word.size() - 2])) {
      --clusters;
    }
  }
  return std::max(clusters, 1);
}

}  // namespace metrics_detail

// Flesch-Kincaid grade: 0.39 * (words/sentences) + 11.8 * (syllables/words)
// - 15.59. Sentences are runs of terminators (. ! ?); words are whitespace
// tokens stripped of surrounding punctuation. Degenerate text is an error.
inline double fk_grade(const std::string& text) {
  int sentences = 0;
  bool in_terminator = false;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      if (!in_terminator) ++sentences;
      in_terminator = true;
    } else {
      in_terminator = false;
    }
  }

  int words = 0, syllables = 0;
  std::string token;
  auto flush = [&]() {
    std::string letters;
    for (char c : token) {
      if (std::isalpha(static_cast<unsigned char>(c))) letters.push_back(c);
    }
    if (!letters.empty()) {
      ++words;
      syllables += metrics_detail::count_syllables(letters);
    }
    token.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();

  if (words == 0 || sentences == 0) {
    throw std::invalid_argument(
        "fk_grade: text needs at least one word and one sentence terminator");
  }
  return 0.39 * (static_cast<double>(words) / sentences) +
         11.8 * (static_cast<double>(syllables) / words) - 15.59;
}

inline double combined_score(double sr, double mean_faithfulness) {
  if (sr < 0.0 || sr > 1.0 || mean_faithfulness < 0.0 ||
      mean_faithfulness > 1.0) {
    throw std::invalid_argument("combined_score: inputs must be in [0,1]");
  }
  return sr * mean_faithfulness;
}

struct ReportRow {
  std::string mode;
  Domain domain = Domain::Indoor;
  int episode_count = 0;
  double sr = 0.0;
  double spl = 0.0;
  CollisionRates collisions;
  std::optional<double> mean_faithfulness;
  std::optional<double> fk;
  std::optional<double> readability_likert;  // externally supplied, if ever
  std::optional<double> combined;
};

struct BenchmarkReport {
  std::vector<ReportRow> rows;
};

namespace metrics_detail {

inline int mode_order(const std::string& mode) {
  if (mode == "classical") return 0;
  if (mode == "single_branch") return 1;
  if (mode == "no_fusion") return 2;
  if (mode == "proposed") return 3;
  return 4;
}

inline const char* mode_display(const std::string& mode) {
  if (mode == "classical") return "Classical";
  if (mode == "single_branch") return "Single-Branch";
  if (mode == "no_fusion") return "No Fusion";
  if (mode == "proposed") return "Proposed";
  return mode.c_str();
}

inline const char* domain_display(Domain d) {
  switch (d) {
    case Domain::Indoor: return "Indoor";
    case Domain::Outdoor: return "Outdoor";
    case Domain::Social: return "Social";
  }
  return "?";
}

}  // namespace metrics_detail

// Aggregates results into one row per (mode, domain), sorted mode-major in
// the method-comparison order and domain-minor (Indoor, Outdoor, Social).
// Aggregation is order-independent: results are pre-sorted by episode id.
inline BenchmarkReport build_report(std::vector<EpisodeResult> results) {
  std::sort(results.begin(), results.end(),
            [](const EpisodeResult& a, const EpisodeResult& b) {
              if (a.mode != b.mode) return a.mode < b.mode;
              if (a.domain != b.domain) return a.domain < b.domain;
              return a.episode_id < b.episode_id;
            });

  std::map<std::pair<std::string, Domain>, std::vector<EpisodeResult>> groups;
  for (auto& r : results) {
    groups[{r.mode, r.domain}].push_back(std::move(r));
  }

  BenchmarkReport report;
  for (auto& [key, group] : groups) {
    ReportRow row;
    row.mode = key.first;
    row.domain = key.second;
    row.episode_count = static_cast<int>(group.size());
    double sr_sum = 0.0, spl_sum = 0.0;
    double fk_sum = 0.0;
    int fk_count = 0;
    for (const auto& r : group) {
      sr_sum += r.success ? 1.0 : 0.0;
      spl_sum += spl(r.success, r.l_opt, r.l_agent);
      for (const auto& s : r.steps) {
        if (s.explanation && !s.explanation->text.empty()) {
          try {
            fk_sum += fk_grade(s.explanation->text);
            ++fk_count;
          } catch (const std::invalid_argument&) {
            // Unscorable fragment; skip.
          }
        }
      }
    }
    row.sr = sr_sum / group.size();
    row.spl = spl_sum / group.size();
    row.collisions = collision_rates(group);
    row.mean_faithfulness = aggregate_faithfulness(group);
    if (fk_count > 0) row.fk = fk_sum / fk_count;
    if (row.mean_faithfulness) {
      row.combined = combined_score(row.sr, *row.mean_faithfulness);
    }
    report.rows.push_back(std::move(row));
  }

  std::sort(report.rows.begin(), report.rows.end(),
            [](const ReportRow& a, const ReportRow& b) {
              int ma = metrics_detail::mode_order(a.mode);
              int mb = metrics_detail::mode_order(b.mode);
              if (ma != mb) return ma < mb;
              return static_cast<int>(a.domain) < static_cast<int>(b.domain);
            });
  return report;
}

// Aligned text table in the benchmark's column order. SR renders as a whole
// percent, other metrics to two decimals, N/A where undefined.
inline std::string render_report_text(const BenchmarkReport& report) {
  auto fmt2 = [](std::optional<double> v) -> std::string {
    if (!v) return "N/A";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *v);
    return buf;
  };
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Method", "Domain", "SR (%)", "SPL", "Collision Rate",
                   "Exp. Faithfulness", "Readability (FK)", "Combined Score",
                   "Episodes"});
  for (const auto& row : report.rows) {
    char sr_buf[16];
    std::snprintf(sr_buf, sizeof(sr_buf), "%.0f", row.sr * 100.0);
    cells.push_back({metrics_detail::mode_display(row.mode),
                     metrics_detail::domain_display(row.domain),
                     sr_buf,
                     fmt2(row.spl),
                     fmt2(row.collisions.per_episode),
                     fmt2(row.mean_faithfulness),
                     fmt2(row.fk),
                     fmt2(row.combined),
                     std::to_string(row.episode_count)});
  }
  std::vector<std::size_t> widths(cells[0].size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      widths[i] = std::max(widths[i], line[i].size());
    }
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out += line[i];
      if (i + 1 < line.size()) {
        out.append(widths[i] - line[i].size() + 2, ' ');
      }
    }
    out += '\n';
  }
  return out;
}

// One JSON object per row, in table order.
inline std::string render_report_jsonl(const BenchmarkReport& report) {
  std::string out;
  for (const auto& row : report.rows) {
    nlohmann::ordered_json j;
    j["mode"] = row.mode;
    j["domain"] = to_string(row.domain);
    j["episode_count"] = row.episode_count;
    j["sr"] = row.sr;
    j["spl"] = row.spl;
    j["collision_rate_per_episode"] = row.collisions.per_episode;
    j["collision_rate_per_meter"] =
        row.collisions.per_meter ? nlohmann::ordered_json(*row.collisions.per_meter)
                                 : nlohmann::ordered_json(nullptr);
    j["pedestrian_collision_rate_per_episode"] =
        row.collisions.pedestrian_per_episode;
    j["mean_faithfulness"] = row.mean_faithfulness
                                 ? nlohmann::ordered_json(*row.mean_faithfulness)
                                 : nlohmann::ordered_json(nullptr);
    j["fk_grade"] = row.fk ? nlohmann::ordered_json(*row.fk)
                           : nlohmann::ordered_json(nullptr);
    j["readability_likert"] =
        row.readability_likert ? nlohmann::ordered_json(*row.readability_likert)
                               : nlohmann::ordered_json(nullptr);
    j["combined"] = row.combined ? nlohmann::ordered_json(*row.combined)
                                 : nlohmann::ordered_json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace navfuse
