// The gen / run / eval entry points shared by the CLI and the test suites.
//
// Output files are byte-deterministic: episodes are generated from seeds
// derived as seed + index, runs execute episode-parallel but write results
// sorted by episode id, and reports aggregate in a fixed order.
#pragma once

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "navfuse/config.hpp"
#include "navfuse/generator.hpp"
#include "navfuse/jsonl.hpp"
#include "navfuse/metrics.hpp"
#include "navfuse/remote.hpp"
#include "navfuse/runner.hpp"

namespace navfuse {

inline constexpr const char* kEndpointEnvVar = "NAVFUSE_REMOTE_ENDPOINT";

struct GenOptions {
  Domain domain = Domain::Indoor;
  int count = 10;
  std::uint64_t seed = 1;
  GenKnobs knobs;
  // Fractions of the suite that carry the drift / occlusion conditions;
  // assigned to deterministic leading blocks of the index range.
  double drift_fraction = 0.0;
  double occlusion_fraction = 0.0;
};

// Writes `count` episode specs to out_path, one JSONL record per line.
inline Result<int> cmd_gen(const GenOptions& opt, const std::string& out_path) {
  std::ostringstream buffer;
  for (int i = 0; i < opt.count; ++i) {
    GenKnobs knobs = opt.knobs;
    double frac = opt.count > 0 ? static_cast<double>(i) / opt.count : 0.0;
    if (frac < opt.drift_fraction) {
      knobs.gps_drift = true;
    } else if (frac < opt.drift_fraction + opt.occlusion_fraction) {
      knobs.occlusion = true;
    }
    EpisodeSpec spec = generate_episode(opt.domain, opt.seed + i, knobs);
    buffer << serialize_episode_record(spec) << '\n';
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) return Result<int>::fail("cannot write " + out_path);
  out << buffer.str();
  if (!out) return Result<int>::fail("write failed: " + out_path);
  return Result<int>::ok(opt.count);
}

inline Result<std::vector<EpisodeSpec>> load_episode_specs(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return Result<std::vector<EpisodeSpec>>::fail("cannot open " + path);
  }
  std::vector<EpisodeSpec> specs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto parsed = parse_episode_record(line, line_no);
    if (!parsed) {
      return Result<std::vector<EpisodeSpec>>::fail(path + ": " +
                                                    parsed.error());
    }
    if (!std::holds_alternative<EpisodeSpec>(parsed.value())) {
      return Result<std::vector<EpisodeSpec>>::fail(
          path + ": line " + std::to_string(line_no) +
          " is not an episode_spec record");
    }
    specs.push_back(std::get<EpisodeSpec>(std::move(parsed.value())));
  }
  return Result<std::vector<EpisodeSpec>>::ok(std::move(specs));
}

inline Result<std::vector<EpisodeResult>> load_episode_results(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return Result<std::vector<EpisodeResult>>::fail("cannot open " + path);
  }
  std::vector<EpisodeResult> results;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto parsed = parse_episode_record(line, line_no);
    if (!parsed) {
      return Result<std::vector<EpisodeResult>>::fail(path + ": " +
                                                      parsed.error());
    }
    if (!std::holds_alternative<EpisodeResult>(parsed.value())) {
      return Result<std::vector<EpisodeResult>>::fail(
          path + ": line " + std::to_string(line_no) +
          " is not an episode_result record");
    }
    results.push_back(std::get<EpisodeResult>(std::move(parsed.value())));
  }
  return Result<std::vector<EpisodeResult>>::ok(std::move(results));
}

// Builds the semantic backend named by the config. The environment variable
// NAVFUSE_REMOTE_ENDPOINT overrides the configured endpoint. For remote
// backends the server is probed once; on failure the caller gets either a
// scripted fallback (when allowed) or an error.
inline Result<std::shared_ptr<SemanticBackend>> make_backend(
    const GlobalConfig& cfg, bool fallback_scripted,
    std::string* warning = nullptr) {
  if (cfg.backend.type == "scripted") {
    return Result<std::shared_ptr<SemanticBackend>>::ok(
        std::make_shared<ScriptedBackend>(cfg.runner.scripted));
  }
  std::string endpoint = cfg.backend.endpoint;
  if (const char* env = std::getenv(kEndpointEnvVar); env && *env) {
    endpoint = env;
  }
  auto parsed = RemoteBackend::parse_endpoint(endpoint, cfg.backend.timeout_ms);
  if (!parsed) {
    return Result<std::shared_ptr<SemanticBackend>>::fail(parsed.error());
  }
  RemoteBackendConfig remote_cfg = parsed.value();
  remote_cfg.sigma_refs = cfg.runner.scripted;
  auto backend = std::make_shared<RemoteBackend>(remote_cfg);
  if (!backend->ping()) {
    if (fallback_scripted) {
      if (warning) {
        *warning = "remote backend at " + endpoint +
                   " unreachable; falling back to the scripted backend";
      }
      return Result<std::shared_ptr<SemanticBackend>>::ok(
          std::make_shared<ScriptedBackend>(cfg.runner.scripted));
    }
    return Result<std::shared_ptr<SemanticBackend>>::fail(
        "remote backend at " + endpoint +
        " unreachable (use --fallback-scripted to run anyway)");
  }
  return Result<std::shared_ptr<SemanticBackend>>::ok(backend);
}

// Runs every spec in the file under one mode and writes results sorted by
// episode id. Episode failures are data (success=0 records), not errors.
inline Result<int> cmd_run(const std::string& episodes_path, PolicyMode mode,
                           const GlobalConfig& cfg, const std::string& out_path,
                           int parallelism, bool fallback_scripted,
                           std::string* warning = nullptr) {
  auto specs = load_episode_specs(episodes_path);
  if (!specs) return Result<int>::fail(specs.error());

  std::shared_ptr<SemanticBackend> backend;
  if (mode != PolicyMode::Classical) {
    auto made = make_backend(cfg, fallback_scripted, warning);
    if (!made) return Result<int>::fail(made.error());
    backend = made.value();
  }

  const auto& episode_list = specs.value();
  std::vector<EpisodeResult> results(episode_list.size());
  std::atomic<std::size_t> next{0};
  int workers = std::max(1, parallelism);
  auto work = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= episode_list.size()) break;
      results[i] = run_episode(episode_list[i], mode, backend.get(), cfg.runner);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::sort(results.begin(), results.end(),
            [](const EpisodeResult& a, const EpisodeResult& b) {
              return a.episode_id < b.episode_id;
            });
  std::ostringstream buffer;
  for (const auto& r : results) buffer << serialize_episode_record(r) << '\n';
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) return Result<int>::fail("cannot write " + out_path);
  out << buffer.str();
  if (!out) return Result<int>::fail("write failed: " + out_path);
  return Result<int>::ok(static_cast<int>(results.size()));
}

// Aggregates one or more results files into report.txt / report.jsonl next to
// out_base (out_base + ".txt" / ".jsonl").
inline Result<BenchmarkReport> cmd_eval(
    const std::vector<std::string>& results_paths, const std::string& out_base) {
  std::vector<EpisodeResult> all;
  for (const auto& path : results_paths) {
    auto loaded = load_episode_results(path);
    if (!loaded) return Result<BenchmarkReport>::fail(loaded.error());
    for (auto& r : loaded.value()) all.push_back(std::move(r));
  }
  BenchmarkReport report = build_report(std::move(all));
  if (!out_base.empty()) {
    std::ofstream text(out_base + ".txt", std::ios::binary | std::ios::trunc);
    std::ofstream jsonl(out_base + ".jsonl", std::ios::binary | std::ios::trunc);
    if (!text || !jsonl) {
      return Result<BenchmarkReport>::fail("cannot write report files at " +
                                           out_base);
    }
    text << render_report_text(report);
    jsonl << render_report_jsonl(report);
  }
  return Result<BenchmarkReport>::ok(std::move(report));
}

}  // namespace navfuse
