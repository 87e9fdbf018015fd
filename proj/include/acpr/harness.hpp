// SPDX-License-Identifier: Apache-2.0

// Experiment orchestration: episodes, runs, sweeps, artifacts and reports.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acpr/agent.hpp"
#include "acpr/dynamics.hpp"
#include "acpr/metrics.hpp"
#include "acpr/observe.hpp"
#include "acpr/rehearsal.hpp"

namespace acpr {

struct ExperimentConfig {
  PhysicsConfig physics;
  AgentConfig agent;
  RehearsalConfig rehearsal;
  ObservationMode observation = ObservationMode::full;
  std::size_t episodes = 1000;
  std::size_t max_steps_per_episode = 100000;
  std::uint64_t seed = 1;
  std::string output;  // run directory; empty means "do not persist"

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

// --- configuration files (JSON) -------------------------------------------

/// Strict parse: unknown keys and ill-typed values raise ConfigError naming
/// the dotted key; missing keys keep their defaults. The result is validated.
ExperimentConfig parse_config_json(std::string_view json_text);
/// Throws IoError if the file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path);
/// Applies a partial JSON object on top of `base`, with the same strictness.
ExperimentConfig merge_config_json(const ExperimentConfig& base, std::string_view json_text);
/// Every field, pretty-printed.
std::string config_to_json(const ExperimentConfig& cfg);
/// FNV-1a over the canonical JSON of everything except seed and output.
std::string config_hash(const ExperimentConfig& cfg);

// --- episodes and runs ----------------------------------------------------

enum class TerminalCause { pole_1, pole_2, track, step_limit };
std::string_view to_string(TerminalCause c) noexcept;
TerminalCause parse_terminal_cause(std::string_view text);

struct EpisodeRecord {
  std::size_t episode_index = 0;
  std::size_t steps_survived = 0;
  TerminalCause terminal_cause = TerminalCause::step_limit;
  std::int64_t compute_ns = 0;
  double td_error_mean_abs = 0.0;
};

/// Starting state of an episode: pole angles uniform in +-0.05 rad, the rest
/// zero, drawn from the episode's own stream.
inline constexpr double kInitialAngleSpread = 0.05;
CartPoleState initial_state(std::uint64_t run_seed, std::size_t episode_index);

/// One agent with its rehearsal buffer, learning across episodes.
class Trainer {
 public:
  explicit Trainer(const ExperimentConfig& cfg);

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// Regenerates pseudopatterns when due, then runs observe -> act -> step ->
  /// learn until failure or the step cap. compute_ns covers the whole call.
  EpisodeRecord run_episode(std::size_t episode_index);

  const ActorCritic& agent() const noexcept { return agent_; }
  const RehearsalBuffer& buffer() const noexcept { return buffer_; }

 private:
  ExperimentConfig cfg_;
  ActorCritic agent_;
  RehearsalBuffer buffer_;
  std::unique_ptr<UpdateRule> rule_;
};

struct RunArtifact {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<EpisodeRecord> episodes;
  SummaryStats summary;
  std::int64_t total_wall_ns = 0;
  std::optional<std::string> error;  // set when the run aborted early

  PerformanceVector performance() const;
};

/// Runs cfg.episodes episodes with one persistent agent. When cfg.output is
/// set the directory is created and probed before any compute (IoError if not
/// writable) and the artifact is written there. A numeric failure during
/// learning writes the completed episodes plus the diagnostic, then rethrows.
RunArtifact run_experiment(const ExperimentConfig& cfg);

// --- persistence -----------------------------------------------------------

inline constexpr std::string_view kResultsFile = "results.csv";
inline constexpr std::string_view kMetadataFile = "run.json";
inline constexpr std::string_view kNetworksDir = "networks";

/// `episode,steps,terminal_cause,compute_ns` plus one row per episode.
std::string results_csv(const RunArtifact& artifact);
/// Writes results.csv and run.json (config snapshot, seed, hash, summary).
void write_artifact(const RunArtifact& artifact, const std::filesystem::path& dir);
/// Accepts a run directory or a path to its results.csv. The metadata file is
/// optional; without it the config is left at defaults.
RunArtifact load_artifact(const std::filesystem::path& path);
/// Parses the CSV schema above; throws ConfigError with the line number.
std::vector<EpisodeRecord> parse_results_csv(std::string_view text);

// --- sweeps ------------------------------------------------------------------

/// Grid file: either a JSON array of (partial) rehearsal objects, or an object
/// whose values are arrays, expanded as a cross product, e.g.
/// {"strategy": ["none", "batch"], "pseudo_count": [4, 8]}.
std::vector<RehearsalConfig> parse_grid_json(std::string_view json_text,
                                             const RehearsalConfig& base);
std::vector<RehearsalConfig> parse_grid(const std::filesystem::path& path,
                                        const RehearsalConfig& base);

/// "1,2,5" and "1..5" style lists (mixable: "1..3,7").
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

struct SweepCell {
  std::size_t grid_index = 0;
  RehearsalConfig rehearsal;
  std::uint64_t seed = 0;
  std::string label;           // e.g. "batch_p8_r10_e1_both"
  std::filesystem::path path;  // run directory
  std::optional<RunArtifact> artifact;
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // grid-major, seeds inner
  std::size_t failed() const noexcept;
};

/// Runs grid x seeds, up to `threads` cells at once (0 = hardware
/// concurrency). Cell outputs go to out_dir/<label>/seed_<seed>; an index file
/// out_dir/sweep_index.json maps every cell to its directory and summary and
/// lists pairwise Welch tests between grid entries on pooled step vectors.
/// Cell failures are recorded and do not stop the sweep.
SweepResult sweep(const ExperimentConfig& base, const std::vector<RehearsalConfig>& grid,
                  const std::vector<std::uint64_t>& seeds,
                  const std::filesystem::path& out_dir, unsigned threads = 0);

std::string rehearsal_label(const RehearsalConfig& r);

// --- comparison --------------------------------------------------------------

enum class MeanMedianReading { median_above_mean, mean_above_median, nearly_equal };

/// Relative gap |mean - median| / max(|mean|, |median|) at or below this
/// counts as nearly equal.
inline constexpr double kNearlyEqualTolerance = 0.05;

MeanMedianReading read_mean_median(const SummaryStats& s) noexcept;
std::string_view describe(MeanMedianReading r) noexcept;

struct ComparisonReport {
  std::string label_a;
  std::string label_b;
  std::size_t ma_window = 10;
  std::vector<double> difference;  // a - b
  SummaryStats summary_a;
  SummaryStats summary_b;
  SummaryStats summary_difference;
  std::vector<double> moving_average_a;
  std::vector<double> moving_average_b;
  std::vector<double> moving_average_difference;
  WelchResult welch;
  MeanMedianReading reading_a = MeanMedianReading::nearly_equal;
  MeanMedianReading reading_b = MeanMedianReading::nearly_equal;
  double mean_compute_ns_a = 0.0;
  double mean_compute_ns_b = 0.0;
  double significance_level = 0.05;

  std::string to_text() const;
  std::string to_json() const;
};

/// Throws ArgumentError on differing episode counts or a window that does not
/// fit.
ComparisonReport compare_runs(const RunArtifact& a, const RunArtifact& b,
                              std::size_t ma_window = 10);

}  // namespace acpr
