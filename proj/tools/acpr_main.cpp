// SPDX-License-Identifier: Apache-2.0

// acpr-bench: command-line front end over the C API.
//
//   acpr-bench run --config cfg.json [--seed N] [--episodes N] [--strategy S]
//                  [--pseudo-count N] [--reinit-every N] [--apply-to T]
//                  [--observation M] [--out DIR]
//   acpr-bench sweep --config cfg.json --grid grid.json --seeds 1..5 --out DIR
//   acpr-bench compare RUN_A RUN_B [--ma-window N] [--out DIR] [--json]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 I/O error.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "acpr/acpr.h"

namespace {

int fail(acpr_status status) {
  std::fprintf(stderr, "acpr-bench: %s\n", acpr_last_error());
  return static_cast<int>(status);
}

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed, episodes, pseudo_count, reinit_every, max_steps;
  std::optional<std::string> strategy, apply_to, observation, out;
};

struct SweepOptions {
  std::string config, grid, seeds, out;
  unsigned threads = 0;
  std::optional<std::uint64_t> episodes;
};

struct CompareOptions {
  std::string a, b;
  std::size_t ma_window = 10;
  std::optional<std::string> out;
  bool json = false;
};

// Loads --config (or defaults) into *cfg. Returns ACPR_OK or the failure status.
acpr_status load_config(const std::string& path, acpr_config** cfg) {
  return path.empty() ? acpr_config_default(cfg) : acpr_config_load(path.c_str(), cfg);
}

int cmd_run(const RunOptions& o) {
  acpr_config* cfg = nullptr;
  if (auto s = load_config(o.config, &cfg); s != ACPR_OK) return fail(s);
  acpr_status s = ACPR_OK;
  if (s == ACPR_OK && o.seed) s = acpr_config_set_seed(cfg, *o.seed);
  if (s == ACPR_OK && o.episodes) s = acpr_config_set_episodes(cfg, *o.episodes);
  if (s == ACPR_OK && o.max_steps) s = acpr_config_set_max_steps(cfg, *o.max_steps);
  if (s == ACPR_OK && o.strategy) s = acpr_config_set_strategy(cfg, o.strategy->c_str());
  if (s == ACPR_OK && o.pseudo_count) s = acpr_config_set_pseudo_count(cfg, *o.pseudo_count);
  if (s == ACPR_OK && o.reinit_every) s = acpr_config_set_reinit_every(cfg, *o.reinit_every);
  if (s == ACPR_OK && o.apply_to) s = acpr_config_set_apply_to(cfg, o.apply_to->c_str());
  if (s == ACPR_OK && o.observation) s = acpr_config_set_observation(cfg, o.observation->c_str());
  if (s == ACPR_OK && o.out) s = acpr_config_set_output(cfg, o.out->c_str());
  if (s != ACPR_OK) {
    acpr_config_free(cfg);
    return fail(s);
  }

  acpr_artifact* art = nullptr;
  s = acpr_run(cfg, &art);
  acpr_config_free(cfg);
  if (s != ACPR_OK) return fail(s);

  acpr_summary sum{};
  acpr_artifact_summary(art, &sum);
  std::printf("episodes %zu  mean %.2f  median %.2f  rmsd %.2f  volatility %.2f  config %s\n",
              acpr_artifact_episode_count(art), sum.mean, sum.median, sum.rmsd,
              sum.step_volatility, acpr_artifact_config_hash(art));
  acpr_artifact_free(art);
  return 0;
}

int cmd_sweep(const SweepOptions& o) {
  acpr_config* cfg = nullptr;
  if (auto s = load_config(o.config, &cfg); s != ACPR_OK) return fail(s);
  if (o.episodes) {
    if (auto s = acpr_config_set_episodes(cfg, *o.episodes); s != ACPR_OK) {
      acpr_config_free(cfg);
      return fail(s);
    }
  }
  std::uint64_t* seeds = nullptr;
  std::size_t n_seeds = 0;
  if (auto s = acpr_parse_seeds(o.seeds.c_str(), &seeds, &n_seeds); s != ACPR_OK) {
    acpr_config_free(cfg);
    return fail(s);
  }
  acpr_sweep_result* result = nullptr;
  const acpr_status s =
      acpr_sweep(cfg, o.grid.c_str(), seeds, n_seeds, o.out.c_str(), o.threads, &result);
  acpr_seeds_free(seeds);
  acpr_config_free(cfg);
  if (s != ACPR_OK) return fail(s);

  const std::size_t cells = acpr_sweep_cell_count(result);
  for (std::size_t i = 0; i < cells; ++i) {
    const acpr_artifact* a = acpr_sweep_cell_artifact(result, i);
    acpr_summary sum{};
    if (a && acpr_artifact_summary(a, &sum) == ACPR_OK)
      std::printf("%-32s seed %-6llu mean %9.2f  median %9.2f\n",
                  acpr_sweep_cell_label(result, i),
                  static_cast<unsigned long long>(acpr_sweep_cell_seed(result, i)), sum.mean,
                  sum.median);
    else
      std::printf("%-32s seed %-6llu FAILED\n", acpr_sweep_cell_label(result, i),
                  static_cast<unsigned long long>(acpr_sweep_cell_seed(result, i)));
  }
  const std::size_t failed = acpr_sweep_failed_count(result);
  std::printf("%zu cells, %zu failed; index written to %s/sweep_index.json\n", cells, failed,
              o.out.c_str());
  acpr_sweep_free(result);
  return failed == 0 ? 0 : static_cast<int>(ACPR_ERR_RUNTIME);
}

int cmd_compare(const CompareOptions& o) {
  acpr_artifact* a = nullptr;
  acpr_artifact* b = nullptr;
  if (auto s = acpr_artifact_load(o.a.c_str(), &a); s != ACPR_OK) return fail(s);
  if (auto s = acpr_artifact_load(o.b.c_str(), &b); s != ACPR_OK) {
    acpr_artifact_free(a);
    return fail(s);
  }
  acpr_report* report = nullptr;
  acpr_status s = acpr_compare(a, b, o.ma_window, &report);
  acpr_artifact_free(a);
  acpr_artifact_free(b);
  if (s != ACPR_OK) return fail(s);
  std::fputs(o.json ? acpr_report_json(report) : acpr_report_text(report), stdout);
  if (o.out) s = acpr_report_write(report, o.out->c_str());
  acpr_report_free(report);
  return s == ACPR_OK ? 0 : fail(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Actor-critic pseudorehearsal workbench on the double pole-balancing task"};
  app.set_version_flag("--version", std::string(acpr_version()));
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("--config", run.config, "JSON config file (defaults if omitted)");
  run_cmd->add_option("--seed", run.seed, "Run seed");
  run_cmd->add_option("--episodes", run.episodes, "Number of episodes");
  run_cmd->add_option("--max-steps", run.max_steps, "Step cap per episode");
  run_cmd->add_option("--strategy", run.strategy, "none | batch | ortho");
  run_cmd->add_option("--pseudo-count", run.pseudo_count, "Pseudopatterns per buffer");
  run_cmd->add_option("--reinit-every", run.reinit_every, "Episodes between regenerations");
  run_cmd->add_option("--apply-to", run.apply_to, "actor | critic | both");
  run_cmd->add_option("--observation", run.observation, "full | partial");
  run_cmd->add_option("--out", run.out, "Run output directory");

  SweepOptions sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a rehearsal grid over several seeds");
  sweep_cmd->add_option("--config", sw.config, "Base JSON config file");
  sweep_cmd->add_option("--grid", sw.grid, "Grid JSON file")->required();
  sweep_cmd->add_option("--seeds", sw.seeds, "Seed list, e.g. 1,2,3 or 1..5")->required();
  sweep_cmd->add_option("--out", sw.out, "Sweep output directory")->required();
  sweep_cmd->add_option("--threads", sw.threads, "Concurrent cells (0 = all cores)");
  sweep_cmd->add_option("--episodes", sw.episodes, "Override episodes per run");

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two run artifacts");
  cmp_cmd->add_option("artifact_a", cmp.a, "Run directory or results.csv")->required();
  cmp_cmd->add_option("artifact_b", cmp.b, "Run directory or results.csv")->required();
  cmp_cmd->add_option("--ma-window", cmp.ma_window, "Moving-average window");
  cmp_cmd->add_option("--out", cmp.out, "Write compare.txt and compare.json here");
  cmp_cmd->add_flag("--json", cmp.json, "Print the JSON report instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ACPR_ERR_CONFIG);
  }

  if (*run_cmd) return cmd_run(run);
  if (*sweep_cmd) return cmd_sweep(sw);
  return cmd_compare(cmp);
}
