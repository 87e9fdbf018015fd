// SPDX-License-Identifier: Apache-2.0

#include "acpr/acpr.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "acpr/error.hpp"
#include "acpr/harness.hpp"

struct acpr_config {
  acpr::ExperimentConfig cfg;
};

struct acpr_artifact {
  acpr::RunArtifact art;
};

struct acpr_report {
  acpr::ComparisonReport report;
  std::string text;
  std::string json;
};

struct acpr_sweep_result {
  acpr::SweepResult result;
  std::vector<acpr_artifact> artifacts;  // parallel to result.cells
  std::vector<bool> ok;
};

namespace {

thread_local std::string g_last_error;

acpr_status status_for(acpr::ErrorKind kind) {
  switch (kind) {
    case acpr::ErrorKind::config:
    case acpr::ErrorKind::argument:
      return ACPR_ERR_CONFIG;
    case acpr::ErrorKind::io:
      return ACPR_ERR_IO;
    default:
      return ACPR_ERR_RUNTIME;
  }
}

template <typename F>
acpr_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ACPR_OK;
  } catch (const acpr::Error& e) {
    g_last_error = std::string(acpr::to_string(e.kind())) + ": " + e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ACPR_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ACPR_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return ACPR_ERR_RUNTIME;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw acpr::ArgumentError(std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Setters validate on a copy so a rejected value leaves cfg untouched.
template <typename F>
acpr_status set_field(acpr_config* cfg, F&& apply) {
  return guarded([&] {
    require(cfg, "cfg");
    acpr::ExperimentConfig next = cfg->cfg;
    apply(next);
    next.validate();
    cfg->cfg = std::move(next);
  });
}

}  // namespace

extern "C" {

const char* acpr_version(void) { return "0.1.0"; }

const char* acpr_last_error(void) { return g_last_error.c_str(); }

acpr_status acpr_config_default(acpr_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new acpr_config{};
  });
}

acpr_status acpr_config_load(const char* path, acpr_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new acpr_config{acpr::parse_config(path)};
  });
}

acpr_status acpr_config_parse(const char* json_text, acpr_config** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new acpr_config{acpr::parse_config_json(json_text)};
  });
}

acpr_status acpr_config_merge(acpr_config* cfg, const char* json_text) {
  return guarded([&] {
    require(cfg, "cfg");
    require(json_text, "json_text");
    cfg->cfg = acpr::merge_config_json(cfg->cfg, json_text);
  });
}

acpr_status acpr_config_clone(const acpr_config* cfg, acpr_config** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = new acpr_config{cfg->cfg};
  });
}

void acpr_config_free(acpr_config* cfg) { delete cfg; }

acpr_status acpr_config_set_seed(acpr_config* cfg, uint64_t seed) {
  return set_field(cfg, [&](auto& c) { c.seed = seed; });
}

acpr_status acpr_config_set_episodes(acpr_config* cfg, uint64_t episodes) {
  return set_field(cfg, [&](auto& c) { c.episodes = episodes; });
}

acpr_status acpr_config_set_max_steps(acpr_config* cfg, uint64_t max_steps) {
  return set_field(cfg, [&](auto& c) { c.max_steps_per_episode = max_steps; });
}

acpr_status acpr_config_set_strategy(acpr_config* cfg, const char* strategy) {
  return set_field(cfg, [&](auto& c) {
    require(strategy, "strategy");
    c.rehearsal.strategy = acpr::parse_strategy(strategy);
  });
}

acpr_status acpr_config_set_pseudo_count(acpr_config* cfg, uint64_t count) {
  return set_field(cfg, [&](auto& c) { c.rehearsal.pseudo_count = count; });
}

acpr_status acpr_config_set_reinit_every(acpr_config* cfg, uint64_t episodes) {
  return set_field(cfg, [&](auto& c) { c.rehearsal.reinit_every = episodes; });
}

acpr_status acpr_config_set_apply_to(acpr_config* cfg, const char* target) {
  return set_field(cfg, [&](auto& c) {
    require(target, "target");
    c.rehearsal.apply_to = acpr::parse_apply_to(target);
  });
}

acpr_status acpr_config_set_observation(acpr_config* cfg, const char* mode) {
  return set_field(cfg, [&](auto& c) {
    require(mode, "mode");
    c.observation = acpr::parse_observation_mode(mode);
  });
}

acpr_status acpr_config_set_output(acpr_config* cfg, const char* dir) {
  return set_field(cfg, [&](auto& c) { c.output = dir ? dir : ""; });
}

acpr_status acpr_config_to_json(const acpr_config* cfg, char** out_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_json, "out_json");
    *out_json = dup_string(acpr::config_to_json(cfg->cfg));
  });
}

void acpr_string_free(char* s) { std::free(s); }

acpr_status acpr_run(const acpr_config* cfg, acpr_artifact** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = new acpr_artifact{acpr::run_experiment(cfg->cfg)};
  });
}

acpr_status acpr_artifact_load(const char* path, acpr_artifact** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    if (!std::filesystem::exists(path))
      throw acpr::IoError(std::string("no such artifact: ") + path);
    *out = new acpr_artifact{acpr::load_artifact(path)};
  });
}

void acpr_artifact_free(acpr_artifact* artifact) { delete artifact; }

size_t acpr_artifact_episode_count(const acpr_artifact* artifact) {
  return artifact ? artifact->art.episodes.size() : 0;
}

size_t acpr_artifact_steps(const acpr_artifact* artifact, uint64_t* steps, size_t capacity) {
  if (!artifact || !steps) return 0;
  const auto& eps = artifact->art.episodes;
  const size_t n = std::min(capacity, eps.size());
  for (size_t i = 0; i < n; ++i) steps[i] = eps[i].steps_survived;
  return n;
}

size_t acpr_artifact_compute_ns(const acpr_artifact* artifact, int64_t* compute_ns,
                                size_t capacity) {
  if (!artifact || !compute_ns) return 0;
  const auto& eps = artifact->art.episodes;
  const size_t n = std::min(capacity, eps.size());
  for (size_t i = 0; i < n; ++i) compute_ns[i] = eps[i].compute_ns;
  return n;
}

acpr_status acpr_artifact_summary(const acpr_artifact* artifact, acpr_summary* out) {
  return guarded([&] {
    require(artifact, "artifact");
    require(out, "out");
    const auto& s = artifact->art.summary;
    *out = {s.mean, s.median, s.rmsd, s.step_volatility};
  });
}

const char* acpr_artifact_config_hash(const acpr_artifact* artifact) {
  return artifact ? artifact->art.config_hash.c_str() : "";
}

acpr_status acpr_artifact_csv(const acpr_artifact* artifact, char** out_csv) {
  return guarded([&] {
    require(artifact, "artifact");
    require(out_csv, "out_csv");
    *out_csv = dup_string(acpr::results_csv(artifact->art));
  });
}

acpr_status acpr_sweep(const acpr_config* base, const char* grid_path, const uint64_t* seeds,
                       size_t seed_count, const char* out_dir, unsigned threads,
                       acpr_sweep_result** out) {
  return guarded([&] {
    require(base, "base");
    require(grid_path, "grid_path");
    require(seeds, "seeds");
    require(out_dir, "out_dir");
    require(out, "out");
    const auto grid = acpr::parse_grid(grid_path, base->cfg.rehearsal);
    std::vector<std::uint64_t> seed_list(seeds, seeds + seed_count);
    auto r = std::make_unique<acpr_sweep_result>();
    r->result = acpr::sweep(base->cfg, grid, seed_list, out_dir, threads);
    for (auto& cell : r->result.cells) {
      r->ok.push_back(cell.artifact.has_value());
      r->artifacts.push_back(
          acpr_artifact{cell.artifact ? std::move(*cell.artifact) : acpr::RunArtifact{}});
      cell.artifact.reset();
    }
    *out = r.release();
  });
}

size_t acpr_sweep_cell_count(const acpr_sweep_result* r) {
  return r ? r->result.cells.size() : 0;
}

size_t acpr_sweep_failed_count(const acpr_sweep_result* r) { return r ? r->result.failed() : 0; }

const acpr_artifact* acpr_sweep_cell_artifact(const acpr_sweep_result* r, size_t i) {
  if (!r || i >= r->artifacts.size() || !r->ok[i]) return nullptr;
  return &r->artifacts[i];
}

const char* acpr_sweep_cell_label(const acpr_sweep_result* r, size_t i) {
  if (!r || i >= r->result.cells.size()) return "";
  return r->result.cells[i].label.c_str();
}

uint64_t acpr_sweep_cell_seed(const acpr_sweep_result* r, size_t i) {
  if (!r || i >= r->result.cells.size()) return 0;
  return r->result.cells[i].seed;
}

void acpr_sweep_free(acpr_sweep_result* r) { delete r; }

acpr_status acpr_parse_seeds(const char* text, uint64_t** out, size_t* count) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    require(count, "count");
    const auto seeds = acpr::parse_seed_list(text);
    auto* buf = static_cast<uint64_t*>(std::malloc(seeds.size() * sizeof(uint64_t)));
    if (!buf) throw std::bad_alloc();
    std::copy(seeds.begin(), seeds.end(), buf);
    *out = buf;
    *count = seeds.size();
  });
}

void acpr_seeds_free(uint64_t* seeds) { std::free(seeds); }

acpr_status acpr_compare(const acpr_artifact* a, const acpr_artifact* b, size_t ma_window,
                         acpr_report** out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    auto r = std::make_unique<acpr_report>();
    r->report = acpr::compare_runs(a->art, b->art, ma_window);
    r->text = r->report.to_text();
    r->json = r->report.to_json();
    *out = r.release();
  });
}

const char* acpr_report_text(const acpr_report* r) { return r ? r->text.c_str() : ""; }

const char* acpr_report_json(const acpr_report* r) { return r ? r->json.c_str() : ""; }

acpr_status acpr_report_welch(const acpr_report* r, acpr_welch* out) {
  return guarded([&] {
    require(r, "r");
    require(out, "out");
    *out = {r->report.welch.t, r->report.welch.dof, r->report.welch.p_two_sided};
  });
}

acpr_status acpr_report_write(const acpr_report* r, const char* dir) {
  return guarded([&] {
    require(r, "r");
    require(dir, "dir");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw acpr::IoError(std::string("cannot create ") + dir + ": " + ec.message());
    const std::filesystem::path base(dir);
    for (const auto& [name, body] : {std::pair{"compare.txt", &r->text},
                                     std::pair{"compare.json", &r->json}}) {
      FILE* f = std::fopen((base / name).c_str(), "wb");
      if (!f) throw acpr::IoError("cannot write " + (base / name).string());
      const bool ok = std::fwrite(body->data(), 1, body->size(), f) == body->size();
      if (std::fclose(f) != 0 || !ok)
        throw acpr::IoError("write failed: " + (base / name).string());
    }
  });
}

void acpr_report_free(acpr_report* r) { delete r; }

}  // extern "C"
