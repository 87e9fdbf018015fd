/* SPDX-License-Identifier: Apache-2.0 */

/*
 * C interface to the actor-critic pseudorehearsal workbench.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an acpr_status; on
 * failure acpr_last_error() describes the problem (thread-local, valid until
 * the next call on the same thread). Status values double as process exit
 * codes for the command-line tool.
 */

#ifndef ACPR_ACPR_H
#define ACPR_ACPR_H

#include <stddef.h>
#include <stdint.h>

#if defined(ACPR_BUILDING_LIBRARY)
#define ACPR_API __attribute__((visibility("default")))
#else
#define ACPR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum acpr_status {
  ACPR_OK = 0,
  ACPR_ERR_CONFIG = 1,  /* invalid configuration, option or argument */
  ACPR_ERR_RUNTIME = 2, /* numeric failure or other runtime error */
  ACPR_ERR_IO = 3       /* unreadable input or unwritable output */
} acpr_status;

typedef struct acpr_config acpr_config;
typedef struct acpr_artifact acpr_artifact;
typedef struct acpr_report acpr_report;
typedef struct acpr_sweep_result acpr_sweep_result;

typedef struct acpr_summary {
  double mean;
  double median;
  double rmsd;
  double step_volatility;
} acpr_summary;

typedef struct acpr_welch {
  double t;
  double dof;
  double p_two_sided;
} acpr_welch;

ACPR_API const char* acpr_version(void);
ACPR_API const char* acpr_last_error(void);

/* ---- configuration ---- */

ACPR_API acpr_status acpr_config_default(acpr_config** out);
ACPR_API acpr_status acpr_config_load(const char* path, acpr_config** out);
ACPR_API acpr_status acpr_config_parse(const char* json_text, acpr_config** out);
/* Applies a partial JSON document (same schema and strictness as a file). */
ACPR_API acpr_status acpr_config_merge(acpr_config* cfg, const char* json_text);
ACPR_API acpr_status acpr_config_clone(const acpr_config* cfg, acpr_config** out);
ACPR_API void acpr_config_free(acpr_config* cfg);

ACPR_API acpr_status acpr_config_set_seed(acpr_config* cfg, uint64_t seed);
ACPR_API acpr_status acpr_config_set_episodes(acpr_config* cfg, uint64_t episodes);
ACPR_API acpr_status acpr_config_set_max_steps(acpr_config* cfg, uint64_t max_steps);
/* "none", "batch" or "ortho" */
ACPR_API acpr_status acpr_config_set_strategy(acpr_config* cfg, const char* strategy);
ACPR_API acpr_status acpr_config_set_pseudo_count(acpr_config* cfg, uint64_t count);
ACPR_API acpr_status acpr_config_set_reinit_every(acpr_config* cfg, uint64_t episodes);
/* "actor", "critic" or "both" */
ACPR_API acpr_status acpr_config_set_apply_to(acpr_config* cfg, const char* target);
/* "full" or "partial" */
ACPR_API acpr_status acpr_config_set_observation(acpr_config* cfg, const char* mode);
/* Run directory; NULL or "" disables persistence. */
ACPR_API acpr_status acpr_config_set_output(acpr_config* cfg, const char* dir);

/* Pretty-printed JSON snapshot; release with acpr_string_free. */
ACPR_API acpr_status acpr_config_to_json(const acpr_config* cfg, char** out_json);
ACPR_API void acpr_string_free(char* s);

/* ---- runs ---- */

/* Runs the experiment and, when an output directory is configured, writes
 * results.csv, run.json and final network snapshots there. */
ACPR_API acpr_status acpr_run(const acpr_config* cfg, acpr_artifact** out);
/* Loads a run directory or a results.csv path. */
ACPR_API acpr_status acpr_artifact_load(const char* path, acpr_artifact** out);
ACPR_API void acpr_artifact_free(acpr_artifact* artifact);

ACPR_API size_t acpr_artifact_episode_count(const acpr_artifact* artifact);
/* Copies up to `capacity` per-episode values; returns the number copied. */
ACPR_API size_t acpr_artifact_steps(const acpr_artifact* artifact, uint64_t* steps,
                                    size_t capacity);
ACPR_API size_t acpr_artifact_compute_ns(const acpr_artifact* artifact, int64_t* compute_ns,
                                         size_t capacity);
ACPR_API acpr_status acpr_artifact_summary(const acpr_artifact* artifact, acpr_summary* out);
ACPR_API const char* acpr_artifact_config_hash(const acpr_artifact* artifact);
/* results.csv contents; release with acpr_string_free. */
ACPR_API acpr_status acpr_artifact_csv(const acpr_artifact* artifact, char** out_csv);

/* ---- sweeps ---- */

/* Runs every grid entry (file: JSON array or object of arrays) for every seed
 * on up to `threads` threads (0 = all cores) and writes out_dir/sweep_index.json.
 * Succeeds even when some cells fail; see acpr_sweep_failed_count. */
ACPR_API acpr_status acpr_sweep(const acpr_config* base, const char* grid_path,
                                const uint64_t* seeds, size_t seed_count,
                                const char* out_dir, unsigned threads,
                                acpr_sweep_result** out);
ACPR_API size_t acpr_sweep_cell_count(const acpr_sweep_result* r);
ACPR_API size_t acpr_sweep_failed_count(const acpr_sweep_result* r);
/* NULL when the cell failed. The artifact is owned by the sweep result. */
ACPR_API const acpr_artifact* acpr_sweep_cell_artifact(const acpr_sweep_result* r, size_t i);
ACPR_API const char* acpr_sweep_cell_label(const acpr_sweep_result* r, size_t i);
ACPR_API uint64_t acpr_sweep_cell_seed(const acpr_sweep_result* r, size_t i);
ACPR_API void acpr_sweep_free(acpr_sweep_result* r);

/* "1,2,3" / "1..5" lists. On success *out is malloc'ed; release with acpr_seeds_free. */
ACPR_API acpr_status acpr_parse_seeds(const char* text, uint64_t** out, size_t* count);
ACPR_API void acpr_seeds_free(uint64_t* seeds);

/* ---- comparison ---- */

ACPR_API acpr_status acpr_compare(const acpr_artifact* a, const acpr_artifact* b,
                                  size_t ma_window, acpr_report** out);
ACPR_API const char* acpr_report_text(const acpr_report* r);
ACPR_API const char* acpr_report_json(const acpr_report* r);
ACPR_API acpr_status acpr_report_welch(const acpr_report* r, acpr_welch* out);
/* Writes compare.txt and compare.json into dir (created if needed). */
ACPR_API acpr_status acpr_report_write(const acpr_report* r, const char* dir);
ACPR_API void acpr_report_free(acpr_report* r);

#ifdef __cplusplus
}
#endif

#endif /* ACPR_ACPR_H */
