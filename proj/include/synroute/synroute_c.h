/*
 * Project synroute - Copyright 2026 synroute authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef SYNROUTE_SYNROUTE_C_H_
#define SYNROUTE_SYNROUTE_C_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SYNROUTE_API __declspec(dllexport)
#else
#define SYNROUTE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum synroute_status {
  SYNROUTE_OK = 0,
  SYNROUTE_E_INVALID_ARGUMENT = 1,
  SYNROUTE_E_PARSE = 2,
  SYNROUTE_E_VALENCE = 3,
  SYNROUTE_E_IO = 4,
  SYNROUTE_E_NOT_FOUND = 5,
  SYNROUTE_E_NUMERIC = 6,
  SYNROUTE_E_EXISTS = 7,
  SYNROUTE_E_INTERNAL = 8
} synroute_status;

typedef struct synroute_catalog synroute_catalog;

typedef void (*synroute_progress_fn)(const char *line, void *user);

SYNROUTE_API const char *synroute_version(void);
SYNROUTE_API const char *synroute_status_name(synroute_status status);

/* Message of the last failed call on this thread ("" when none). */
SYNROUTE_API const char *synroute_last_error(void);

/* Frees strings returned through char** out-parameters. */
SYNROUTE_API void synroute_string_free(char *s);

/* Canonical SMILES of a molecule. */
SYNROUTE_API synroute_status synroute_canonicalize(const char *smiles, char **out);

/* Loads blocks and templates; options_json may be NULL or e.g. {"strict": true}. */
SYNROUTE_API synroute_status synroute_catalog_load(const char *blocks_path,
                                                   const char *templates_path,
                                                   const char *options_json,
                                                   synroute_catalog **out);
SYNROUTE_API void synroute_catalog_free(synroute_catalog *catalog);
SYNROUTE_API int32_t synroute_catalog_size(const synroute_catalog *catalog);
/* Block count, template count, digest and load report as JSON. */
SYNROUTE_API synroute_status synroute_catalog_info(const synroute_catalog *catalog, char **json);

/* One random route from seed; route_json receives {"product", "route", "blocks", "steps"}. */
SYNROUTE_API synroute_status synroute_sample_route(const synroute_catalog *catalog, uint64_t seed,
                                                   int32_t max_steps, char **route_json);

/* Checks a route given in the s-expression form emitted by the library. */
SYNROUTE_API synroute_status synroute_validate_route(const synroute_catalog *catalog,
                                                     const char *route, int32_t *valid);

/* Names of the tasks accepted by synroute_run_task, as a JSON array. */
SYNROUTE_API synroute_status synroute_task_names(char **json);

/* Runs a task (see the task list) from a JSON config and writes its outputs
 * to config["out"]; summary_json may be NULL. */
SYNROUTE_API synroute_status synroute_run_task(const char *task, const char *config_json,
                                               synroute_progress_fn progress, void *user,
                                               char **summary_json);

#ifdef __cplusplus
}
#endif

#endif /* SYNROUTE_SYNROUTE_C_H_ */
