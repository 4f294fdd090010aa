#ifndef GERBELAB_H
#define GERBELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define GERBELAB_OK 0

/**
 * A required pointer argument was null.
 */
#define GERBELAB_ERR_NULL_ARG 1

/**
 * Input text was not valid UTF-8.
 */
#define GERBELAB_ERR_UTF8 2

/**
 * The manifest failed to parse or validate.
 */
#define GERBELAB_ERR_PARSE 3

/**
 * One or more tasks failed or errored.
 */
#define GERBELAB_ERR_TASK_FAILED 4

/**
 * An opaque parsed manifest.
 */
typedef struct GerbelabManifest GerbelabManifest;

/**
 * An opaque run report.
 */
typedef struct GerbelabReport GerbelabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a UTF-8 JSON manifest; on success writes a new handle to `out`.
 *
 * # Safety
 * `text` must be a valid nul-terminated C string and `out` a valid pointer.
 */
int32_t gerbelab_manifest_parse(const char *text, struct GerbelabManifest **out);

/**
 * Run all tasks of a parsed manifest; always produces a report handle.
 * Returns `GERBELAB_ERR_TASK_FAILED` if any task failed or errored.
 *
 * # Safety
 * `manifest` must be a live handle from `gerbelab_manifest_parse` and `out`
 * a valid pointer.
 */
int32_t gerbelab_manifest_run(const struct GerbelabManifest *manifest, struct GerbelabReport **out);

/**
 * Whether every task in the report passed (1) or not (0); -1 on null.
 *
 * # Safety
 * `report` must be a live handle from `gerbelab_manifest_run`.
 */
int32_t gerbelab_report_all_passed(const struct GerbelabReport *report);

/**
 * Serialize a report as JSON into a newly allocated string; free it with
 * `gerbelab_string_free`.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
int32_t gerbelab_report_to_json(const struct GerbelabReport *report, char **out);

/**
 * Render a report as text into a newly allocated string; free it with
 * `gerbelab_string_free`.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
int32_t gerbelab_report_to_text(const struct GerbelabReport *report, char **out);

/**
 * The detail message of the most recent error on this thread.  The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gerbelab_last_error_message(void);

/**
 * Free a manifest handle (null is ignored).
 *
 * # Safety
 * `manifest` must be null or a handle not freed before.
 */
void gerbelab_manifest_free(struct GerbelabManifest *manifest);

/**
 * Free a report handle (null is ignored).
 *
 * # Safety
 * `report` must be null or a handle not freed before.
 */
void gerbelab_report_free(struct GerbelabReport *report);

/**
 * Free a string returned by the `*_to_json` / `*_to_text` functions.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not freed before.
 */
void gerbelab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GERBELAB_H */
