#ifndef DRLAB_CAPI_H
#define DRLAB_CAPI_H

/* Stable C interface to the delayed-reward laboratory.
 *
 * All functions return a drlab_status (0 on success); every failure path
 * records a human-readable message retrievable via drlab_last_error().
 * Objects cross the boundary as opaque handles that must be released with
 * their matching _free function. Strings returned by the library remain
 * owned by the library and stay valid until the next call that can fail
 * or produce a string on the same handle.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum drlab_status {
  DRLAB_OK = 0,
  DRLAB_ERR_INVALID_ARGUMENT = 1, /* malformed input or precondition violation */
  DRLAB_ERR_NOT_FOUND = 2,        /* unknown name / missing table entry */
  DRLAB_ERR_LIMIT = 3,            /* enumeration or size cap exceeded */
  DRLAB_ERR_IO = 4,               /* file could not be read or written */
  DRLAB_ERR_INTERNAL = 5          /* unexpected failure; see drlab_last_error */
} drlab_status;

/* Library version, e.g. "0.1.0". */
const char* drlab_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
const char* drlab_last_error(void);

/* ---- Decision-process specifications ---------------------------------- */

typedef struct drlab_spec drlab_spec;

/* Parse a spec from its text form. On success *out owns the spec. */
drlab_status drlab_spec_parse(const char* text, drlab_spec** out);

/* Serialize back to text. The string lives on the handle until the next
 * drlab_spec_* call on it. */
drlab_status drlab_spec_save(drlab_spec* spec, const char** out_text);

void drlab_spec_free(drlab_spec* spec);

/* Exhaustive past-invariance check (order form). holds=1/0; when violated
 * and witness_out is non-NULL, a description of the violating quadruple is
 * stored on the handle. */
drlab_status drlab_spec_check_pi(drlab_spec* spec, int32_t max_len, int* holds,
                                 const char** witness_out);

/* ---- Named counterexample fixtures ------------------------------------ */

/* Build a named fixture ("XorPolicyClass", "FixedPointBias",
 * "OptimalNotInPiS") and return its spec. */
drlab_status drlab_fixture_build(const char* name, drlab_spec** out);

/* Expected-vs-computed table for a fixture, as text. Caller frees with
 * drlab_string_free. */
drlab_status drlab_fixture_report(const char* name, char** out_text);

/* ---- Verification suites ---------------------------------------------- */

/* Run a named verification suite ("theory", "counterexamples",
 * "gradients", or "all"). Writes a pass/fail report to *out_text (caller
 * frees with drlab_string_free) and sets *passed to 1 only if every check
 * in the suite passed. */
drlab_status drlab_verify(const char* suite, char** out_text, int* passed);

/* ---- Training ---------------------------------------------------------- */

/* Run a training experiment from a sectioned-text config file. Artifacts
 * (metrics CSV, snapshots) are written where the config directs. */
drlab_status drlab_train(const char* config_path, uint64_t seed);

/* Evaluate a policy snapshot's per-cell guidance values on a 10x10 grid
 * and write them as CSV. */
drlab_status drlab_heatmap(const char* snapshot_path, const char* out_csv_path);

/* Relative average performance across result files: mean over tasks of
 * (return + offset) / (oracle + offset). */
drlab_status drlab_rap(const char* const* result_paths, const double* oracles,
                       const double* offsets, size_t count, double* out);

/* ---- Memory ------------------------------------------------------------ */

/* Free a string returned through a char** out parameter. */
void drlab_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DRLAB_CAPI_H */
