/* C interface to the socmine library.
 *
 * Objects are opaque handles released with their *_free function. Every
 * call returns a socmine_status; on failure socmine_last_error() describes
 * the problem (thread-local, valid until the next call on the same thread).
 * Strings returned through char** out-parameters are owned by the caller and
 * released with socmine_string_free.
 */
#ifndef SOCMINE_H
#define SOCMINE_H

#include <stddef.h>
#include <stdint.h>

#if defined(SOCMINE_BUILDING)
#define SOCMINE_API __attribute__((visibility("default")))
#else
#define SOCMINE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum socmine_status {
  SOCMINE_OK = 0,
  SOCMINE_ERR_ARGUMENT = 1,    /* invalid argument or configuration */
  SOCMINE_ERR_IO = 2,          /* file cannot be read or written */
  SOCMINE_ERR_PARSE = 3,       /* malformed log, schema, JSON or tree text */
  SOCMINE_ERR_MODEL = 4,       /* invalid net, firing error, enrichment failure */
  SOCMINE_ERR_STATE_CAP = 5,   /* reachability graph exceeded its state cap */
  SOCMINE_ERR_CONVERGENCE = 6, /* stationary distribution not found */
  SOCMINE_ERR_PIPELINE = 7,    /* a pipeline stage failed; message starts with the stage name */
  SOCMINE_ERR_INTERNAL = 99
} socmine_status;

typedef struct socmine_log socmine_log;
typedef struct socmine_net socmine_net;
typedef struct socmine_fspn socmine_fspn;

SOCMINE_API const char *socmine_version(void);
SOCMINE_API const char *socmine_last_error(void);
SOCMINE_API void socmine_string_free(char *s);

/* Event logs. `schema` uses the key=value form
 * "trace=..;activity=..;timestamp=..;bot_score=..;format=iso8601|epoch;delimiter=,"
 * and may be NULL for the defaults. Rejected rows are counted, not fatal. */
SOCMINE_API socmine_status socmine_log_read(const char *path, const char *schema, socmine_log **out,
                                            size_t *rejected_rows);
/* max_traces == 0 keeps every trace. */
SOCMINE_API socmine_status socmine_log_preprocess(socmine_log *log, size_t max_events, size_t max_traces);
SOCMINE_API size_t socmine_log_trace_count(const socmine_log *log);
SOCMINE_API size_t socmine_log_event_count(const socmine_log *log);
SOCMINE_API socmine_status socmine_log_write(const socmine_log *log, const char *path);
SOCMINE_API void socmine_log_free(socmine_log *log);

/* Discovery. `tree` may be NULL; otherwise it receives the process tree text. */
SOCMINE_API socmine_status socmine_discover(const socmine_log *log, double noise_threshold, socmine_net **out,
                                            char **tree);
SOCMINE_API socmine_status socmine_net_from_tree(const char *tree, socmine_net **out);
SOCMINE_API socmine_status socmine_net_load(const char *path, socmine_net **out);
SOCMINE_API socmine_status socmine_net_to_json(const socmine_net *net, char **out);
SOCMINE_API socmine_status socmine_net_to_dot(const socmine_net *net, char **out);
SOCMINE_API void socmine_net_free(socmine_net *net);

/* Stochastic nets. */
SOCMINE_API socmine_status socmine_enrich(const socmine_net *net, const socmine_log *log, socmine_fspn **out);
SOCMINE_API socmine_status socmine_fspn_load(const char *path, socmine_fspn **out);
SOCMINE_API socmine_status socmine_fspn_to_json(const socmine_fspn *fspn, char **out);
SOCMINE_API socmine_status socmine_fspn_to_dot(const socmine_fspn *fspn, int reduce, char **out);
SOCMINE_API socmine_status socmine_simulate(const socmine_fspn *fspn, int64_t n_traces, uint64_t seed,
                                            size_t max_firings, socmine_log **out);
SOCMINE_API void socmine_fspn_free(socmine_fspn *fspn);

/* Batch operations. `config_json` holds pipeline settings:
 * {"inputs":[...], "schema":{...}|"key=value;...", "max_events":10,
 *  "max_traces":null, "noise_threshold":0.2, "split_bots":false,
 *  "bot_high":0.9, "bot_low":0.1, "state_cap":1000000, "log_base":0,
 *  "seed":42, "out":".", "net":null}.
 * `reports` receives a JSON array of the per-log reports. */
SOCMINE_API socmine_status socmine_run_pipeline(const char *config_json, char **reports);
/* Compares two pipeline output directories; `out` receives a JSON document. */
SOCMINE_API socmine_status socmine_compare_dirs(const char *dir_a, const char *dir_b, char **out);
/* DOT text for a net.json or fspn.json file. */
SOCMINE_API socmine_status socmine_export_dot_file(const char *path, int reduce, char **out);

#ifdef __cplusplus
}
#endif

#endif
