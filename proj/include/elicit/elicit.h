/* C interface to the elicitation engine.
 *
 * Every call returns an elicit_status. On failure, elicit_last_error() holds
 * a message for the calling thread until its next call. Strings returned
 * through `char** out` are owned by the caller and released with
 * elicit_string_free. All documents are UTF-8 JSON unless noted.
 */
#ifndef ELICIT_ELICIT_H
#define ELICIT_ELICIT_H

#include <stdint.h>

#if defined(ELICIT_BUILDING_LIBRARY)
#define ELICIT_API __attribute__((visibility("default")))
#else
#define ELICIT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elicit_status {
  ELICIT_OK = 0,
  ELICIT_INVALID_ARGUMENT = 1,
  ELICIT_NOT_FOUND = 2,
  ELICIT_CONFLICT = 3,
  ELICIT_FORBIDDEN_RELATION = 4,
  ELICIT_INVALID_STATE = 5,
  ELICIT_DOMAIN = 6,
  ELICIT_IO = 7,
  ELICIT_PARSE = 8,
  ELICIT_UNAUTHORIZED = 9,
  ELICIT_INTERNAL = 100
} elicit_status;

typedef struct elicit_store elicit_store;
typedef struct elicit_model elicit_model;

ELICIT_API const char* elicit_version(void);
ELICIT_API const char* elicit_last_error(void);
ELICIT_API const char* elicit_status_name(elicit_status s);
ELICIT_API void elicit_string_free(char* s);

/* ---- Session store (backs the HTTP service) ----
 * `idempotency_key` may be NULL. `admin_token` NULL or "" disables the
 * admin route. */
ELICIT_API elicit_status elicit_store_open(const char* dir, const char* admin_token, elicit_store** out);
ELICIT_API void elicit_store_close(elicit_store* store);

ELICIT_API elicit_status elicit_create_session(elicit_store* store, const char* config_json,
                                               const char* idempotency_key, char** out_json);
ELICIT_API elicit_status elicit_next_question(elicit_store* store, const char* session_id, char** out_json);
ELICIT_API elicit_status elicit_submit_response(elicit_store* store, const char* session_id, const char* body_json,
                                                const char* idempotency_key, char** out_json);
ELICIT_API elicit_status elicit_submit_belief(elicit_store* store, const char* session_id, const char* body_json,
                                              const char* idempotency_key, char** out_json);
ELICIT_API elicit_status elicit_mark_info_expanded(elicit_store* store, const char* session_id,
                                                   const char* idempotency_key, char** out_json);
ELICIT_API elicit_status elicit_finalize(elicit_store* store, const char* session_id, const char* idempotency_key,
                                         char** out_json);
ELICIT_API elicit_status elicit_enter_event_outcome(elicit_store* store, const char* bearer_token,
                                                    const char* body_json, const char* idempotency_key,
                                                    char** out_json);
/* Raw JSON-lines text. */
ELICIT_API elicit_status elicit_session_log(elicit_store* store, const char* session_id, char** out_text);
ELICIT_API elicit_status elicit_replay_session(elicit_store* store, const char* session_id, char** out_json);

/* ---- Batch operations ---- */

/* Rebuilds one log file and checks the recomputed payment against the logged one. */
ELICIT_API elicit_status elicit_replay_log(const char* log_path, char** out_json);
/* Canned population config for a scenario name. */
ELICIT_API elicit_status elicit_scenario_config(const char* name, uint64_t seed, char** out_json);
/* Applies {"seed", "agents", "algorithm", "event"} overrides (all optional)
 * and returns the validated config with every default spelled out. */
ELICIT_API elicit_status elicit_population_override(const char* population_json, const char* overrides_json,
                                                    char** out_json);
ELICIT_API elicit_status elicit_simulate(const char* population_json, const char* out_dir, char** out_json);
/* Reads every *.jsonl log in `log_dir`; writes report.json and CSVs to `out_dir`. */
ELICIT_API elicit_status elicit_analyze(const char* log_dir, const char* out_dir, char** out_json);

/* ---- Preference models ----
 * Model JSON: {"beliefs": pi | [lo, hi], "utilities": "linear" | "log" |
 * {"crra": rho} | {"crra": [lo, hi]} | [utility, ...]}. Lotteries are
 * {"nv": "9", "v": "11"} or [9, 11]. */
ELICIT_API elicit_status elicit_model_create(const char* model_json, elicit_model** out);
ELICIT_API void elicit_model_free(elicit_model* model);
/* Writes "first", "second", "indifferent" or "incomparable". */
ELICIT_API elicit_status elicit_model_compare(const elicit_model* model, const char* p_json, const char* q_json,
                                              char** out_relation);

#ifdef __cplusplus
}
#endif

#endif
